use crate::error::{Error, Result};

/// Amplitudes below this use the linear low-amplitude rule.
pub const LOW_AMPLITUDE_EDGE: f64 = 0.05;

const MAX_ITERATIONS: usize = 200;

/// `ω_R(A) = a·exp(−b A) + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Euclidean norm of the residual vector.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl RabiFit {
    pub fn eval(&self, amplitude: f64) -> f64 {
        self.a * (-self.b * amplitude).exp() + self.c
    }

    pub fn residuals(&self, data: &[(f64, f64)]) -> Vec<f64> {
        data.iter().map(|&(x, y)| self.eval(x) - y).collect()
    }
}

/// Best `(a, c)` for fixed `b` and the resulting sum of squares.
fn linear_ac(data: &[(f64, f64)], b: f64) -> Option<(f64, f64, f64)> {
    let n = data.len() as f64;
    let (mut se, mut see, mut sy, mut sey) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in data {
        let e = (-b * x).exp();
        se += e;
        see += e * e;
        sy += y;
        sey += e * y;
    }
    let det = see * n - se * se;
    if det.abs() <= 1e-14 * see * n || !det.is_finite() {
        return None;
    }
    let a = (sey * n - se * sy) / det;
    let c = (see * sy - se * sey) / det;
    let cost = data
        .iter()
        .map(|&(x, y)| {
            let r = a * (-b * x).exp() + c - y;
            r * r
        })
        .sum();
    Some((a, c, cost))
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *slot = det(&mc) / d;
    }
    Some(out)
}

/// Least-squares fit of `ω_R = a·exp(−bA) + c`.
///
/// A coarse scan over `b` with `(a, c)` solved linearly at each `b` seeds a
/// Levenberg–Marquardt refinement of all three parameters.
pub fn rabi_fit(data: &[(f64, f64)]) -> Result<RabiFit> {
    if data.len() < 4 {
        return Err(Error::invalid("calibration", "need at least 4 points"));
    }
    if data.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("calibration", "non-finite value"));
    }
    let mut xs: Vec<f64> = data.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("calibration", "amplitudes must be distinct"));
    }
    let span = xs[xs.len() - 1] - xs[0];

    // |b| from 1e-3/span to 1e2/span on a log grid, both signs.
    let mut seed: Option<(f64, f64, f64, f64)> = None;
    for i in 0..=400 {
        let mag = 10f64.powf(-3.0 + 5.0 * i as f64 / 400.0) / span;
        for b in [mag, -mag] {
            if let Some((a, c, cost)) = linear_ac(data, b) {
                if seed.is_none_or(|s| cost < s.3) {
                    seed = Some((a, b, c, cost));
                }
            }
        }
    }
    let (mut a, mut b, mut c, mut cost) = seed.ok_or(Error::FitDiverged {
        iterations: 0,
        residual: f64::INFINITY,
    })?;

    let mut lambda = 1e-3;
    for iteration in 1..=MAX_ITERATIONS {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(x, y) in data {
            let e = (-b * x).exp();
            let r = a * e + c - y;
            let j = [e, -a * x * e, 1.0];
            for p in 0..3 {
                jtr[p] += j[p] * r;
                for q in 0..3 {
                    jtj[p][q] += j[p] * j[q];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut m = jtj;
            for (p, row) in m.iter_mut().enumerate() {
                row[p] += lambda * jtj[p][p].max(1e-300);
            }
            let Some(step) = solve3(m, [-jtr[0], -jtr[1], -jtr[2]]) else {
                lambda *= 10.0;
                continue;
            };
            let (na, nb, nc) = (a + step[0], b + step[1], c + step[2]);
            let ncost: f64 = data
                .iter()
                .map(|&(x, y)| {
                    let r = na * (-nb * x).exp() + nc - y;
                    r * r
                })
                .sum();
            if ncost.is_finite() && ncost < cost {
                let gain = cost - ncost;
                (a, b, c) = (na, nb, nc);
                cost = ncost;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if gain <= 1e-15 * cost || cost < 1e-28 {
                    return Ok(finish(a, b, c, cost, iteration));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // No step decreases the cost: the current point is a minimum.
            return Ok(finish(a, b, c, cost, iteration));
        }
    }
    Err(Error::FitDiverged {
        iterations: MAX_ITERATIONS,
        residual: cost.sqrt(),
    })
}

fn finish(a: f64, b: f64, c: f64, cost: f64, iterations: usize) -> RabiFit {
    RabiFit {
        a,
        b,
        c,
        residual_norm: cost.sqrt(),
        iterations,
    }
}

/// Microwave amplitude to Rabi frequency, using the fit down to
/// [`LOW_AMPLITUDE_EDGE`] and a line through the origin below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiCalibration {
    pub fit: RabiFit,
}

impl RabiCalibration {
    pub fn rabi_frequency(&self, amplitude: f64) -> Result<f64> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::invalid("amplitude", "must be finite and non-negative"));
        }
        if amplitude >= LOW_AMPLITUDE_EDGE {
            Ok(self.fit.eval(amplitude))
        } else {
            Ok(amplitude * self.fit.eval(LOW_AMPLITUDE_EDGE) / LOW_AMPLITUDE_EDGE)
        }
    }
}

/// Two-column `amplitude frequency` text; blank lines and `#` comments are
/// skipped, columns may be separated by whitespace or commas.
pub fn parse_calibration(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let bad = || {
            Error::invalid(
                "calibration",
                format!("line {}: expected two numbers, got {line:?}", no + 1),
            )
        };
        if cols.len() != 2 {
            return Err(bad());
        }
        let x: f64 = cols[0].parse().map_err(|_| bad())?;
        let y: f64 = cols[1].parse().map_err(|_| bad())?;
        out.push((x, y));
    }
    Ok(out)
}
