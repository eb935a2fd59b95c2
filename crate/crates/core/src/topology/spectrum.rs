use crate::floquet::{floquet_operator, quasienergy_with_tol, DEFAULT_DEGENERACY_TOL};
use crate::model::{KPoint, QuenchProtocol};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Evaluates `f` on every node of an `n1 × n2` torus grid, row-major in `i1`.
///
/// Rows run in parallel; results land in index order so the output does not
/// depend on the thread count.
pub fn map_grid<T, F>(n1: usize, n2: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize, KPoint) -> T + Sync,
{
    (0..n1)
        .into_par_iter()
        .flat_map_iter(|i1| {
            let f = &f;
            (0..n2).map(move |i2| f(i1, i2, KPoint::on_grid(i1, i2, n1, n2)))
        })
        .collect()
}

/// `E₊(k)` on the uniform grid (`E₋ = −E₊`) with gap summaries.
#[derive(Debug, Clone)]
pub struct QuasienergyGrid {
    pub n: usize,
    /// Row-major in `k1`, entry `i1 * n + i2`.
    pub e_plus: Vec<f64>,
    /// Smallest distance of `E₊` to 0.
    pub min_gap_0: f64,
    /// Smallest distance of `E₊` to π.
    pub min_gap_pi: f64,
    pub argmin_0: KPoint,
    pub argmin_pi: KPoint,
}

impl QuasienergyGrid {
    pub fn k(&self, idx: usize) -> KPoint {
        KPoint::on_grid(idx / self.n, idx % self.n, self.n, self.n)
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap_0.min(self.min_gap_pi)
    }

    /// Grid points where `|sin E₊| < tol`.
    pub fn degenerate_points(&self, tol: f64) -> Vec<KPoint> {
        self.e_plus
            .iter()
            .enumerate()
            .filter(|(_, e)| e.sin().abs() < tol)
            .map(|(i, _)| self.k(i))
            .collect()
    }

    pub fn is_gapped(&self, tol: f64) -> bool {
        self.min_gap_0 > tol && self.min_gap_pi > tol
    }
}

pub fn band_spectrum(qp: &QuenchProtocol, grid_n: usize) -> QuasienergyGrid {
    assert!(grid_n >= 2, "grid_n must be at least 2");
    let e_plus = map_grid(grid_n, grid_n, |_, _, k| {
        quasienergy_with_tol(&floquet_operator(qp, k), DEFAULT_DEGENERACY_TOL).e_plus
    });
    let mut g = QuasienergyGrid {
        n: grid_n,
        e_plus,
        min_gap_0: f64::INFINITY,
        min_gap_pi: f64::INFINITY,
        argmin_0: KPoint::new(0.0, 0.0),
        argmin_pi: KPoint::new(0.0, 0.0),
    };
    for (i, &e) in g.e_plus.iter().enumerate() {
        if e < g.min_gap_0 {
            g.min_gap_0 = e;
            g.argmin_0 = g.k(i);
        }
        if PI - e < g.min_gap_pi {
            g.min_gap_pi = PI - e;
            g.argmin_pi = g.k(i);
        }
    }
    g
}

const MAX_ZOOM_SEEDS: usize = 64;

/// Smallest `min(E₊, π − E₊)` found by zooming in around the local minima of a
/// coarse grid. Returns the gap and where it was found.
pub fn refined_min_gap(qp: &QuenchProtocol, coarse_n: usize, zoom_steps: usize) -> (f64, KPoint) {
    let gap = |k: KPoint| {
        let e = quasienergy_with_tol(&floquet_operator(qp, k), DEFAULT_DEGENERACY_TOL).e_plus;
        e.min(PI - e)
    };
    let coarse = band_spectrum(qp, coarse_n);
    let mut best_k = if coarse.min_gap_0 < coarse.min_gap_pi {
        coarse.argmin_0
    } else {
        coarse.argmin_pi
    };
    let mut best = coarse.min_gap();
    // Gap closures can sit in shallow basins far above the global coarse
    // minimum, so every coarse local minimum seeds a zoom.
    let n = coarse_n;
    let g_at = |i1: usize, i2: usize| {
        let e = coarse.e_plus[(i1 % n) * n + (i2 % n)];
        e.min(PI - e)
    };
    let mut seeds: Vec<(f64, KPoint)> = (0..n * n)
        .filter_map(|idx| {
            let (i1, i2) = (idx / n, idx % n);
            let g = g_at(i1, i2);
            let is_min = (0..3).all(|a| (0..3).all(|b| g <= g_at(i1 + n + a - 1, i2 + n + b - 1)));
            is_min.then(|| (g, coarse.k(idx)))
        })
        .collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(MAX_ZOOM_SEEDS);
    for (_, seed) in seeds {
        let mut centre = seed;
        let mut half = 2.0 * PI / coarse_n as f64;
        let mut local = gap(centre);
        for _ in 0..zoom_steps {
            const M: usize = 7;
            let mut next = centre;
            for a in 0..M {
                for b in 0..M {
                    let da = -half + 2.0 * half * a as f64 / (M - 1) as f64;
                    let db = -half + 2.0 * half * b as f64 / (M - 1) as f64;
                    let k = KPoint::new(centre.k1 + da, centre.k2 + db);
                    let g = gap(k);
                    if g < local {
                        local = g;
                        next = k;
                    }
                }
            }
            centre = next;
            half /= 3.0;
        }
        if local < best {
            best = local;
            best_k = centre;
        }
    }
    (best, best_k)
}
