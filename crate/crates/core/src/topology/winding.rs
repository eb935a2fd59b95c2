//! Phase singularities of spin textures, loop winding numbers and the
//! singularity-sum Chern number.
//!
//! Orientation: `(k1, k2)` is right-handed, loop windings are counted along
//! clockwise paths, and the planar angle is the full angle of `(s_l, s_j)`.
//! With a cyclic `(i; j, l)` the weighted sum `½ Σ sgn(s_i) w` is then the
//! degree of the texture, which for the lower band equals the link-variable
//! Chern number. Anticyclic axis choices pick up the permutation parity.

use super::texture::{full_angle, AxisChoice, SpinTextureGrid, Texture, WindingAngle, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::floquet::Band;
use crate::model::{KPoint, QuenchProtocol};
use crate::vec3::Vec3;
use std::f64::consts::{FRAC_PI_2, PI};

/// Plaquette windings must land this close to a multiple of 2π.
pub const WINDING_RESIDUAL_TOL: f64 = 1e-3;

/// Wraps an angle difference into `(−π, π]`.
pub fn wrap_diff(d: f64) -> f64 {
    let mut r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityRecord {
    /// Subpixel location.
    pub k0: KPoint,
    /// Clockwise winding of the planar angle around `k0`.
    pub winding: i64,
    /// Sign of `s_i` at `k0`.
    pub weight_sign: i64,
    pub axes: AxisChoice,
    /// Lower-left grid node of the plaquette (or the node itself for
    /// singularities sitting exactly on the grid).
    pub cell: (usize, usize),
}

impl SingularityRecord {
    /// Contribution `parity · sgn · w / 2` to the Chern number.
    pub fn contribution(&self) -> f64 {
        (self.axes.parity() * self.weight_sign * self.winding) as f64 / 2.0
    }
}

fn is_singular(s: Vec3, axes: &AxisChoice) -> bool {
    axes.j.of(s).abs() < SINGULAR_TOL && axes.l.of(s).abs() < SINGULAR_TOL
}

/// Solves the bilinear interpolants of `(s_j, s_l)` on the unit square for a
/// common zero by Newton iteration; falls back to the centre.
fn bilinear_zero(c: [Vec3; 4], axes: &AxisChoice) -> (f64, f64) {
    let comp = |a: crate::vec3::Vec3| (axes.j.of(a), axes.l.of(a));
    let [c00, c10, c11, c01] = c.map(comp);
    let eval = |u: f64, v: f64| {
        let f = |k: usize| {
            let g = |p: (f64, f64)| if k == 0 { p.0 } else { p.1 };
            let (a, b, cc, d) = (g(c00), g(c10), g(c11), g(c01));
            let val = a * (1.0 - u) * (1.0 - v) + b * u * (1.0 - v) + cc * u * v + d * (1.0 - u) * v;
            let du = (b - a) * (1.0 - v) + (cc - d) * v;
            let dv = (d - a) * (1.0 - u) + (cc - b) * u;
            (val, du, dv)
        };
        (f(0), f(1))
    };
    let (mut u, mut v) = (0.5, 0.5);
    for _ in 0..30 {
        let ((f0, a, b), (f1, c, d)) = eval(u, v);
        let det = a * d - b * c;
        if det.abs() < 1e-300 {
            return (0.5, 0.5);
        }
        let du = (f0 * d - b * f1) / det;
        let dv = (a * f1 - f0 * c) / det;
        u = (u - du).clamp(0.0, 1.0);
        v = (v - dv).clamp(0.0, 1.0);
        if du.abs() < 1e-14 && dv.abs() < 1e-14 {
            break;
        }
    }
    (u, v)
}

fn sign_of(x: f64) -> i64 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn periodic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// All phase singularities of `(s_l, s_j)` on the grid.
pub fn find_singularities(grid: &SpinTextureGrid, axes: AxisChoice) -> Result<Vec<SingularityRecord>> {
    let (n1, n2) = (grid.n1, grid.n2);
    let singular: Vec<bool> = grid.values.iter().map(|s| is_singular(*s, &axes)).collect();
    let is_sing = |i1: usize, i2: usize| singular[(i1 % n1) * n2 + (i2 % n2)];
    let angle = |i1: usize, i2: usize| full_angle(grid.at(i1, i2), axes.j, axes.l);
    let mut records = Vec::new();

    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let corners = [(i1, i2), (i1 + 1, i2), (i1 + 1, i2 + 1), (i1, i2 + 1)];
            if corners.iter().any(|&(a, b)| is_sing(a, b)) {
                continue;
            }
            let mut total = 0.0;
            for c in 0..4 {
                let (a, b) = corners[c];
                let (p, q) = corners[(c + 1) % 4];
                total += wrap_diff(angle(p, q) - angle(a, b));
            }
            let turns = total / (2.0 * PI);
            let w = turns.round();
            if w == 0.0 || (turns - w).abs() > WINDING_RESIDUAL_TOL {
                continue;
            }
            let vals = corners.map(|(a, b)| grid.at(a, b));
            let (u, v) = bilinear_zero(vals, &axes);
            let si = axes.i.of(vals[0]) * (1.0 - u) * (1.0 - v)
                + axes.i.of(vals[1]) * u * (1.0 - v)
                + axes.i.of(vals[2]) * u * v
                + axes.i.of(vals[3]) * (1.0 - u) * v;
            let k0 = KPoint::new(
                -PI + 2.0 * PI * (i1 as f64 + u) / n1 as f64,
                -PI + 2.0 * PI * (i2 as f64 + v) / n2 as f64,
            );
            records.push(SingularityRecord {
                k0,
                // the corner loop above runs counterclockwise
                winding: -(w as i64),
                weight_sign: sign_of(si),
                axes,
                cell: (i1, i2),
            });
        }
    }

    // Singularities sitting exactly on a node: wind around its 3×3 block.
    const RING: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            if !is_sing(i1, i2) {
                continue;
            }
            let pos = |d: (isize, isize)| {
                (
                    (i1 as isize + d.0).rem_euclid(n1 as isize) as usize,
                    (i2 as isize + d.1).rem_euclid(n2 as isize) as usize,
                )
            };
            if let Some(&d) = RING.iter().find(|&&d| {
                let (a, b) = pos(d);
                is_sing(a, b)
            }) {
                let (a, b) = pos(d);
                return Err(Error::UnresolvedSingularity {
                    a: grid.k(i1, i2),
                    b: grid.k(a, b),
                });
            }
            let mut total = 0.0;
            for c in 0..8 {
                let (a, b) = pos(RING[c]);
                let (p, q) = pos(RING[(c + 1) % 8]);
                total += wrap_diff(angle(p, q) - angle(a, b));
            }
            let w = (total / (2.0 * PI)).round() as i64;
            if w == 0 {
                continue;
            }
            records.push(SingularityRecord {
                k0: grid.k(i1, i2),
                winding: -w,
                weight_sign: sign_of(axes.i.of(grid.at(i1, i2))),
                axes,
                cell: (i1, i2),
            });
        }
    }

    for (x, a) in records.iter().enumerate() {
        for b in &records[x + 1..] {
            if a.winding.signum() == b.winding.signum() {
                continue;
            }
            let d1 = periodic_distance(a.cell.0, b.cell.0, n1);
            let d2 = periodic_distance(a.cell.1, b.cell.1, n2);
            if d1.max(d2) < 2 {
                return Err(Error::UnresolvedSingularity { a: a.k0, b: b.k0 });
            }
        }
    }
    Ok(records)
}

/// Closed path in k-space, stored as its sample points in clockwise order.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub points: Vec<KPoint>,
}

impl ClosedLoop {
    /// Clockwise circle of `radius` around `centre`.
    pub fn circle(centre: KPoint, radius: f64, samples: usize) -> Self {
        let points = (0..samples)
            .map(|s| {
                let t = -2.0 * PI * s as f64 / samples as f64;
                KPoint::new(centre.k1 + radius * t.cos(), centre.k2 + radius * t.sin())
            })
            .collect();
        Self { points }
    }

    /// Clockwise boundary of the rectangle `[lo.k1, hi.k1] × [lo.k2, hi.k2]`
    /// (corners given unwrapped), starting at the lower-left corner.
    pub fn rectangle(lo: (f64, f64), hi: (f64, f64), per_side: usize) -> Self {
        let corners = [(lo.0, lo.1), (lo.0, hi.1), (hi.0, hi.1), (hi.0, lo.1)];
        let mut points = Vec::with_capacity(4 * per_side);
        for c in 0..4 {
            let (a, b) = corners[c];
            let (p, q) = corners[(c + 1) % 4];
            for s in 0..per_side {
                let t = s as f64 / per_side as f64;
                points.push(KPoint::new(a + (p - a) * t, b + (q - b) * t));
            }
        }
        Self { points }
    }

    /// The same path traversed the other way.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }
}

/// Winding angles sampled along `lp`.
pub fn loop_profile<T: Texture + ?Sized>(
    texture: &T,
    lp: &ClosedLoop,
    axes: AxisChoice,
) -> Vec<(KPoint, Vec3, WindingAngle)> {
    lp.points
        .iter()
        .map(|&k| {
            let s = texture.spin(k);
            let full = full_angle(s, axes.j, axes.l);
            (
                k,
                s,
                WindingAngle {
                    theta: super::texture::fold_to_arctan(full),
                    full,
                },
            )
        })
        .collect()
}

/// Winding number of the planar angle along `lp` (clockwise loops give the
/// clockwise winding).
pub fn loop_winding<T: Texture + ?Sized>(texture: &T, lp: &ClosedLoop, axes: AxisChoice) -> Result<i64> {
    let spins: Vec<Vec3> = lp.points.iter().map(|&k| texture.spin(k)).collect();
    winding_of_samples(&lp.points, &spins, axes)
}

/// Winding of the planar angle of `spins`, sampled in order around a closed
/// path through `points`.
pub fn winding_of_samples(points: &[KPoint], spins: &[Vec3], axes: AxisChoice) -> Result<i64> {
    let n = spins.len();
    assert_eq!(points.len(), n);
    if n < 3 {
        return Err(Error::invalid("samples", "a loop needs at least 3 samples"));
    }
    let mut angles = Vec::with_capacity(n);
    for (&k, &s) in points.iter().zip(spins) {
        if is_singular(s, &axes) {
            return Err(Error::SingularPoint { k: Some(k) });
        }
        angles.push(full_angle(s, axes.j, axes.l));
    }
    let mut total = 0.0;
    for idx in 0..n {
        let d = wrap_diff(angles[(idx + 1) % n] - angles[idx]);
        if d.abs() > FRAC_PI_2 {
            return Err(Error::AmbiguousUnwrap { index: idx, jump: d });
        }
        total += d;
    }
    let turns = total / (2.0 * PI);
    let w = turns.round();
    debug_assert!((turns - w).abs() < WINDING_RESIDUAL_TOL);
    Ok(w as i64)
}

/// `C = ½ Σ sgn(s_i) w`, with the axis-permutation parity applied.
pub fn chern_from_singularities(records: &[SingularityRecord]) -> Result<i64> {
    if let Some(first) = records.first() {
        if records.iter().any(|r| r.axes != first.axes) {
            return Err(Error::invalid("singularities", "records mix axis choices"));
        }
    }
    let sum: i64 = records
        .iter()
        .map(|r| r.axes.parity() * r.weight_sign * r.winding)
        .sum();
    if sum % 2 != 0 {
        return Err(Error::OddSum { sum });
    }
    Ok(sum / 2)
}

#[derive(Debug, Clone)]
pub struct SingularityChern {
    pub chern: i64,
    pub grid_n: usize,
    pub refinements: usize,
    pub singularities: Vec<SingularityRecord>,
}

/// Runs the singularity count on the grid, doubling the grid up to `max_n`
/// whenever nearby opposite singularities are not resolved.
pub fn chern_from_texture_refined<F>(mut n: usize, max_n: usize, axes: AxisChoice, make: F) -> Result<SingularityChern>
where
    F: Fn(usize) -> Result<SpinTextureGrid>,
{
    let mut refinements = 0;
    loop {
        let grid = make(n)?;
        match find_singularities(&grid, axes) {
            Ok(singularities) => {
                let chern = chern_from_singularities(&singularities)?;
                return Ok(SingularityChern {
                    chern,
                    grid_n: n,
                    refinements,
                    singularities,
                });
            }
            Err(Error::UnresolvedSingularity { .. }) if 2 * n <= max_n => {
                n *= 2;
                refinements += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Static-winding-angle Chern number of `band`.
pub fn chern_swa(
    qp: &QuenchProtocol,
    band: Band,
    axes: AxisChoice,
    grid_n: usize,
    max_n: usize,
) -> Result<SingularityChern> {
    chern_from_texture_refined(grid_n, max_n, axes, |n| {
        let grid = SpinTextureGrid::for_band(qp, band, n, crate::floquet::DEFAULT_DEGENERACY_TOL);
        if !grid.degenerate_points.is_empty() {
            return Err(Error::DegenerateGrid {
                points: grid.degenerate_kpoints(),
            });
        }
        Ok(grid)
    })
}
