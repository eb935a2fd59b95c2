//! Band-touching conditions of the two-stage quench.
//!
//! The gap can only close where the two stage fields are collinear and the
//! accumulated phases `|h₁|T₁ ± |h₂|T₂` (sign matching the collinearity) hit a
//! multiple of π. The case of two non-collinear stages that are each a full
//! multiple of π (so `U = ±1` trivially) is not covered by these conditions
//! and is not reported as touching.

use crate::model::{stage_fields, KPoint, QuenchProtocol};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TouchingReport {
    /// `+1` for parallel, `−1` for antiparallel stage fields, `None` otherwise.
    pub parallel: Option<i8>,
    /// Angle between the two stage fields.
    pub angle: f64,
    /// `|h₁|T₁ ± |h₂|T₂` reduced to `[0, π)`; uses `+` when not collinear.
    pub phase_sum_mod_pi: f64,
    /// Distance of the phase sum to the nearest multiple of π.
    pub residual: f64,
    /// Nearest integer to the phase sum divided by π.
    pub n: i64,
    pub touches: bool,
}

pub fn band_touching_check(qp: &QuenchProtocol, k: KPoint, tol: f64) -> TouchingReport {
    let (h1, h2) = stage_fields(qp, k);
    let (m1, m2) = (h1.norm(), h2.norm());
    let angle = if m1 == 0.0 || m2 == 0.0 {
        0.0
    } else {
        h1.cross(h2).norm().atan2(h1.dot(h2))
    };
    let parallel = if angle < tol {
        Some(1)
    } else if PI - angle < tol {
        Some(-1)
    } else {
        None
    };
    let sign = parallel.unwrap_or(1) as f64;
    let sum = m1 * qp.duration1 + sign * m2 * qp.duration2;
    let n = (sum / PI).round();
    let residual = (sum - n * PI).abs();
    TouchingReport {
        parallel,
        angle,
        phase_sum_mod_pi: sum.rem_euclid(PI),
        residual,
        n: n as i64,
        touches: parallel.is_some() && residual < tol,
    }
}
