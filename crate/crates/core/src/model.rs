//! Generalized Haldane model Bloch vector and the two-stage quench protocol.
//!
//! The Brillouin zone is the square torus `(k1, k2) ∈ [-π, π)²`. All model
//! functions are 2π-periodic in each component.

use crate::error::{Error, Result};
use crate::vec3::BlochVector3;
use std::f64::consts::PI;

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut r = x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor();
    if r >= PI {
        r -= 2.0 * PI;
    }
    if r < -PI {
        r += 2.0 * PI;
    }
    r
}

/// Hopping amplitudes and second-neighbor phase of one Hamiltonian stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    /// Second-neighbor phase, normalized into `[-π, π)`.
    pub phi: f64,
}

impl HamiltonianParams {
    pub fn new(t1: f64, t2: f64, t3: f64, phi: f64) -> Self {
        Self {
            t1,
            t2,
            t3,
            phi: wrap_angle(phi),
        }
    }
}

/// Quasimomentum on the Brillouin-zone torus, stored as its canonical
/// representative in `[-π, π)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPoint {
    pub k1: f64,
    pub k2: f64,
}

impl KPoint {
    pub fn new(k1: f64, k2: f64) -> Self {
        Self {
            k1: wrap_angle(k1),
            k2: wrap_angle(k2),
        }
    }

    /// Node `(i1, i2)` of the uniform `n1 × n2` grid starting at `(-π, -π)`.
    pub fn on_grid(i1: usize, i2: usize, n1: usize, n2: usize) -> Self {
        let node = |i: usize, n: usize| PI * (2.0 * i as f64 - n as f64) / n as f64;
        Self::new(node(i1, n1), node(i2, n2))
    }
}

/// Bloch vector `h(k)` of the generalized Haldane model.
pub fn bloch_vector(p: &HamiltonianParams, k: KPoint) -> BlochVector3 {
    let (k1, k2) = (k.k1, k.k2);
    let hx = p.t1 * (1.0 + k1.cos() + k2.cos()) + p.t3 * (2.0 * (k1 - k2).cos() + (k1 + k2).cos());
    let hy = p.t1 * (k1.sin() + k2.sin()) + p.t3 * (k1 + k2).sin();
    let hz = 2.0 * p.t2 * p.phi.sin() * (k1.sin() - k2.sin() - (k1 - k2).sin());
    BlochVector3::new(hx, hy, hz)
}

/// One driving period: `stage1` for `duration1`, then `stage2` for `duration2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchProtocol {
    pub stage1: HamiltonianParams,
    pub duration1: f64,
    pub stage2: HamiltonianParams,
    pub duration2: f64,
}

impl QuenchProtocol {
    /// Durations must be finite and non-negative; zero durations give the
    /// identity stage.
    pub fn new(stage1: HamiltonianParams, duration1: f64, stage2: HamiltonianParams, duration2: f64) -> Result<Self> {
        for (name, t) in [("T1", duration1), ("T2", duration2)] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::invalid(
                    name,
                    format!("duration must be finite and >= 0, got {t}"),
                ));
            }
        }
        Ok(Self {
            stage1,
            duration1,
            stage2,
            duration2,
        })
    }

    /// The standard preset quench with stage durations `(duration1, duration2)`.
    pub fn standard(duration1: f64, duration2: f64) -> Result<Self> {
        ModelPreset::STANDARD.protocol(duration1, duration2)
    }

    pub fn period(&self) -> f64 {
        self.duration1 + self.duration2
    }

    pub fn with_durations(&self, duration1: f64, duration2: f64) -> Result<Self> {
        Self::new(self.stage1, duration1, self.stage2, duration2)
    }
}

/// `(h1(k), h2(k))` for the two stages of `qp`.
pub fn stage_fields(qp: &QuenchProtocol, k: KPoint) -> (BlochVector3, BlochVector3) {
    (bloch_vector(&qp.stage1, k), bloch_vector(&qp.stage2, k))
}

/// Model parameters with `t1`, `t2` shared by both stages and `(t3, φ)` quenched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPreset {
    pub t1: f64,
    pub t2: f64,
    pub t3_a: f64,
    pub phi_a: f64,
    pub t3_b: f64,
    pub phi_b: f64,
}

impl ModelPreset {
    pub const STANDARD: ModelPreset = ModelPreset {
        t1: 1.0,
        t2: 0.8,
        t3_a: 0.75,
        phi_a: -PI / 6.0,
        t3_b: -0.75,
        phi_b: -PI / 2.0,
    };

    pub fn stage1(&self) -> HamiltonianParams {
        HamiltonianParams::new(self.t1, self.t2, self.t3_a, self.phi_a)
    }

    pub fn stage2(&self) -> HamiltonianParams {
        HamiltonianParams::new(self.t1, self.t2, self.t3_b, self.phi_b)
    }

    pub fn protocol(&self, duration1: f64, duration2: f64) -> Result<QuenchProtocol> {
        QuenchProtocol::new(self.stage1(), duration1, self.stage2(), duration2)
    }
}

impl Default for ModelPreset {
    fn default() -> Self {
        Self::STANDARD
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: BlochVector3, b: BlochVector3, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn gamma_point_values() {
        let k = KPoint::new(0.0, 0.0);
        let h1 = bloch_vector(&ModelPreset::STANDARD.stage1(), k);
        assert!(close(h1, BlochVector3::new(5.25, 0.0, 0.0), 1e-14));
        let h2 = bloch_vector(&ModelPreset::STANDARD.stage2(), k);
        assert!(close(h2, BlochVector3::new(0.75, 0.0, 0.0), 1e-14));
    }

    #[test]
    fn corner_point_value() {
        let h = bloch_vector(&ModelPreset::STANDARD.stage1(), KPoint::new(PI, PI));
        assert!(close(h, BlochVector3::new(1.25, 0.0, 0.0), 1e-13));
    }

    #[test]
    fn stage_fields_pair() {
        let qp = QuenchProtocol::standard(0.3, 0.3).unwrap();
        let (a, b) = stage_fields(&qp, KPoint::new(0.0, 0.0));
        assert!(close(a, BlochVector3::new(5.25, 0.0, 0.0), 1e-14));
        assert!(close(b, BlochVector3::new(0.75, 0.0, 0.0), 1e-14));

        let same = QuenchProtocol::new(qp.stage1, 0.4, qp.stage1, 0.7).unwrap();
        let (a, b) = stage_fields(&same, KPoint::new(0.4, -1.3));
        assert_eq!(a, b);
    }

    #[test]
    fn stage_fields_at_quarter_point() {
        // k = (π/2, -π/2): cos k1 = cos k2 = 0, sin k1 = 1, sin k2 = -1,
        // cos(k1-k2) = cos π = -1, cos(k1+k2) = 1, sin(k1+k2) = 0, sin(k1-k2) = 0.
        // h_x = t1 + t3 (-2 + 1) = t1 - t3, h_y = 0, h_z = 2 t2 sin φ (1 + 1 - 0) = 4 t2 sin φ.
        let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
        let (a, b) = stage_fields(&qp, KPoint::new(PI / 2.0, -PI / 2.0));
        let expect_a = BlochVector3::new(1.0 - 0.75, 0.0, 4.0 * 0.8 * (-PI / 6.0).sin());
        let expect_b = BlochVector3::new(1.0 + 0.75, 0.0, 4.0 * 0.8 * (-PI / 2.0).sin());
        assert!(close(a, expect_a, 1e-13), "{a:?}");
        assert!(close(b, expect_b, 1e-13), "{b:?}");
        assert!((expect_a.z + 1.6).abs() < 1e-14);
        assert!((expect_b.z + 3.2).abs() < 1e-14);
    }

    #[test]
    fn phi_is_normalized() {
        let p = HamiltonianParams::new(1.0, 1.0, 0.0, PI);
        assert!((p.phi + PI).abs() < 1e-15);
        let p = HamiltonianParams::new(1.0, 1.0, 0.0, 7.0);
        assert!((p.phi - (7.0 - 2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn negative_duration_rejected() {
        assert!(QuenchProtocol::standard(-1.0, 0.3).is_err());
        assert!(QuenchProtocol::standard(0.3, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn periodic_in_both_momenta(
            k1 in -PI..PI, k2 in -PI..PI, m in -3i32..4, n in -3i32..4,
            t3 in -1.0f64..1.0, phi in -PI..PI,
        ) {
            let p = HamiltonianParams::new(1.0, 0.8, t3, phi);
            let a = bloch_vector(&p, KPoint::new(k1, k2));
            let b = bloch_vector(&p, KPoint::new(k1 + 2.0 * PI * m as f64, k2 + 2.0 * PI * n as f64));
            prop_assert!(close(a, b, 1e-12));
        }

        #[test]
        fn hz_vanishes_without_time_reversal_breaking(k1 in -PI..PI, k2 in -PI..PI, t3 in -1.0f64..1.0) {
            for p in [
                HamiltonianParams::new(1.0, 0.0, t3, -0.7),
                HamiltonianParams::new(1.0, 0.8, t3, 0.0),
                HamiltonianParams::new(1.0, 0.8, t3, -PI),
            ] {
                prop_assert!(bloch_vector(&p, KPoint::new(k1, k2)).z.abs() < 1e-12);
            }
        }

        #[test]
        fn parity_under_k_inversion(k1 in -PI..PI, k2 in -PI..PI, t3 in -1.0f64..1.0, phi in -PI..PI) {
            let p = HamiltonianParams::new(1.0, 0.8, t3, phi);
            let a = bloch_vector(&p, KPoint::new(k1, k2));
            let b = bloch_vector(&p, KPoint::new(-k1, -k2));
            prop_assert!((a.x - b.x).abs() < 1e-12);
            prop_assert!((a.y + b.y).abs() < 1e-12);
        }
    }
}
