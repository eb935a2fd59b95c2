//! Qubit control layer: rotating-frame pulses that prepare Floquet eigenstates
//! or realize one driving period, projective readout and calibration.

mod calibration;
mod readout;

pub use calibration::{parse_calibration, rabi_fit, RabiCalibration, RabiFit, LOW_AMPLITUDE_EDGE};
pub use readout::{normalize_readout, synthesize_readout, NormalizedReadout, ReadoutRecord};

use crate::error::{Error, Result};
use crate::floquet::EffectiveBloch;
use crate::model::{stage_fields, KPoint, QuenchProtocol};
use crate::su2::{compose, su2_exp, SU2Op, Spinor};
use crate::topology::texture::Axis;
use crate::vec3::{BlochVector3, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_4, PI};

/// In-plane field magnitude below which a stage is driven by detuning alone.
pub const PLANAR_TOL: f64 = 1e-9;
/// Default bound on `|δ|` used to pick the Rabi frequency.
pub const DEFAULT_DETUNING_CAP: f64 = 40.0;
/// Default upper bound on the Rabi frequency.
pub const DEFAULT_MAX_RABI: f64 = 20.0;

/// One microwave pulse in the frame rotating at the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSegment {
    /// Rabi angular frequency `ω₁ ≥ 0`.
    pub rabi: f64,
    /// Initial microwave phase.
    pub phase: f64,
    /// `δ = ω₀ − ω₂`.
    pub detuning: f64,
    pub duration: f64,
}

impl PulseSegment {
    pub fn new(rabi: f64, phase: f64, detuning: f64, duration: f64) -> Result<Self> {
        if !(rabi >= 0.0 && rabi.is_finite()) {
            return Err(Error::invalid("rabi", "must be finite and non-negative"));
        }
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::invalid("duration", "must be finite and non-negative"));
        }
        if !phase.is_finite() || !detuning.is_finite() {
            return Err(Error::invalid("pulse", "phase and detuning must be finite"));
        }
        Ok(Self {
            rabi,
            phase,
            detuning,
            duration,
        })
    }

    /// `exp(−i τ H)` for this segment.
    pub fn operator(&self) -> SU2Op {
        su2_exp(rotating_hamiltonian(self) * self.duration)
    }
}

/// `((ω₁/2) cos φ, (ω₁/2) sin φ, δ/2)`.
pub fn rotating_hamiltonian(seg: &PulseSegment) -> BlochVector3 {
    let half = seg.rabi / 2.0;
    Vec3::new(half * seg.phase.cos(), half * seg.phase.sin(), seg.detuning / 2.0)
}

/// Resonant pulse taking `|0⟩` to the eigenstate of `d·σ` with Bloch vector
/// `+d̂`.
pub fn prep_pulse(d: &EffectiveBloch, rabi: f64) -> Result<PulseSegment> {
    if !(rabi > 0.0 && rabi.is_finite()) {
        return Err(Error::invalid("rabi", "must be positive"));
    }
    let n = d.unit().ok_or(Error::ZeroField)?;
    let phase = n.y.atan2(n.x) + PI / 2.0;
    let duration = n.z.clamp(-1.0, 1.0).acos() / rabi;
    PulseSegment::new(rabi, phase, 0.0, duration)
}

/// Segment whose phase area `H τ` equals `h T` exactly.
fn stage_pulse(h: Vec3, duration: f64, rabi: f64) -> Result<PulseSegment> {
    let rho = h.x.hypot(h.y);
    if rho < PLANAR_TOL {
        let sign = if h.z < 0.0 { -1.0 } else { 1.0 };
        return PulseSegment::new(0.0, 0.0, rabi * sign, 2.0 * h.z.abs() * duration / rabi);
    }
    PulseSegment::new(rabi, h.y.atan2(h.x), rabi * h.z / rho, 2.0 * rho * duration / rabi)
}

/// Two detuned segments realizing one driving period at `k`.
pub fn floquet_drive_pulses(qp: &QuenchProtocol, k: KPoint, rabi: f64) -> Result<(PulseSegment, PulseSegment)> {
    if !(rabi > 0.0 && rabi.is_finite()) {
        return Err(Error::invalid("rabi", "must be positive"));
    }
    let (h1, h2) = stage_fields(qp, k);
    Ok((
        stage_pulse(h1, qp.duration1, rabi)?,
        stage_pulse(h2, qp.duration2, rabi)?,
    ))
}

/// Largest Rabi frequency, up to `max_rabi`, for which both drive segments at
/// `k` keep `|δ| ≤ detuning_cap`. Larger `ω₁` means shorter pulses.
pub fn default_rabi(qp: &QuenchProtocol, k: KPoint, detuning_cap: f64, max_rabi: f64) -> f64 {
    let (h1, h2) = stage_fields(qp, k);
    [h1, h2].iter().fold(max_rabi, |best, h| {
        let rho = h.x.hypot(h.y);
        let limit = if rho < PLANAR_TOL {
            detuning_cap
        } else if h.z == 0.0 {
            f64::INFINITY
        } else {
            detuning_cap * rho / h.z.abs()
        };
        best.min(limit)
    })
}

/// Product of the segment operators, first segment acting first.
pub fn sequence_operator(segments: &[PulseSegment]) -> SU2Op {
    segments
        .iter()
        .fold(SU2Op::IDENTITY, |acc, seg| compose(&seg.operator(), &acc))
}

pub fn simulate_sequence(segments: &[PulseSegment], state0: Spinor) -> Spinor {
    segments.iter().fold(state0, |psi, seg| seg.operator().apply(psi))
}

/// Applies the whole sequence `repeats` times, one segment at a time.
pub fn simulate_repeated(segments: &[PulseSegment], state0: Spinor, repeats: usize) -> Spinor {
    let ops: Vec<SU2Op> = segments.iter().map(PulseSegment::operator).collect();
    let mut psi = state0;
    for _ in 0..repeats {
        for op in &ops {
            psi = op.apply(psi);
        }
    }
    psi
}

/// Readout rotation mapping `σ_axis` onto `σ_z`: `π/2` about `−y` for x,
/// `π/2` about `+x` for y, nothing for z.
pub fn readout_rotation(axis: Axis) -> SU2Op {
    match axis {
        Axis::X => su2_exp(Vec3::new(0.0, -FRAC_PI_4, 0.0)),
        Axis::Y => su2_exp(Vec3::new(FRAC_PI_4, 0.0, 0.0)),
        Axis::Z => SU2Op::IDENTITY,
    }
}

/// Noise-free `⟨σ_axis⟩` measured through the readout rotation.
pub fn measure_axis(state: &Spinor, axis: Axis) -> f64 {
    readout_rotation(axis).apply(*state).expectation().z
}

/// `⟨σ_axis⟩` estimated from `shots` projective outcomes.
pub fn measure_axis_sampled<R: Rng>(state: &Spinor, axis: Axis, shots: usize, rng: &mut R) -> f64 {
    assert!(shots > 0, "need at least one shot");
    let p_up = ((1.0 + measure_axis(state, axis)) / 2.0).clamp(0.0, 1.0);
    let ups = (0..shots).filter(|_| rng.gen_bool(p_up)).count();
    (2.0 * ups as f64 - shots as f64) / shots as f64
}

/// Seeded variant of [`measure_axis_sampled`].
pub fn measure_axis_shots(state: &Spinor, axis: Axis, shots: usize, seed: u64) -> f64 {
    measure_axis_sampled(state, axis, shots, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` from the three readout settings.
pub fn measure_triple(state: &Spinor) -> Vec3 {
    Vec3::new(
        measure_axis(state, Axis::X),
        measure_axis(state, Axis::Y),
        measure_axis(state, Axis::Z),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{eigenstate, floquet_operator, Band};

    #[test]
    fn rotating_hamiltonian_examples() {
        let h = rotating_hamiltonian(&PulseSegment::new(0.0, 0.3, 1.4, 1.0).unwrap());
        assert_eq!(h, Vec3::new(0.0, 0.0, 0.7));
        let h = rotating_hamiltonian(&PulseSegment::new(2.0, 0.0, 0.0, 1.0).unwrap());
        assert_eq!(h, Vec3::new(1.0, 0.0, 0.0));
        let h = rotating_hamiltonian(&PulseSegment::new(2.0, PI / 2.0, 0.0, 1.0).unwrap());
        assert!(h.max_abs_diff(Vec3::new(0.0, 1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn prep_pulse_examples() {
        let p = prep_pulse(&EffectiveBloch::new(Vec3::new(0.0, 0.0, 1.0)), 3.0).unwrap();
        assert_eq!(p.duration, 0.0);
        let p = prep_pulse(&EffectiveBloch::new(Vec3::new(1.0, 0.0, 0.0)), 3.0).unwrap();
        assert!((p.phase - PI / 2.0).abs() < 1e-15);
        assert!((p.duration - PI / 6.0).abs() < 1e-15);
        let psi = simulate_sequence(&[p], Spinor::zero());
        assert!(psi.expectation().max_abs_diff(Vec3::new(1.0, 0.0, 0.0)) < 1e-15);
        assert!(matches!(
            prep_pulse(&EffectiveBloch::new(Vec3::ZERO), 1.0),
            Err(Error::ZeroField)
        ));
    }

    #[test]
    fn prep_then_inverse_returns_ground_state() {
        let d = EffectiveBloch::new(Vec3::new(-0.3, 0.8, -0.4));
        let p = prep_pulse(&d, 2.5).unwrap();
        let back = PulseSegment {
            phase: p.phase + PI,
            ..p
        };
        let psi = simulate_sequence(&[p, back], Spinor::zero());
        assert!((psi.c0.norm() - 1.0).abs() < 1e-12);
        assert!(psi.c1.norm() < 1e-12);
        let target = eigenstate(&d, Band::Upper).unwrap();
        assert!(1.0 - simulate_sequence(&[p], Spinor::zero()).inner(&target).norm_sqr() < 1e-12);
    }

    #[test]
    fn collinear_drive_is_resonant() {
        let qp = QuenchProtocol::standard(0.4, 0.7).unwrap();
        let (a, b) = floquet_drive_pulses(&qp, KPoint::new(0.0, 0.0), 2.0).unwrap();
        assert_eq!((a.phase, a.detuning, b.phase, b.detuning), (0.0, 0.0, 0.0, 0.0));
        assert!((a.duration - 2.0 * 5.25 * 0.4 / 2.0).abs() < 1e-14);
        let u = sequence_operator(&[a, b]);
        assert!(1.0 - u.fidelity(&floquet_operator(&qp, KPoint::new(0.0, 0.0))) < 1e-14);
    }

    #[test]
    fn pure_detuning_stage() {
        let seg = stage_pulse(Vec3::new(0.0, 0.0, -0.6), 1.5, 3.0).unwrap();
        assert_eq!(seg.rabi, 0.0);
        assert_eq!(seg.detuning, -3.0);
        let area = rotating_hamiltonian(&seg) * seg.duration;
        assert!(area.max_abs_diff(Vec3::new(0.0, 0.0, -0.9)) < 1e-15);
    }

    #[test]
    fn default_rabi_respects_cap() {
        let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
        let k = KPoint::new(0.4, -1.1);
        let w = default_rabi(&qp, k, 10.0, 1e6);
        let (a, b) = floquet_drive_pulses(&qp, k, w).unwrap();
        assert!(a.detuning.abs() <= 10.0 + 1e-9 && b.detuning.abs() <= 10.0 + 1e-9);
        assert!((a.detuning.abs() - 10.0).abs() < 1e-9 || (b.detuning.abs() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn measure_examples() {
        let plus_x = Spinor::from_bloch(Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((measure_axis(&plus_x, Axis::X) - 1.0).abs() < 1e-15);
        assert!(measure_axis(&plus_x, Axis::Z).abs() < 1e-15);
        let t = measure_triple(&Spinor::zero());
        assert!(t.max_abs_diff(Vec3::new(0.0, 0.0, 1.0)) < 1e-15);
        let plus_y = Spinor::from_bloch(Vec3::new(0.0, 1.0, 0.0)).unwrap();
        assert!((measure_axis(&plus_y, Axis::Y) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shots_are_seeded() {
        let psi = Spinor::from_bloch(Vec3::new(0.6, 0.0, 0.8)).unwrap();
        let a = measure_axis_shots(&psi, Axis::X, 1000, 5);
        assert_eq!(a, measure_axis_shots(&psi, Axis::X, 1000, 5));
        assert!((a - 0.6).abs() < 3.0 / 1000f64.sqrt());
    }
}
