//! Floquet operator of the two-stage quench, quasienergies, the effective
//! Bloch vector and Floquet eigenstates.
//!
//! The effective Hamiltonian is kept as `d = E₊ r̂` (that is `𝓗·T`): every
//! downstream quantity depends on `d` only through its direction or through
//! ratios, so the overall `1/T` is never carried around.

use crate::error::{Error, Result};
use crate::model::{stage_fields, KPoint, QuenchProtocol};
use crate::su2::{compose, su2_exp, SU2Op, Spinor};
use crate::vec3::{BlochVector3, Vec3};
use num_complex::Complex64;

/// Default threshold on `|sin E₊|` below which the gap is treated as closed.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// One of the two Floquet bands.
///
/// `Upper` has quasienergy `E₊ ∈ (0, π)` and Bloch vector `+d̂`; `Lower` has
/// `E₋ = −E₊` and Bloch vector `−d̂`. The lower band is the one filled in all
/// Chern-number computations unless stated otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Upper,
    Lower,
}

impl Band {
    pub const FILLED: Band = Band::Lower;

    /// `+1` for the upper band, `−1` for the lower one.
    pub fn sign(self) -> f64 {
        match self {
            Band::Upper => 1.0,
            Band::Lower => -1.0,
        }
    }

    pub fn opposite(self) -> Band {
        match self {
            Band::Upper => Band::Lower,
            Band::Lower => Band::Upper,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Band::Upper => "upper",
            Band::Lower => "lower",
        }
    }
}

impl std::str::FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "upper" | "plus" | "+" => Ok(Band::Upper),
            "lower" | "minus" | "-" | "filled" => Ok(Band::Lower),
            other => Err(Error::invalid("band", format!("expected upper|lower, got {other:?}"))),
        }
    }
}

/// `U(k) = exp(−i T₂ h₂·σ) exp(−i T₁ h₁·σ)`.
pub fn floquet_operator(qp: &QuenchProtocol, k: KPoint) -> SU2Op {
    let (h1, h2) = stage_fields(qp, k);
    compose(&su2_exp(h2 * qp.duration2), &su2_exp(h1 * qp.duration1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasienergyInfo {
    /// Upper quasienergy in `[0, π]`.
    pub e_plus: f64,
    /// Rotation axis of `U`; meaningless when `degenerate`.
    pub r_hat: Vec3,
    pub degenerate: bool,
}

impl QuasienergyInfo {
    pub fn e_minus(&self) -> f64 {
        -self.e_plus
    }

    pub fn gap_to_zero(&self) -> f64 {
        self.e_plus
    }

    pub fn gap_to_pi(&self) -> f64 {
        std::f64::consts::PI - self.e_plus
    }
}

pub fn quasienergy(u: &SU2Op) -> QuasienergyInfo {
    quasienergy_with_tol(u, DEFAULT_DEGENERACY_TOL)
}

/// `E₊ = arccos(a0)`, evaluated as `atan2(|a|, a0)` so that it stays
/// accurate close to 0 and π.
pub fn quasienergy_with_tol(u: &SU2Op, tol: f64) -> QuasienergyInfo {
    let s = u.a.norm();
    let e_plus = s.atan2(u.a0);
    let degenerate = e_plus.sin().abs() < tol;
    let r_hat = if s > 0.0 { u.a * (1.0 / s) } else { Vec3::ZERO };
    QuasienergyInfo {
        e_plus,
        r_hat,
        degenerate,
    }
}

/// Effective Bloch vector `d` with `|d| = E₊`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveBloch {
    pub d: BlochVector3,
}

impl EffectiveBloch {
    pub fn new(d: BlochVector3) -> Self {
        Self { d }
    }

    pub fn e_plus(&self) -> f64 {
        self.d.norm()
    }

    pub fn unit(&self) -> Option<Vec3> {
        self.d.normalized()
    }

    /// Bloch vector of the eigenstate in `band`.
    pub fn band_vector(&self, band: Band) -> Option<Vec3> {
        self.unit().map(|n| n * band.sign())
    }
}

pub fn effective_bloch(u: &SU2Op) -> Result<EffectiveBloch> {
    effective_bloch_with_tol(u, DEFAULT_DEGENERACY_TOL, None)
}

pub fn effective_bloch_with_tol(u: &SU2Op, tol: f64, k: Option<KPoint>) -> Result<EffectiveBloch> {
    let q = quasienergy_with_tol(u, tol);
    if q.degenerate {
        return Err(Error::DegeneratePoint { k });
    }
    Ok(EffectiveBloch::new(q.r_hat * q.e_plus))
}

/// Effective Bloch vector of `qp` at `k`, with the grid point attached to any
/// degeneracy error.
pub fn effective_bloch_at(qp: &QuenchProtocol, k: KPoint, tol: f64) -> Result<EffectiveBloch> {
    effective_bloch_with_tol(&floquet_operator(qp, k), tol, Some(k))
}

/// Normalized Floquet eigenstates `(|u₊⟩, |u₋⟩)` with Bloch vectors `±d̂`.
pub fn eigenstates(d: &EffectiveBloch) -> Result<(Spinor, Spinor)> {
    let n = d.unit().ok_or(Error::DegeneratePoint { k: None })?;
    let plus = Spinor::from_bloch(n).expect("unit vector");
    let minus = Spinor::from_bloch(-n).expect("unit vector");
    Ok((plus, minus))
}

pub fn eigenstate(d: &EffectiveBloch, band: Band) -> Result<Spinor> {
    let (p, m) = eigenstates(d)?;
    Ok(match band {
        Band::Upper => p,
        Band::Lower => m,
    })
}

/// Amplitudes of a state in the Floquet eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDecomposition {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl StateDecomposition {
    pub fn new(c_plus: Complex64, c_minus: Complex64) -> Self {
        Self { c_plus, c_minus }
    }

    pub fn of(state: &Spinor, d: &EffectiveBloch) -> Result<Self> {
        let (p, m) = eigenstates(d)?;
        Ok(Self::new(p.inner(state), m.inner(state)))
    }

    /// `|c₊|² − |c₋|²`.
    pub fn weight_gap(&self) -> f64 {
        self.c_plus.norm_sqr() - self.c_minus.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    pub fn to_state(&self, d: &EffectiveBloch) -> Result<Spinor> {
        let (p, m) = eigenstates(d)?;
        Ok(Spinor::new(
            p.c0 * self.c_plus + m.c0 * self.c_minus,
            p.c1 * self.c_plus + m.c1 * self.c_minus,
        ))
    }
}

/// Secular spin texture `(|c₊|² − |c₋|²) d_j / E₊`.
pub fn spin_expectation(dec: &StateDecomposition, d: &EffectiveBloch) -> BlochVector3 {
    match d.unit() {
        Some(n) => n * dec.weight_gap(),
        None => Vec3::ZERO,
    }
}

/// `⟨ψ|σ|ψ⟩` including the off-diagonal terms.
pub fn spin_expectation_of_state(psi: &Spinor) -> BlochVector3 {
    psi.expectation()
}
