//! SU(2) evolution operators as real unit quaternions, and two-component
//! spinors they act on.
//!
//! `SU2Op { a0, a }` stands for `a0·1 − i a·σ`. Composition is the quaternion
//! product, so unitarity reduces to `a0² + |a|² = 1`.

use crate::vec3::Vec3;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Op {
    pub a0: f64,
    pub a: Vec3,
}

impl SU2Op {
    pub const IDENTITY: SU2Op = SU2Op { a0: 1.0, a: Vec3::ZERO };

    /// Builds `a0·1 − i a·σ` and renormalizes onto the unit sphere.
    pub fn new(a0: f64, a: Vec3) -> Self {
        SU2Op { a0, a }.renormalized()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a0 * self.a0 + self.a.dot(self.a)
    }

    /// Deviation of `a0² + |a|²` from one.
    pub fn unitarity_defect(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    fn renormalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return SU2Op::IDENTITY;
        }
        SU2Op {
            a0: self.a0 / n,
            a: self.a * (1.0 / n),
        }
    }

    /// Hermitian conjugate, which is also the inverse.
    pub fn inverse(&self) -> Self {
        SU2Op {
            a0: self.a0,
            a: -self.a,
        }
    }

    /// Four-dimensional inner product; equals `Re tr(U†V) / 2`.
    pub fn overlap(&self, other: &SU2Op) -> f64 {
        self.a0 * other.a0 + self.a.dot(other.a)
    }

    /// `|tr(U†V)|² / 4`: one when the operators agree up to a global phase.
    pub fn fidelity(&self, other: &SU2Op) -> f64 {
        let o = self.overlap(other);
        o * o
    }

    pub fn apply(&self, psi: Spinor) -> Spinor {
        let i = Complex64::i();
        let (a0, a) = (self.a0, self.a);
        let m00 = Complex64::new(a0, -a.z);
        let m01 = -i * a.x - a.y;
        let m10 = -i * a.x + a.y;
        let m11 = Complex64::new(a0, a.z);
        Spinor::new(m00 * psi.c0 + m01 * psi.c1, m10 * psi.c0 + m11 * psi.c1)
    }

    /// `self` applied `n` times, by repeated squaring.
    pub fn pow(&self, mut n: u64) -> SU2Op {
        let mut base = *self;
        let mut acc = SU2Op::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = compose(&base, &acc);
            }
            base = compose(&base, &base);
            n >>= 1;
        }
        acc
    }
}

/// `exp(−i hT·σ) = cos|hT| − i sin|hT| ĥ·σ`.
pub fn su2_exp(ht: Vec3) -> SU2Op {
    let theta = ht.norm();
    if theta == 0.0 {
        return SU2Op::IDENTITY;
    }
    let s = theta.sin() / theta;
    SU2Op {
        a0: theta.cos(),
        a: ht * s,
    }
}

/// The product `second · first` (first acts first in time).
///
/// `(b0 − i b·σ)(a0 − i a·σ) = (b0a0 − b·a) − i(b0 a + a0 b + b × a)·σ`,
/// which carries the `cos α = ĥ1·ĥ2` and `ĥ1 × ĥ2` terms of the two-stage
/// expansion.
pub fn compose(second: &SU2Op, first: &SU2Op) -> SU2Op {
    let (b0, b) = (second.a0, second.a);
    let (a0, a) = (first.a0, first.a);
    SU2Op {
        a0: b0 * a0 - b.dot(a),
        a: a * b0 + b * a0 + b.cross(a),
    }
    .renormalized()
}

/// A two-component state `c0|0⟩ + c1|1⟩`; `|0⟩` is the σ_z = +1 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl Spinor {
    pub fn new(c0: Complex64, c1: Complex64) -> Self {
        Self { c0, c1 }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// The pure state with Bloch vector along `n`, with the first amplitude
    /// real and non-negative; `−ẑ` maps to `|1⟩`.
    pub fn from_bloch(n: Vec3) -> Option<Self> {
        let n = n.normalized()?;
        let nz = n.z.clamp(-1.0, 1.0);
        let up = ((1.0 + nz) / 2.0).sqrt();
        let down = ((1.0 - nz) / 2.0).sqrt();
        let rho = n.x.hypot(n.y);
        let phase = if rho > 0.0 {
            Complex64::new(n.x / rho, n.y / rho)
        } else {
            Complex64::new(1.0, 0.0)
        };
        Some(Self::new(Complex64::new(up, 0.0), phase * down))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        (n > 0.0).then(|| Self::new(self.c0 / n, self.c1 / n))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.c0.conj() * other.c0 + self.c1.conj() * other.c1
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::new(self.c0 * s, self.c1 * s)
    }

    /// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` for this state.
    pub fn expectation(&self) -> Vec3 {
        let off = self.c0.conj() * self.c1;
        Vec3::new(2.0 * off.re, 2.0 * off.im, self.c0.norm_sqr() - self.c1.norm_sqr())
    }
}
