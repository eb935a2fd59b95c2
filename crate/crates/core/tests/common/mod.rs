//! Dense 2×2 complex-matrix oracles, independent of the quaternion code.
#![allow(dead_code)]

use floquet_chern::{KPoint, SU2Op, Spinor, Vec3};
use num_complex::Complex64 as C;
use rand::Rng;
use std::f64::consts::PI;

pub type Mat2 = [[C; 2]; 2];

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

pub fn pauli() -> [Mat2; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

pub fn identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][c] + b[r][c];
        }
    }
    out
}

pub fn scale(a: &Mat2, s: C) -> Mat2 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn pow(a: &Mat2, n: usize) -> Mat2 {
    (0..n).fold(identity(), |acc, _| mul(a, &acc))
}

pub fn apply(a: &Mat2, v: [C; 2]) -> [C; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            m = m.max((a[r][c] - b[r][c]).norm());
        }
    }
    m
}

/// `v·σ`.
pub fn field_matrix(v: Vec3) -> Mat2 {
    let s = pauli();
    let t = add(&scale(&s[0], C::from(v.x)), &scale(&s[1], C::from(v.y)));
    add(&t, &scale(&s[2], C::from(v.z)))
}

/// `a0·1 − i a·σ` written out entrywise.
pub fn op_matrix(u: &SU2Op) -> Mat2 {
    add(&scale(&identity(), C::from(u.a0)), &scale(&field_matrix(u.a), -I))
}

/// Normalized eigenvector of a 2×2 matrix for eigenvalue `lambda`, from the
/// better-conditioned row of `M − λ1`.
pub fn eigenvector(m: &Mat2, lambda: C) -> [C; 2] {
    let r0 = [m[0][0] - lambda, m[0][1]];
    let r1 = [m[1][0], m[1][1] - lambda];
    let (row, alt) = if r0[0].norm() + r0[1].norm() >= r1[0].norm() + r1[1].norm() {
        (r0, r1)
    } else {
        (r1, r0)
    };
    let v = if row[0].norm() + row[1].norm() > 1e-300 {
        [row[1], -row[0]]
    } else if alt[0].norm() + alt[1].norm() > 1e-300 {
        [alt[1], -alt[0]]
    } else {
        [ONE, ZERO]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Both eigenvalues of a 2×2 matrix from its characteristic polynomial.
pub fn eigenvalues(m: &Mat2) -> [C; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - det * 4.0).sqrt();
    [(tr + disc) / 2.0, (tr - disc) / 2.0]
}

/// `exp(−i H t)` for Hermitian `H` by spectral decomposition.
pub fn expm_hermitian(h: &Mat2, t: f64) -> Mat2 {
    let lam = eigenvalues(h);
    if (lam[0] - lam[1]).norm() < 1e-14 {
        return scale(&identity(), (-I * lam[0].re * t).exp());
    }
    let mut out = [[ZERO; 2]; 2];
    for &l in &lam {
        let v = eigenvector(h, l);
        let phase = (-I * l.re * t).exp();
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] += phase * v[r] * v[c].conj();
            }
        }
    }
    out
}

/// Dense Floquet matrix `exp(−i T₂ h₂·σ) exp(−i T₁ h₁·σ)`.
pub fn floquet_matrix(h1: Vec3, t1: f64, h2: Vec3, t2: f64) -> Mat2 {
    mul(
        &expm_hermitian(&field_matrix(h2), t2),
        &expm_hermitian(&field_matrix(h1), t1),
    )
}

/// Eigenphases `−arg λ` of a unitary, sorted ascending.
pub fn eigenphases(u: &Mat2) -> [f64; 2] {
    let lam = eigenvalues(u);
    let mut p = [-lam[0].arg(), -lam[1].arg()];
    p.sort_by(f64::total_cmp);
    p
}

pub fn spin_of(v: [C; 2]) -> Vec3 {
    let s = pauli();
    let e = |m: &Mat2| {
        let w = apply(m, v);
        (v[0].conj() * w[0] + v[1].conj() * w[1]).re
    };
    Vec3::new(e(&s[0]), e(&s[1]), e(&s[2]))
}

pub fn spinor_vec(s: &Spinor) -> [C; 2] {
    [s.c0, s.c1]
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn state_fidelity(a: [C; 2], b: [C; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// `|tr(A†B)|²/4`, the global-phase-insensitive fidelity of two unitaries.
pub fn gate_fidelity(a: &Mat2, b: &Mat2) -> f64 {
    let p = mul(&dagger(a), b);
    ((p[0][0] + p[1][1]) / 2.0).norm_sqr()
}

/// Bloch vector of the eigenvector of `u` with eigenphase `+E ∈ (0, π)`, i.e.
/// eigenvalue `e^{−iE}`. This is the direction of `d` by definition of
/// `U = exp(−i d·σ)`.
pub fn effective_direction(u: &Mat2) -> Vec3 {
    let lam = eigenvalues(u);
    let (l, _) = if -lam[0].arg() > -lam[1].arg() {
        (lam[0], lam[1])
    } else {
        (lam[1], lam[0])
    };
    spin_of(eigenvector(u, l))
}

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

pub fn random_k<R: Rng>(rng: &mut R) -> KPoint {
    KPoint::new(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
}

pub fn random_spinor<R: Rng>(rng: &mut R) -> Spinor {
    Spinor::from_bloch(random_unit(rng)).unwrap()
}

/// Angle difference of two π-periodic angles, in `[0, π/2]`.
pub fn angle_dist_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}
