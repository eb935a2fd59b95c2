mod common;

use common::*;
use floquet_chern::dynamics::{evolve_stroboscopic, time_averaged_spin};
use floquet_chern::floquet::spin_expectation_of_state;
use floquet_chern::*;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_op(rng: &mut ChaCha8Rng) -> SU2Op {
    su2_exp(random_unit(rng) * rng.gen_range(0.0..PI))
}

fn random_protocol(rng: &mut ChaCha8Rng) -> QuenchProtocol {
    let p1 = HamiltonianParams::new(
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-PI..PI),
    );
    let p2 = HamiltonianParams::new(
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-PI..PI),
    );
    QuenchProtocol::new(p1, rng.gen_range(0.0..2.0), p2, rng.gen_range(0.0..2.0)).unwrap()
}

#[test]
fn compose_matches_dense_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let (a, b) = (random_op(&mut rng), random_op(&mut rng));
        let dense = mul(&op_matrix(&b), &op_matrix(&a));
        assert!(max_abs_diff(&op_matrix(&compose(&b, &a)), &dense) < 1e-12);
    }
}

#[test]
fn su2_exp_matches_spectral_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let h = random_unit(&mut rng) * rng.gen_range(0.0..4.0);
        let t = rng.gen_range(0.0..3.0);
        let dense = expm_hermitian(&field_matrix(h), t);
        assert!(max_abs_diff(&op_matrix(&su2_exp(h * t)), &dense) < 1e-12);
    }
}

/// Dense oracle output for the two-stage operator at `(T1,T2) = (0.9,0.8)`,
/// `k = (1.0, −0.7)`.
const FROZEN_U: [[(f64, f64); 2]; 2] = [
    [
        (-0.500744600259394, -0.4211206353957094),
        (0.12925926083679073, 0.7451203253454437),
    ],
    [
        (-0.12925926083679073, 0.7451203253454437),
        (-0.500744600259394, 0.4211206353957094),
    ],
];

#[test]
fn floquet_operator_matches_frozen_oracle() {
    let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
    let k = KPoint::new(1.0, -0.7);
    let (h1, h2) = stage_fields(&qp, k);
    let oracle = floquet_matrix(h1, 0.9, h2, 0.8);
    let frozen = FROZEN_U.map(|row| row.map(|(re, im)| C::new(re, im)));
    assert!(max_abs_diff(&oracle, &frozen) < 1e-14);
    assert!(max_abs_diff(&op_matrix(&floquet_operator(&qp, k)), &frozen) < 1e-12);
}

#[test]
fn floquet_operator_matches_dense_on_random_protocols() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let qp = random_protocol(&mut rng);
        let k = random_k(&mut rng);
        let (h1, h2) = stage_fields(&qp, k);
        let dense = floquet_matrix(h1, qp.duration1, h2, qp.duration2);
        assert!(max_abs_diff(&op_matrix(&floquet_operator(&qp, k)), &dense) < 1e-12);
    }
}

#[test]
fn quasienergy_matches_eigenphases() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let qp = random_protocol(&mut rng);
        let k = random_k(&mut rng);
        let u = floquet_operator(&qp, k);
        let phases = eigenphases(&op_matrix(&u));
        let e = quasienergy(&u).e_plus;
        // Near ±π the two eigenphases wrap; compare on the circle.
        let on_circle = |a: f64, b: f64| (a - b).rem_euclid(2.0 * PI).min((b - a).rem_euclid(2.0 * PI));
        assert!(
            on_circle(phases[1], e) < 1e-10 || on_circle(phases[0], e) < 1e-10,
            "{phases:?} {e}"
        );
        assert!(on_circle(phases[0], -e) < 1e-10 || on_circle(phases[1], -e) < 1e-10);
    }
}

/// Oracle direction of `d` and `E₊` at `(0.9, 0.8)`, `k = (0.3, 0.5)`.
const FROZEN_DIRECTION: [f64; 3] = [-0.9689617152366511, -0.24688660670900606, 0.012656928275040724];
const FROZEN_E_PLUS: f64 = 1.083840382061741;

#[test]
fn effective_bloch_matches_frozen_eigenvector() {
    let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
    let k = KPoint::new(0.3, 0.5);
    let (h1, h2) = stage_fields(&qp, k);
    let dir = effective_direction(&floquet_matrix(h1, 0.9, h2, 0.8));
    let frozen = Vec3::new(FROZEN_DIRECTION[0], FROZEN_DIRECTION[1], FROZEN_DIRECTION[2]);
    assert!(dir.max_abs_diff(frozen) < 1e-12);
    let d = effective_bloch(&floquet_operator(&qp, k)).unwrap();
    assert!(d.unit().unwrap().max_abs_diff(frozen) < 1e-9);
    assert!((d.e_plus() - FROZEN_E_PLUS).abs() < 1e-10);
}

#[test]
fn effective_bloch_direction_on_random_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let u = random_op(&mut rng);
        let Ok(d) = effective_bloch(&u) else { continue };
        let dir = effective_direction(&op_matrix(&u));
        assert!(d.unit().unwrap().max_abs_diff(dir) < 1e-9);
    }
}

#[test]
fn eigenstates_are_eigenvectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..500 {
        let u = random_op(&mut rng);
        let Ok(d) = effective_bloch(&u) else { continue };
        let (plus, minus) = eigenstates(&d).unwrap();
        let e = d.e_plus();
        let m = op_matrix(&u);
        let expect = |s: &Spinor, phase: f64| {
            let lhs = apply(&m, spinor_vec(s));
            let rhs = spinor_vec(&s.scaled(C::from_polar(1.0, phase)));
            (lhs[0] - rhs[0]).norm().max((lhs[1] - rhs[1]).norm())
        };
        assert!(expect(&plus, -e) < 1e-10);
        assert!(expect(&minus, e) < 1e-10);
        assert!(plus.inner(&minus).norm() < 1e-12);
        let n = d.unit().unwrap();
        assert!((spin_of(spinor_vec(&plus)).dot(n) - 1.0).abs() < 1e-12);
        assert!((spin_of(spinor_vec(&minus)).dot(n) + 1.0).abs() < 1e-12);
    }
}

#[test]
fn direct_expectation_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let s = random_spinor(&mut rng);
        assert!(spin_expectation_of_state(&s).max_abs_diff(spin_of(spinor_vec(&s))) < 1e-12);
    }
}

#[test]
fn stroboscopic_state_matches_matrix_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let u = random_op(&mut rng);
        let s0 = random_spinor(&mut rng);
        let states = evolve_stroboscopic(&u, s0, 64);
        let oracle = apply(&pow(&op_matrix(&u), 64), spinor_vec(&s0));
        let last = spinor_vec(states.last().unwrap());
        assert!((last[0] - oracle[0]).norm() < 1e-10 && (last[1] - oracle[1]).norm() < 1e-10);
    }
}

#[test]
fn spin_expectation_is_long_time_average_without_cross_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let u = random_op(&mut rng);
        let Ok(d) = effective_bloch(&u) else { continue };
        if d.e_plus().sin().abs() < 0.3 {
            continue;
        }
        let s0 = random_spinor(&mut rng);
        let dec = StateDecomposition::of(&s0, &d).unwrap();
        // Dense-matrix long-time average over 10^5 periods.
        let m = op_matrix(&u);
        let mut v = spinor_vec(&s0);
        let mut acc = Vec3::ZERO;
        let n = 100_000;
        for _ in 0..n {
            v = apply(&m, v);
            acc += spin_of(v);
        }
        let avg = acc * (1.0 / n as f64);
        assert!(spin_expectation(&dec, &d).max_abs_diff(avg) < 1e-3);
        assert!(time_averaged_spin(&u, s0, n).max_abs_diff(avg) < 1e-9);
    }
}
