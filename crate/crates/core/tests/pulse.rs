mod common;

use common::*;
use floquet_chern::floquet::{effective_bloch_at, DEFAULT_DEGENERACY_TOL};
use floquet_chern::pulse::*;
use floquet_chern::topology::texture::Axis;
use floquet_chern::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn segment_matrix(seg: &PulseSegment) -> Mat2 {
    expm_hermitian(&field_matrix(rotating_hamiltonian(seg)), seg.duration)
}

fn table() -> Vec<(f64, f64)> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/rabi_calibration.txt");
    parse_calibration(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn drive_pulses_reproduce_floquet_operator() {
    let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let k = random_k(&mut rng);
        let rabi = default_rabi(&qp, k, DEFAULT_DETUNING_CAP, DEFAULT_MAX_RABI);
        let (s1, s2) = floquet_drive_pulses(&qp, k, rabi).unwrap();
        let dense = mul(&segment_matrix(&s2), &segment_matrix(&s1));
        let (h1, h2) = stage_fields(&qp, k);
        let target = floquet_matrix(h1, qp.duration1, h2, qp.duration2);
        assert!(gate_fidelity(&dense, &target) > 1.0 - 1e-10);
        let fid = sequence_operator(&[s1, s2]).fidelity(&floquet_operator(&qp, k));
        assert!(fid > 1.0 - 1e-10, "{fid}");
        assert!(s1.detuning.abs() <= DEFAULT_DETUNING_CAP + 1e-9);
    }
}

#[test]
fn drive_pulses_for_random_protocols_and_rabi() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let qp = QuenchProtocol::standard(rng.gen_range(0.05..2.0), rng.gen_range(0.05..2.0)).unwrap();
        let k = random_k(&mut rng);
        let rabi = rng.gen_range(0.5..30.0);
        let (s1, s2) = floquet_drive_pulses(&qp, k, rabi).unwrap();
        assert!(sequence_operator(&[s1, s2]).fidelity(&floquet_operator(&qp, k)) > 1.0 - 1e-10);
    }
}

#[test]
fn collinear_stage_fields_give_resonant_x_pulses() {
    let qp = QuenchProtocol::standard(PI / 6.0, PI / 6.0).unwrap();
    let k = KPoint::new(0.0, 0.0);
    let (s1, s2) = floquet_drive_pulses(&qp, k, 10.0).unwrap();
    for s in [s1, s2] {
        assert!(s.phase.abs() < 1e-12 && s.detuning.abs() < 1e-12);
    }
    // Rotation angle 2·|h|T per stage: total 2π, so U = −1.
    assert!(((s1.duration + s2.duration) * 10.0 - 2.0 * PI).abs() < 1e-12);
    assert!(sequence_operator(&[s1, s2]).fidelity(&floquet_operator(&qp, k)) > 1.0 - 1e-12);
}

#[test]
fn sixty_four_period_drive_matches_operator_power() {
    let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let k = random_k(&mut rng);
        let rabi = default_rabi(&qp, k, DEFAULT_DETUNING_CAP, DEFAULT_MAX_RABI);
        let (s1, s2) = floquet_drive_pulses(&qp, k, rabi).unwrap();
        let s0 = random_spinor(&mut rng);
        let pulsed = simulate_repeated(&[s1, s2], s0, 64);
        let (h1, h2) = stage_fields(&qp, k);
        let oracle = apply(&pow(&floquet_matrix(h1, 0.9, h2, 0.8), 64), spinor_vec(&s0));
        assert!(state_fidelity(spinor_vec(&pulsed), oracle) > 1.0 - 1e-9);
        let direct = floquet_operator(&qp, k).pow(64).apply(s0);
        assert!(state_fidelity(spinor_vec(&pulsed), spinor_vec(&direct)) > 1.0 - 1e-9);
    }
}

#[test]
fn prep_pulse_reaches_upper_eigenstate() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..100 {
        let d = EffectiveBloch::new(random_unit(&mut rng) * rng.gen_range(0.1..PI));
        let rabi = rng.gen_range(0.5..20.0);
        let seg = prep_pulse(&d, rabi).unwrap();
        assert!(seg.duration >= 0.0 && seg.duration <= PI / rabi + 1e-15);
        let out = simulate_sequence(&[seg], Spinor::zero());
        let m = field_matrix(d.d);
        let [l0, l1] = eigenvalues(&m);
        let oracle = eigenvector(&m, if l0.re > l1.re { l0 } else { l1 });
        assert!(state_fidelity(spinor_vec(&out), oracle) > 1.0 - 1e-10);
        let (plus, _) = eigenstates(&d).unwrap();
        assert!(state_fidelity(spinor_vec(&out), spinor_vec(&plus)) > 1.0 - 1e-10);
    }
}

#[test]
fn prep_pulse_special_cases() {
    let seg = prep_pulse(&EffectiveBloch::new(Vec3::new(0.0, 0.0, 1.0)), 3.0).unwrap();
    assert_eq!(seg.duration, 0.0);
    let seg = prep_pulse(&EffectiveBloch::new(Vec3::new(1.0, 0.0, 0.0)), 2.0).unwrap();
    assert!((seg.phase - PI / 2.0).abs() < 1e-12);
    assert!((seg.duration - PI / 4.0).abs() < 1e-12);
    let x = simulate_sequence(&[seg], Spinor::zero()).expectation();
    assert!(x.max_abs_diff(Vec3::new(1.0, 0.0, 0.0)) < 1e-12);
    assert!(matches!(
        prep_pulse(&EffectiveBloch::new(Vec3::ZERO), 1.0),
        Err(Error::ZeroField)
    ));
}

#[test]
fn prep_then_phase_shifted_pulse_returns_ground_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..50 {
        let d = EffectiveBloch::new(random_unit(&mut rng));
        let seg = prep_pulse(&d, 5.0).unwrap();
        let undo = PulseSegment::new(seg.rabi, seg.phase + PI, 0.0, seg.duration).unwrap();
        let back = simulate_sequence(&[seg, undo], Spinor::zero());
        assert!((back.c0 - Spinor::zero().c0).norm() < 1e-12 && back.c1.norm() < 1e-12);
    }
    assert_eq!(simulate_sequence(&[], Spinor::one()), Spinor::one());
}

#[test]
fn measurement_triple_matches_direct_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..200 {
        let s = random_spinor(&mut rng);
        let t = measure_triple(&s);
        assert!(t.max_abs_diff(spin_of(spinor_vec(&s))) < 1e-12);
        assert!((t.norm() - 1.0).abs() < 1e-12);
    }
    assert!(measure_triple(&Spinor::zero()).max_abs_diff(Vec3::new(0.0, 0.0, 1.0)) < 1e-15);
}

#[test]
fn pulse_replica_reproduces_static_texture() {
    let qp = QuenchProtocol::standard(0.9, 0.8).unwrap();
    let n = 24;
    let grid = SpinTextureGrid::for_band(&qp, Band::Upper, n, DEFAULT_DEGENERACY_TOL);
    for i1 in 0..n {
        for i2 in 0..n {
            let k = grid.k(i1, i2);
            let d = effective_bloch_at(&qp, k, DEFAULT_DEGENERACY_TOL).unwrap();
            let seg = prep_pulse(&d, 10.0).unwrap();
            let measured = measure_triple(&simulate_sequence(&[seg], Spinor::zero()));
            assert!(measured.max_abs_diff(grid.at(i1, i2)) < 1e-9, "{k:?}");
        }
    }
}

#[test]
fn readout_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..100 {
        let sz: f64 = rng.gen_range(-1.0..=1.0);
        let rec = synthesize_readout(sz, 2000.0, -0.12, 0.09);
        let back = normalize_readout(&rec).unwrap();
        assert!((back.sigma_z - sz).abs() < 1e-12 && !back.clipped);
    }
    let shots = 4000;
    let bound = 3.0 / (shots as f64).sqrt();
    for seed in 0..20 {
        let s = random_spinor(&mut rng);
        for axis in Axis::ALL {
            let est = measure_axis_shots(&s, axis, shots, seed);
            assert!((est - measure_axis(&s, axis)).abs() < bound);
        }
    }
    assert_eq!(measure_axis_shots(&Spinor::one(), Axis::Z, 100, 1), -1.0);
}

const A_INTERVAL: (f64, f64) = (-38.52, -35.37);
const B_INTERVAL: (f64, f64) = (0.8448, 0.9736);
const C_INTERVAL: (f64, f64) = (35.04, 38.41);

fn inside(v: f64, (lo, hi): (f64, f64)) -> bool {
    lo < v && v < hi
}

#[test]
fn calibration_fit_lies_in_target_intervals() {
    let data = table();
    assert_eq!(data.len(), 11);
    let f = rabi_fit(&data).unwrap();
    assert!(
        inside(f.a, A_INTERVAL) && inside(f.b, B_INTERVAL) && inside(f.c, C_INTERVAL),
        "{f:?}"
    );
    assert!(f.residual_norm < 1.0);
    for skip in 0..data.len() {
        let rest: Vec<(f64, f64)> = data
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| *p)
            .collect();
        let g = rabi_fit(&rest).unwrap();
        assert!(
            inside(g.a, A_INTERVAL) && inside(g.b, B_INTERVAL) && inside(g.c, C_INTERVAL),
            "skip {skip}: {g:?}"
        );
    }
}

#[test]
fn calibration_evaluator_uses_linear_rule_below_edge() {
    let cal = RabiCalibration {
        fit: rabi_fit(&table()).unwrap(),
    };
    let edge = cal.rabi_frequency(LOW_AMPLITUDE_EDGE).unwrap();
    assert!((edge - 1.5).abs() < 0.3);
    assert!((cal.rabi_frequency(0.02).unwrap() - edge * 0.4).abs() < 1e-12);
    assert!((cal.rabi_frequency(0.5).unwrap() - cal.fit.eval(0.5)).abs() < 1e-15);
}
