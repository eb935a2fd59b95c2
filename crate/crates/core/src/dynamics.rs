//! Stroboscopic evolution, long-time averaged spin textures and the dynamic
//! winding-angle Chern number.

use crate::error::{Error, Result};
use crate::floquet::{effective_bloch_with_tol, floquet_operator, Band, StateDecomposition, DEFAULT_DEGENERACY_TOL};
use crate::model::{KPoint, QuenchProtocol};
use crate::su2::{SU2Op, Spinor};
use crate::topology::spectrum::map_grid;
use crate::topology::texture::{fold_to_arctan, full_angle, AxisChoice, SpinTextureGrid, WindingAngle, SINGULAR_TOL};
use crate::topology::winding::{chern_from_texture_refined, SingularityRecord};
use crate::vec3::{BlochVector3, Vec3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Default lower bound on `|c₊|² − |c₋|²` for the dynamic Chern number.
pub const DEFAULT_WEIGHT_GAP_THRESHOLD: f64 = 0.1;

/// States `U^ℓ ψ₀` for `ℓ = 1..=periods`.
pub fn evolve_stroboscopic(u: &SU2Op, state0: Spinor, periods: usize) -> Vec<Spinor> {
    let mut out = Vec::with_capacity(periods);
    let mut psi = state0;
    for _ in 0..periods {
        psi = u.apply(psi);
        out.push(psi);
    }
    out
}

/// `(1/N) Σ_{ℓ=1..N} ⟨ψ(ℓT)|σ|ψ(ℓT)⟩`, summed explicitly.
pub fn time_averaged_spin(u: &SU2Op, state0: Spinor, periods: usize) -> BlochVector3 {
    assert!(periods >= 1, "at least one period");
    let mut psi = state0;
    let mut acc = Vec3::ZERO;
    for _ in 0..periods {
        psi = u.apply(psi);
        acc += psi.expectation();
    }
    acc * (1.0 / periods as f64)
}

/// Dynamic winding angle of the averaged texture.
pub fn dwa_of(avg: Vec3, axes: AxisChoice) -> Result<WindingAngle> {
    if axes.j.of(avg).abs() < SINGULAR_TOL && axes.l.of(avg).abs() < SINGULAR_TOL {
        return Err(Error::SingularPoint { k: None });
    }
    let full = full_angle(avg, axes.j, axes.l);
    Ok(WindingAngle {
        theta: fold_to_arctan(full),
        full,
    })
}

pub fn dwa(u: &SU2Op, state0: Spinor, periods: usize, axes: AxisChoice) -> Result<WindingAngle> {
    dwa_of(time_averaged_spin(u, state0, periods), axes)
}

type StateFn = dyn Fn(KPoint, Vec3) -> Spinor + Send + Sync;

/// How the initial state is chosen at each k.
#[derive(Clone)]
pub enum InitialStateRule {
    /// The same state everywhere, e.g. `|0⟩`.
    Fixed(Spinor),
    /// An independent uniformly random pure state per grid node, seeded by
    /// `(seed, node index)` so results do not depend on evaluation order.
    Randomized { seed: u64 },
    /// Weight `weight` on `band` and the rest on the other band, with a random
    /// relative phase per node.
    BandWeighted { band: Band, weight: f64, seed: u64 },
    /// Arbitrary function of `k` and the unit effective Bloch vector.
    PerK(Arc<StateFn>),
}

impl InitialStateRule {
    pub fn ground() -> Self {
        InitialStateRule::Fixed(Spinor::zero())
    }

    /// Initial state for grid node `index` at `k`, given `d̂(k)`.
    pub fn state(&self, index: u64, k: KPoint, d_hat: Vec3) -> Spinor {
        match self {
            InitialStateRule::Fixed(s) => *s,
            InitialStateRule::Randomized { seed } => {
                let mut rng = node_rng(*seed, index);
                let z: f64 = rng.gen_range(-1.0..=1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let r = (1.0 - z * z).max(0.0).sqrt();
                Spinor::from_bloch(Vec3::new(r * phi.cos(), r * phi.sin(), z)).expect("unit vector")
            }
            InitialStateRule::BandWeighted { band, weight, seed } => {
                let mut rng = node_rng(*seed, index);
                let phase: f64 = rng.gen_range(0.0..2.0 * PI);
                let n = d_hat * band.sign();
                let (Some(main), Some(other)) = (Spinor::from_bloch(n), Spinor::from_bloch(-n)) else {
                    return Spinor::zero();
                };
                let a = Complex64::new(weight.sqrt(), 0.0);
                let b = Complex64::from_polar((1.0 - weight).max(0.0).sqrt(), phase);
                Spinor::new(main.c0 * a + other.c0 * b, main.c1 * a + other.c1 * b)
            }
            InitialStateRule::PerK(f) => f(k, d_hat),
        }
    }
}

impl fmt::Debug for InitialStateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialStateRule::Fixed(s) => f.debug_tuple("Fixed").field(s).finish(),
            InitialStateRule::Randomized { seed } => f.debug_struct("Randomized").field("seed", seed).finish(),
            InitialStateRule::BandWeighted { band, weight, seed } => f
                .debug_struct("BandWeighted")
                .field("band", band)
                .field("weight", weight)
                .field("seed", seed)
                .finish(),
            InitialStateRule::PerK(_) => f.write_str("PerK(..)"),
        }
    }
}

fn node_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StroboscopicRun {
    pub k: KPoint,
    pub initial_state: Spinor,
    pub periods: usize,
    pub averaged_spin: BlochVector3,
    /// `|c₊|² − |c₋|²`; zero where the gap is closed.
    pub weight_gap: f64,
    pub degenerate: bool,
}

pub fn stroboscopic_run(qp: &QuenchProtocol, k: KPoint, state0: Spinor, periods: usize, tol: f64) -> StroboscopicRun {
    let u = floquet_operator(qp, k);
    let averaged_spin = time_averaged_spin(&u, state0, periods);
    let d = effective_bloch_with_tol(&u, tol, Some(k)).ok();
    let weight_gap = d
        .and_then(|d| StateDecomposition::of(&state0, &d).ok())
        .map_or(0.0, |dec| dec.weight_gap());
    StroboscopicRun {
        k,
        initial_state: state0,
        periods,
        averaged_spin,
        weight_gap,
        degenerate: d.is_none(),
    }
}

/// Averaged texture on the grid together with the per-node weight gap.
#[derive(Debug, Clone)]
pub struct DynamicTexture {
    pub texture: SpinTextureGrid,
    /// Row-major like `texture.values`.
    pub weight_gap: Vec<f64>,
    pub periods: usize,
}

pub fn dynamic_texture(
    qp: &QuenchProtocol,
    rule: &InitialStateRule,
    grid_n: usize,
    periods: usize,
    tol: f64,
) -> DynamicTexture {
    let runs = map_grid(grid_n, grid_n, |i1, i2, k| {
        let u = floquet_operator(qp, k);
        let d_hat = effective_bloch_with_tol(&u, tol, Some(k))
            .ok()
            .and_then(|d| d.unit())
            .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
        let state0 = rule.state((i1 * grid_n + i2) as u64, k, d_hat);
        stroboscopic_run(qp, k, state0, periods, tol)
    });
    let mut texture = SpinTextureGrid::from_values(grid_n, grid_n, runs.iter().map(|r| r.averaged_spin).collect());
    texture.degenerate_points = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.degenerate)
        .map(|(idx, _)| (idx / grid_n, idx % grid_n))
        .collect();
    DynamicTexture {
        texture,
        weight_gap: runs.iter().map(|r| r.weight_gap).collect(),
        periods,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicOptions {
    pub axes: AxisChoice,
    pub weight_gap_threshold: f64,
    pub grid_cap: usize,
    pub degeneracy_tol: f64,
}

impl Default for DynamicOptions {
    fn default() -> Self {
        Self {
            axes: AxisChoice::ZXY,
            weight_gap_threshold: DEFAULT_WEIGHT_GAP_THRESHOLD,
            grid_cap: 384,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DynamicChern {
    pub chern: i64,
    /// Band carrying the larger weight; the averaged texture follows its
    /// Bloch vector, so `chern` is that band's Chern number.
    pub band: Band,
    pub grid_n: usize,
    pub refinements: usize,
    pub singularities: Vec<SingularityRecord>,
}

/// Checks the weight-gap precondition: `|c₊|² − |c₋|²` must exceed the
/// threshold in magnitude and keep one sign over the grid.
pub fn check_weight_gap(dynamic: &DynamicTexture, threshold: f64) -> Result<Band> {
    let tex = &dynamic.texture;
    let small: Vec<KPoint> = dynamic
        .weight_gap
        .iter()
        .enumerate()
        .filter(|(_, w)| w.abs() <= threshold)
        .map(|(idx, _)| tex.k(idx / tex.n2, idx % tex.n2))
        .collect();
    if !small.is_empty() {
        return Err(Error::WeightGapViolation {
            threshold,
            points: small,
        });
    }
    let positive = dynamic.weight_gap.iter().filter(|w| **w > 0.0).count();
    let negative = dynamic.weight_gap.len() - positive;
    let band = if positive >= negative { Band::Upper } else { Band::Lower };
    if positive > 0 && negative > 0 {
        let minority: Vec<KPoint> = dynamic
            .weight_gap
            .iter()
            .enumerate()
            .filter(|(_, w)| (**w > 0.0) != (band == Band::Upper))
            .map(|(idx, _)| tex.k(idx / tex.n2, idx % tex.n2))
            .collect();
        return Err(Error::WeightGapViolation {
            threshold,
            points: minority,
        });
    }
    Ok(band)
}

/// Chern number from the singularities of the long-time averaged texture.
pub fn chern_dynamic(
    qp: &QuenchProtocol,
    rule: &InitialStateRule,
    grid_n: usize,
    periods: usize,
    opts: &DynamicOptions,
) -> Result<DynamicChern> {
    if periods == 0 {
        return Err(Error::invalid("periods", "must be at least 1"));
    }
    let band = std::cell::Cell::new(Band::FILLED);
    let r = chern_from_texture_refined(grid_n, opts.grid_cap, opts.axes, |n| {
        let dynamic = dynamic_texture(qp, rule, n, periods, opts.degeneracy_tol);
        if !dynamic.texture.degenerate_points.is_empty() {
            return Err(Error::DegenerateGrid {
                points: dynamic.texture.degenerate_kpoints(),
            });
        }
        band.set(check_weight_gap(&dynamic, opts.weight_gap_threshold)?);
        Ok(dynamic.texture)
    })?;
    Ok(DynamicChern {
        chern: r.chern,
        band: band.get(),
        grid_n: r.grid_n,
        refinements: r.refinements,
        singularities: r.singularities,
    })
}
