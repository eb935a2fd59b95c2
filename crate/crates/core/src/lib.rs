//! Periodically quenched generalized Haldane model.
//!
//! A two-stage quench alternates between two parameter sets of the two-band
//! model `H(k) = h(k)·σ`. This crate builds the exact Floquet operator at each
//! quasimomentum, extracts quasienergies and the effective Bloch vector, and
//! computes Floquet-band Chern numbers three ways:
//!
//! - link variables over Floquet eigenstates ([`topology::chern_lattice`]),
//! - phase singularities of static spin textures ([`topology::chern_swa`]),
//! - phase singularities of long-time averaged textures ([`dynamics::chern_dynamic`]).
//!
//! It also simulates the qubit pulse sequences that realize these textures
//! ([`pulse`]).
//!
//! Conventions: `ħ = 1`; the Brillouin zone is the torus `[−π, π)²` with
//! `(k1, k2)` right-handed; the lower band (Bloch vector `−d̂`) is the filled
//! band; loop windings are clockwise; `|0⟩` is the `σ_z = +1` state.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod io;
pub mod model;
pub mod pulse;
pub mod su2;
pub mod topology;
pub mod vec3;

pub use error::{Error, Result};
pub use floquet::{
    effective_bloch, eigenstate, eigenstates, floquet_operator, quasienergy, spin_expectation, Band, EffectiveBloch,
    QuasienergyInfo, StateDecomposition,
};
pub use model::{bloch_vector, stage_fields, HamiltonianParams, KPoint, ModelPreset, QuenchProtocol};
pub use su2::{compose, su2_exp, SU2Op, Spinor};
pub use topology::{AxisChoice, SingularityRecord, SpinTextureGrid};
pub use vec3::{BlochVector3, Vec3};
