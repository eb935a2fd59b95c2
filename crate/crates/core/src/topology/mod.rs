//! Chern numbers from the effective Hamiltonian and from spin textures.

pub mod lattice;
pub mod phase_diagram;
pub mod spectrum;
pub mod texture;
pub mod touching;
pub mod winding;

pub use lattice::{chern_curvature, chern_lattice, chern_lattice_report, LatticeChern};
pub use phase_diagram::{classify_protocol, phase_diagram, CellChern, PhaseDiagramCell, PhaseDiagramOptions, TRange};
pub use spectrum::{band_spectrum, refined_min_gap, QuasienergyGrid};
pub use texture::{swa, Axis, AxisChoice, BandTexture, SpinTextureGrid, Texture, WindingAngle};
pub use touching::{band_touching_check, TouchingReport};
pub use winding::{
    chern_from_singularities, chern_swa, find_singularities, loop_winding, ClosedLoop, SingularityChern,
    SingularityRecord,
};
