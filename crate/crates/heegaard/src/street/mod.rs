//! Heegaard diagrams and the surgery algorithms built on explicit tracing.

mod diagram;
mod overlay;
pub(crate) mod parts;
mod reduction;
mod stabilization;
mod surgery;

pub use diagram::{BetaJson, DiagramJson, HeegaardDiagram};
pub use overlay::{Boundary, Item, Piece, RegionKind, StreetComplex, DEFAULT_GUARD};
pub use reduction::{detect_reduction, Reduction};
pub use stabilization::{
    build_torus_block, connected_sum, destabilize, find_trivial_stabilization, stabilize, torus_block, BLOCK_FACE,
};
pub use surgery::{check_diagram, disk_slide, extend_to_maximal, reduce_to_minimal, Census, PieceSummary};
