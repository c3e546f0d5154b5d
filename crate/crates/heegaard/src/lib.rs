//! Compressed Heegaard diagrams.
//!
//! A closed orientable 3-manifold is encoded by a marked surface, an α-system
//! given by edge lists and a β-system given by straight-line programs or
//! normal coordinates. The crate compiles mapping-class words into diagrams,
//! performs diagram surgery and computes π₁ presentations and first homology.

pub mod curves;
pub mod decode;
pub mod error;
pub mod harness;
pub mod invariants;
pub mod slp;
pub mod street;
pub mod surface;
pub mod word;

pub use error::{Error, Result};
