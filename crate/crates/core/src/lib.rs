//! H(curl²)-conforming finite elements for the quad-curl problem.
//!
//! Local spaces are built from Poincaré operators in exact rational
//! arithmetic; assembly and solves run in floating point.

pub mod analysis;
pub mod appendix;
pub mod derham_check;
pub mod elements;
pub mod error;
pub mod exact;
pub mod mesh;
pub mod polycore;
pub mod quadrature;
pub mod solver;
pub mod spaces;

pub use error::Error;
