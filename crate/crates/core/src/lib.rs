//! Difference schemes on two-dimensional lattices: Lie point and discrete
//! evolutionary symmetries, symmetry reductions, and closed-form invariant
//! solutions for the discrete heat equation and the discrete-time Toda lattice.

pub mod expr;
pub mod heat;
pub mod lattice;
pub mod reduction;
pub mod scalar;
pub mod symmetry;
pub mod toda;

pub use lattice::{Field, LatticeError, LatticeGrid, Offset, Window};
pub use scalar::{ArithmeticMode, Scalar};
