//! Point vector fields with discrete prolongation, evolutionary
//! characteristics, sampled verification of both symmetry criteria, and
//! commuting flows.

mod evolutionary;
mod heat_operators;
mod order;
mod point;
mod report;

pub use evolutionary::{
    characteristic_field, flow_step, verify_evolutionary_symmetry, CharacteristicFn, EvolutionaryCharacteristic,
    StencilView,
};
pub use heat_operators::{
    apply_linear_symmetry, galilei_with_half_term, heat_operator, projective_with_coefficient, HeatOperator, LinearStencil, StencilTerm};
pub use order::{estimate_order, OrderEstimate, OrderKind};
pub use point::{prolong_point_field, verify_point_symmetry, PointFn, PointVectorField, ProlongedAction};
pub use report::{EquationReport, Formalism, SymmetryReport, Verdict};

use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::lattice::{Field, LatticeError, Offset};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("sampler cannot build exact solutions: {0}")]
    SamplerInfeasible(String),
    #[error("stencil of `{name}` exceeds the sampled window {window}")]
    StencilExceedsWindow { name: String, window: crate::lattice::Window },
    #[error("characteristic `{name}` read undeclared offset {offset}")]
    UndeclaredOffset { name: String, offset: Offset },
    #[error("`{0}` is not one of P0, P1, W, B, D, K")]
    UnknownOperator(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Produces configurations that satisfy a scheme (and its lattice) exactly,
/// up to the rounding of the chosen arithmetic.
pub trait SolutionSampler<S: Scalar>: Sync {
    fn describe(&self) -> String;
    fn seed(&self) -> u64;
    fn count(&self) -> usize;
    /// Deterministic in `(seed, index)`.
    fn sample(&self, index: usize) -> Result<Field<S>, SymmetryError>;
}
