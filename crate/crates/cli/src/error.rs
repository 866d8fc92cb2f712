use latsym::expr::ParseError;
use latsym::heat::HeatError;
use latsym::scalar::ScalarError;
use latsym::symmetry::SymmetryError;
use latsym::toda::TodaError;
use latsym::LatticeError;
use thiserror::Error;

/// Usage errors exit with 1, failures with 2.
#[derive(Debug, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ScalarError> for CliError {
    fn from(e: ScalarError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Parse(p) => p.into(),
            SymmetryError::UnknownOperator(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<HeatError> for CliError {
    fn from(e: HeatError) -> Self {
        match e {
            HeatError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            HeatError::Symmetry(s) => s.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<TodaError> for CliError {
    fn from(e: TodaError) -> Self {
        match e {
            TodaError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            TodaError::Symmetry(s) => s.into(),
            TodaError::Scalar(s) => s.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// Malformed input and windows too small for a stencil are usage errors.
impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Io(_)
            | LatticeError::Format(_)
            | LatticeError::EmptyWindow
            | LatticeError::InvalidSpacing(_)
            | LatticeError::WindowTooSmall { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}
