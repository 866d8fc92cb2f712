//! One module per subcommand; each maps a [`RunConfig`] to an [`Outcome`].

pub mod evolve;
pub mod oracle;
pub mod reduce;
pub mod report;
pub mod verify;

use std::collections::BTreeMap;

use latsym::Scalar;
use num_rational::BigRational;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

/// Parses a numeric option in the arithmetic `S`.
pub fn scalar<S: Scalar>(name: &str, value: &str) -> Result<S, CliError> {
    S::parse_scalar(value).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

pub fn real(name: &str, value: &str) -> Result<f64, CliError> {
    scalar::<f64>(name, value)
}

pub fn exact(name: &str, value: &str) -> Result<BigRational, CliError> {
    scalar::<BigRational>(name, value)
}

/// Parameters visible to expressions, besides the lattice spacings.
pub fn expression_params<S: Scalar>(cfg: &RunConfig) -> Result<BTreeMap<String, S>, CliError> {
    let mut p = BTreeMap::new();
    for (name, value) in [("c", &cfg.c), ("alpha", &cfg.alpha), ("a", &cfg.a), ("beta", &cfg.beta)] {
        p.insert(name.to_string(), scalar::<S>(name, value)?);
    }
    Ok(p)
}

pub fn require_json(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.format == OutputFormat::Csv {
        return Err(CliError::Usage("csv output is only available for `evolve` on fields".into()));
    }
    Ok(())
}
