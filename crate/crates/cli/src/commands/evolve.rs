//! `evolve`: heat fields by the explicit scheme, Toda fields in `u`, and
//! a/b states by the Toda step.

use std::fs::File;
use std::path::Path;

use latsym::heat::{heat_evolve, HeatSampler};
use latsym::lattice::scheme_residual;
use latsym::symmetry::SolutionSampler;
use latsym::toda::{dttl_residual, dttl_ab_step, AbDocument, AbState, DttlSampler, StepOptions};
use latsym::{ArithmeticMode, Field, LatticeError, Scalar};
use num_rational::BigRational;
use serde_json::{json, Value};

use super::scalar;
use super::verify::{dttl_scheme, heat_scheme};
use crate::config::{OutputFormat, RunConfig, SchemeKind};
use crate::error::CliError;
use crate::output::{Outcome, Status};

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match (cfg.scheme, cfg.arithmetic) {
        (SchemeKind::Heat, ArithmeticMode::Double) => heat::<f64>(cfg),
        (SchemeKind::Heat, ArithmeticMode::Rational) => heat::<BigRational>(cfg),
        (SchemeKind::Dttl, mode) => match &cfg.input {
            Some(path) => match mode {
                ArithmeticMode::Double => ab_steps::<f64>(cfg, path),
                ArithmeticMode::Rational => ab_steps::<BigRational>(cfg, path),
            },
            None => {
                let o = dttl_field(cfg)?;
                Ok(if mode == ArithmeticMode::Rational { o.with_note("Toda fields in u are evolved in double arithmetic") } else { o })
            }
        },
    }
}

fn read_field<S: Scalar>(path: &Path) -> Result<Field<S>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if csv { Field::read_csv(file)? } else { Field::read_json(file)? })
}

/// The effective config as `# key = value` lines.
fn csv_preamble(cfg: &RunConfig) -> Result<String, CliError> {
    let v = serde_json::to_value(cfg).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut s = String::new();
    if let Value::Object(map) = v {
        for (k, v) in map {
            s.push_str(&format!("# {k} = {v}\n"));
        }
    }
    Ok(s)
}

fn field_outcome<S: Scalar>(cfg: &RunConfig, f: &Field<S>, residual: Value) -> Result<Outcome, CliError> {
    match cfg.format {
        OutputFormat::Json => Outcome::json(Status::Ok, json!({"field": f.to_document(), "scheme_residual": residual})),
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            f.write_csv(&mut buf)?;
            let text = csv_preamble(cfg)? + &String::from_utf8(buf).map_err(|e| CliError::Failed(e.to_string()))?;
            Ok(Outcome::Text { status: Status::Ok, text })
        }
    }
}

/// From `--input` (a single row) or from a seeded random row.
fn heat<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scheme = heat_scheme::<S>(cfg)?;
    let f = match &cfg.input {
        Some(path) => heat_evolve(&read_field::<S>(path)?, cfg.steps, &scheme)?,
        None => HeatSampler::new(scheme.clone(), cfg.width, cfg.steps, 1, cfg.seed).sample(0)?,
    };
    // A single row has no residual to report.
    let r = match scheme_residual(&scheme.equation(), &f) {
        Ok(r) => r.max_abs.to_json(),
        Err(LatticeError::WindowTooSmall { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    field_outcome(cfg, &f, r)
}

fn dttl_field(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scheme = dttl_scheme(cfg)?;
    let f = DttlSampler::new(scheme, cfg.width, cfg.steps, 1, cfg.seed).sample(0)?;
    let r = dttl_residual(&f, scheme.alpha)?.max_abs;
    field_outcome(cfg, &f, json!(r))
}

/// `--steps` Toda steps of the a/b state in `--input`.
fn ab_steps<S: Scalar>(cfg: &RunConfig, path: &Path) -> Result<Outcome, CliError> {
    if cfg.format == OutputFormat::Csv {
        return Err(CliError::Usage("a/b states are written as JSON only".into()));
    }
    let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let doc: AbDocument = serde_json::from_reader(file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let alpha = scalar::<S>("alpha", &cfg.alpha)?;
    let opts = StepOptions { tail: cfg.tail, ..StepOptions::default() };
    let mut state = AbState::<S>::from_document(&doc)?;
    let mut states = vec![state.to_document()];
    let mut steps = Vec::new();
    for _ in 0..cfg.steps {
        let rep = dttl_ab_step(&state, &alpha, opts)?;
        steps.push(json!({
            "m": rep.state.m(),
            "residual_a": rep.residual_a.to_json(),
            "residual_b": rep.residual_b.to_json(),
            "truncation_index": rep.truncation_index,
            "truncation_deviation": rep.truncation_deviation,
        }));
        state = rep.state;
        states.push(state.to_document());
    }
    Outcome::json(Status::Ok, json!({"states": states, "steps": steps}))
}
