//! `report`: summarises earlier outputs, or runs the standard symmetry suite.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::{require_json, verify};
use crate::config::{Formalism, RunConfig, SchemeKind};
use crate::error::CliError;
use crate::output::{Outcome, Status};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub name: String,
    pub scheme: Value,
    pub mode: Value,
    pub status: Value,
    pub max_abs_residual: Option<f64>,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub source: &'static str,
    pub entries: Vec<ReportEntry>,
    pub passed: usize,
    pub total: usize,
}

/// Heat point fields, heat evolutionary operators, Toda point fields, and
/// the isospectral flow.
pub const SUITE: &[(SchemeKind, Formalism, &str)] = &[
    (SchemeKind::Heat, Formalism::Point, "P0"),
    (SchemeKind::Heat, Formalism::Point, "P1"),
    (SchemeKind::Heat, Formalism::Point, "D"),
    (SchemeKind::Heat, Formalism::Point, "W"),
    (SchemeKind::Heat, Formalism::Point, "S"),
    (SchemeKind::Heat, Formalism::Evolutionary, "P0"),
    (SchemeKind::Heat, Formalism::Evolutionary, "P1"),
    (SchemeKind::Heat, Formalism::Evolutionary, "W"),
    (SchemeKind::Heat, Formalism::Evolutionary, "B"),
    (SchemeKind::Heat, Formalism::Evolutionary, "D"),
    (SchemeKind::Heat, Formalism::Evolutionary, "K"),
    (SchemeKind::Dttl, Formalism::Point, "P0"),
    (SchemeKind::Dttl, Formalism::Point, "P1"),
    (SchemeKind::Dttl, Formalism::Point, "D0"),
    (SchemeKind::Dttl, Formalism::Point, "D1"),
    (SchemeKind::Dttl, Formalism::Point, "W"),
    (SchemeKind::Dttl, Formalism::Flow, "isospectral"),
];

pub fn run(cfg: &RunConfig, files: &[PathBuf]) -> Result<Outcome, CliError> {
    require_json(cfg)?;
    let (source, entries) = if files.is_empty() {
        ("suite", suite(cfg)?)
    } else {
        ("files", files.iter().map(|p| from_file(p)).collect::<Result<Vec<_>, _>>()?)
    };
    let passed = entries.iter().filter(|e| e.status == "pass" || e.status == "ok").count();
    let total = entries.len();
    Outcome::json(Status::from_pass(passed == total), Summary { source, entries, passed, total })
}

fn entry(name: String, doc: &Value) -> ReportEntry {
    let result = &doc["result"];
    ReportEntry {
        name,
        scheme: doc["config"]["scheme"].clone(),
        mode: doc["config"]["mode"].clone(),
        status: doc["status"].clone(),
        max_abs_residual: result["max_abs_residual"].as_f64().or_else(|| result["residual_max"].as_f64()),
        order: result["estimate"]["order"].as_f64(),
    }
}

fn from_file(path: &Path) -> Result<ReportEntry, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if doc.get("config").is_none() || doc.get("status").is_none() {
        return Err(CliError::Usage(format!("{} is not a latsym output", path.display())));
    }
    let name = format!("{} {}", doc["config"]["command"].as_str().unwrap_or("?"), doc["config"]["symmetry"].as_str().unwrap_or("?"));
    Ok(entry(name, &doc))
}

fn suite(cfg: &RunConfig) -> Result<Vec<ReportEntry>, CliError> {
    SUITE
        .iter()
        .map(|&(scheme, mode, symmetry)| {
            let sub = RunConfig { scheme, mode, symmetry: symmetry.to_string(), ..cfg.clone() };
            let out = verify::run(&sub)?;
            let doc = match &out {
                Outcome::Json { result, .. } => serde_json::json!({"config": sub, "status": out.status(), "result": result}),
                Outcome::Text { .. } => unreachable!("verify writes JSON"),
            };
            Ok(entry(format!("{scheme} {mode} {symmetry}"), &doc))
        })
        .collect()
}
