//! Output envelope and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// A verification passed.
    Pass,
    /// A verification failed or a closed form missed the tolerance.
    Fail,
    /// A computation finished with nothing to judge.
    Ok,
    /// A computation stopped on a domain error.
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Ok => 0,
            Status::Fail | Status::Error => 2,
        }
    }

    pub fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Json { status: Status, result: Value, notes: Vec<String> },
    /// Preformatted text (CSV), with its status.
    Text { status: Status, text: String },
}

impl Outcome {
    pub fn json(status: Status, result: impl Serialize) -> Result<Outcome, CliError> {
        let result = serde_json::to_value(result).map_err(|e| CliError::Failed(e.to_string()))?;
        Ok(Outcome::Json { status, result, notes: Vec::new() })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Outcome {
        if let Outcome::Json { notes, .. } = &mut self {
            notes.push(note.into());
        }
        self
    }

    pub fn status(&self) -> Status {
        match self {
            Outcome::Json { status, .. } | Outcome::Text { status, .. } => *status,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    config: &'a RunConfig,
    status: Status,
    result: &'a Value,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

/// Pretty JSON with a trailing newline.
pub fn render(cfg: &RunConfig, outcome: &Outcome) -> Result<String, CliError> {
    match outcome {
        Outcome::Json { status, result, notes } => envelope_text(&Envelope { config: cfg, status: *status, result, notes, error: None }),
        Outcome::Text { text, .. } => Ok(text.clone()),
    }
}

pub fn render_error(cfg: &RunConfig, message: &str) -> Result<String, CliError> {
    envelope_text(&Envelope { config: cfg, status: Status::Error, result: &Value::Null, notes: &[], error: Some(message) })
}

fn envelope_text(e: &Envelope<'_>) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(e).map_err(|e| CliError::Failed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path` through a temporary file in the same directory and a
/// rename, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Failed(format!("stdout: {e}")))
        }
        Some(p) => write_atomic(p, text.as_bytes()),
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
