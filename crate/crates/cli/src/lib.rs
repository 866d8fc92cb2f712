//! The `latsym` command: verification, evolution, reduction and oracle
//! computations for difference schemes, with JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::oracle::OracleKind;
use config::{resolve, CommandKind, Settings};
use error::CliError;
use output::{emit, render, render_error};

#[derive(Debug, Parser)]
#[command(name = "latsym", version, about = "Symmetries and invariant solutions of difference schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify a point symmetry, an evolutionary symmetry or a commuting flow
    Verify(Settings),
    /// Evolve a field or an a/b state
    Evolve(Settings),
    /// Run a symmetry reduction and check its closed form
    Reduce(Settings),
    /// Exact Z-transform values
    Oracle {
        #[arg(value_enum)]
        which: OracleKind,
        #[command(flatten)]
        settings: Settings,
    },
    /// Summarise earlier outputs, or run the standard suite when none are given
    Report {
        files: Vec<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
}


/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (kind, settings, oracle, files) = match cli.command {
        Command::Verify(s) => (CommandKind::Verify, s, None, Vec::new()),
        Command::Evolve(s) => (CommandKind::Evolve, s, None, Vec::new()),
        Command::Reduce(s) => (CommandKind::Reduce, s, None, Vec::new()),
        Command::Oracle { which, settings } => (CommandKind::Oracle, settings, Some(which), Vec::new()),
        Command::Report { files, settings } => (CommandKind::Report, settings, None, files),
    };
    let cfg = match resolve(kind, settings) {
        Ok(c) => config::RunConfig { oracle, files, ..c },
        Err(e) => return fail(None, e),
    };
    let outcome = match kind {
        CommandKind::Verify => commands::verify::run(&cfg),
        CommandKind::Evolve => commands::evolve::run(&cfg),
        CommandKind::Reduce => commands::reduce::run(&cfg),
        CommandKind::Oracle => commands::oracle::run(&cfg, oracle.expect("set for oracle")),
        CommandKind::Report => commands::report::run(&cfg, &cfg.files),
    };
    let written = outcome.and_then(|o| {
        let text = render(&cfg, &o)?;
        emit(cfg.output.as_deref(), &text)?;
        Ok(o.status().exit_code())
    });
    match written {
        Ok(code) => code,
        Err(e) => fail(Some(&cfg), e),
    }
}

/// Reports `e` on stderr; failures also write an error envelope.
fn fail(cfg: Option<&config::RunConfig>, e: CliError) -> i32 {
    match (&e, cfg) {
        (CliError::Usage(m), _) => eprintln!("latsym: usage error: {m}"),
        (CliError::Failed(m), Some(cfg)) => {
            eprintln!("latsym: {m}");
            if let Ok(text) = render_error(cfg, m) {
                let _ = emit(cfg.output.as_deref(), &text);
            }
        }
        (CliError::Failed(m), None) => eprintln!("latsym: {m}"),
    }
    e.exit_code()
}
