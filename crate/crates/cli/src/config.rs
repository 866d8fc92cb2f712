//! Run configuration: command-line flags over a config file over defaults.
//!
//! The config file holds one `key = value` pair per line; values may be bare
//! or TOML literals, `#` starts a comment, and a full TOML table is accepted
//! too. Keys are the long flag names with `-` or `_`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use latsym::scalar::MODE_ENV_VAR;
use latsym::{ArithmeticMode, Window};
use serde::Serialize;

use crate::commands::oracle::OracleKind;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Verify,
    Evolve,
    Reduce,
    Oracle,
    Report,
}

macro_rules! value_enum {
    ($name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
        #[serde(rename_all = "kebab-case")]
        pub enum $name {
            $($variant),*
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                <$name as ValueEnum>::from_str(s.trim(), true)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $text),* })
            }
        }
    };
}

value_enum!(SchemeKind { Heat => "heat", Dttl => "dttl" });
value_enum!(Formalism { Point => "point", Evolutionary => "evolutionary", Flow => "flow" });
value_enum!(OutputFormat { Json => "json", Csv => "csv" });
value_enum!(FamilyChoice { Printed => "printed", Corrected => "corrected" });

/// `lo,hi` index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange(pub i64, pub i64);

impl FromStr for IndexRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().trim_matches(|c| c == '[' || c == ']').split(',').map(str::trim).collect();
        match parts.as_slice() {
            [lo, hi] => {
                let lo: i64 = lo.parse().map_err(|e| format!("`{lo}`: {e}"))?;
                let hi: i64 = hi.parse().map_err(|e| format!("`{hi}`: {e}"))?;
                if lo > hi {
                    return Err(format!("empty range {lo},{hi}"));
                }
                Ok(IndexRange(lo, hi))
            }
            _ => Err(format!("expected `lo,hi`, found `{s}`")),
        }
    }
}

/// `lo,hi` real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket(pub f64, pub f64);

impl FromStr for Bracket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().trim_matches(|c| c == '[' || c == ']').split(',').map(str::trim).collect();
        match parts.as_slice() {
            [lo, hi] => Ok(Bracket(lo.parse().map_err(|e| format!("`{lo}`: {e}"))?, hi.parse().map_err(|e| format!("`{hi}`: {e}"))?)),
            _ => Err(format!("expected `lo,hi`, found `{s}`")),
        }
    }
}

macro_rules! settings {
    ($( $(#[$meta:meta])* $field:ident : $ty:ty ),* $(,)?) => {
        /// Every option, unset unless given on the command line or in a file.
        #[derive(Debug, Clone, Default, Args)]
        pub struct Settings {
            /// Config file of `key = value` lines.
            #[arg(long)]
            pub config: Option<PathBuf>,
            $( $(#[$meta])* pub $field: Option<$ty>, )*
        }

        impl Settings {
            /// Fields set here win over `lower`.
            pub fn or(self, lower: Settings) -> Settings {
                Settings { config: self.config.or(lower.config), $( $field: self.$field.or(lower.$field), )* }
            }

            pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
                let canonical = match key.trim() {
                    "A" => "big_a".to_string(),
                    "B" => "big_b".to_string(),
                    "N" => "big_n".to_string(),
                    k => k.replace('-', "_"),
                };
                match canonical.as_str() {
                    $( stringify!($field) => {
                        let parsed = value.parse::<$ty>().map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))?;
                        self.$field = Some(parsed);
                    } )*
                    _ => return Err(CliError::Usage(format!("unknown config key `{key}`"))),
                }
                Ok(())
            }
        }
    };
}

settings! {
    /// heat or dttl
    #[arg(long)]
    scheme: SchemeKind,
    /// Builtin name, flow name, reduction name, or an expression
    #[arg(long, allow_hyphen_values = true)]
    symmetry: String,
    /// point, evolutionary or flow
    #[arg(long)]
    mode: Formalism,
    /// double or rational (also LATSYM_MODE)
    #[arg(long)]
    arithmetic: ArithmeticMode,
    #[arg(long)]
    seed: u64,
    /// Verification tolerance
    #[arg(long)]
    tol: f64,
    /// Number of sampled solution windows
    #[arg(long)]
    samples: usize,
    /// Sites per sampled row
    #[arg(long)]
    width: usize,
    /// Time steps
    #[arg(long)]
    steps: usize,
    /// Heat mesh ratio sigma_t/sigma_x^2
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    /// Toda coupling
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Translation speed
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Toda dilation exponent
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Integer shift of the reduced translation equation
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, allow_hyphen_values = true)]
    sigma_x: String,
    #[arg(long, allow_hyphen_values = true)]
    sigma_t: String,
    #[arg(long, allow_hyphen_values = true)]
    gamma0: String,
    /// Spacing of the reduced variable (heat) or first integral A (Toda)
    #[arg(long = "A", allow_hyphen_values = true)]
    big_a: String,
    /// First integral B (Toda)
    #[arg(long = "B", allow_hyphen_values = true)]
    big_b: String,
    #[arg(long, allow_hyphen_values = true)]
    c1: String,
    #[arg(long, allow_hyphen_values = true)]
    c2: String,
    /// Initial a of a stationary orbit
    #[arg(long, allow_hyphen_values = true)]
    a0: String,
    /// Initial b of a stationary orbit
    #[arg(long, allow_hyphen_values = true)]
    b0: String,
    /// Index N of I(N, n)
    #[arg(long = "N", allow_hyphen_values = true)]
    big_n: i64,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    #[arg(long, allow_hyphen_values = true)]
    m0: i64,
    #[arg(long, allow_hyphen_values = true)]
    n0: i64,
    /// Space index range `lo,hi`
    #[arg(long, allow_hyphen_values = true)]
    space: IndexRange,
    /// Time index range `lo,hi`
    #[arg(long, allow_hyphen_values = true)]
    time: IndexRange,
    /// Root bracket for a non-lattice translation exponent
    #[arg(long, allow_hyphen_values = true)]
    bracket: Bracket,
    /// Largest flow step of the commutator test
    #[arg(long)]
    eps: f64,
    /// Number of step halvings
    #[arg(long)]
    levels: usize,
    /// Closed form of the stationary nonisospectral family
    #[arg(long)]
    form: FamilyChoice,
    /// Sites solved below the support in a Toda a/b step
    #[arg(long)]
    tail: usize,
    /// Cross-check an oracle value by contour quadrature
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    check: bool,
    /// Input field (.json or .csv) or a/b state (.json)
    #[arg(long)]
    input: PathBuf,
    /// Output file; standard output when absent
    #[arg(long)]
    output: PathBuf,
    /// json or csv
    #[arg(long)]
    format: OutputFormat,
}

/// Reads a config file into settings.
pub fn read_config_file(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Ok(table) = text.parse::<toml::Table>() {
        for (k, v) in &table {
            let value = match v {
                toml::Value::String(s) => s.clone(),
                toml::Value::Array(items) => items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                other => other.to_string(),
            };
            s.set(k, &value)?;
        }
        return Ok(s);
    }
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
        s.set(k, v.trim().trim_matches('"'))?;
    }
    Ok(s)
}

/// The effective configuration, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub scheme: SchemeKind,
    pub symmetry: String,
    pub mode: Formalism,
    pub arithmetic: ArithmeticMode,
    pub seed: u64,
    pub tol: f64,
    pub samples: usize,
    pub width: usize,
    pub steps: usize,
    pub c: String,
    pub alpha: String,
    pub a: String,
    pub beta: String,
    pub k: Option<String>,
    pub sigma_x: String,
    pub sigma_t: String,
    pub gamma0: String,
    #[serde(rename = "A")]
    pub big_a: Option<String>,
    #[serde(rename = "B")]
    pub big_b: Option<String>,
    pub c1: String,
    pub c2: String,
    pub a0: String,
    pub b0: String,
    #[serde(rename = "N")]
    pub big_n: i64,
    pub n: i64,
    pub m: i64,
    pub m0: i64,
    pub n0: i64,
    pub window: Window,
    pub bracket: Option<(f64, f64)>,
    pub eps: f64,
    pub levels: usize,
    pub form: FamilyChoice,
    pub tail: usize,
    pub check: bool,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub config_file: Option<PathBuf>,
    /// Set for `oracle`.
    pub oracle: Option<OracleKind>,
    /// Inputs of `report`.
    pub files: Vec<PathBuf>,
}

/// Merges flags, `LATSYM_MODE`, the config file and defaults, in that order.
pub fn resolve(command: CommandKind, flags: Settings) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(p) => read_config_file(p)?,
        None => Settings::default(),
    };
    let env = Settings { arithmetic: ArithmeticMode::from_env().map_err(|e| CliError::Usage(format!("{MODE_ENV_VAR}: {e}")))?, ..Settings::default() };
    Ok(with_defaults(command, flags.or(env).or(file)))
}

fn default_symmetry(command: CommandKind, scheme: SchemeKind) -> &'static str {
    match (command, scheme) {
        (CommandKind::Reduce, _) => "translation",
        (_, SchemeKind::Heat) => "B",
        (_, SchemeKind::Dttl) => "P0",
    }
}

fn default_window(command: CommandKind, scheme: SchemeKind, symmetry: &str, mode: Formalism) -> Window {
    match (command, scheme, symmetry, mode) {
        (CommandKind::Reduce, SchemeKind::Heat, "translation", Formalism::Point) => Window::new((-10, 10), (0, 0)),
        (CommandKind::Reduce, SchemeKind::Heat, "translation", _) => Window::new((-6, 6), (0, 6)),
        (CommandKind::Reduce, SchemeKind::Heat, "dilation", Formalism::Point) => Window::new((-5, 5), (0, 5)),
        (CommandKind::Reduce, SchemeKind::Heat, "dilation", _) => Window::new((-20, 20), (1, 10)),
        (CommandKind::Reduce, SchemeKind::Dttl, "dilation", _) => Window::new((-5, 5), (1, 6)),
        (CommandKind::Reduce, SchemeKind::Dttl, "nonisospectral", _) => Window::new((2, 6), (0, 3)),
        (CommandKind::Reduce, SchemeKind::Dttl, "isospectral", _) => Window::new((0, 11), (0, 0)),
        _ => Window::new((-10, 10), (-10, 10)),
    }
}

fn with_defaults(command: CommandKind, s: Settings) -> RunConfig {
    let scheme = s.scheme.unwrap_or(SchemeKind::Heat);
    let symmetry = s.symmetry.unwrap_or_else(|| default_symmetry(command, scheme).to_string());
    let mode = s.mode.unwrap_or(Formalism::Point);
    let base = default_window(command, scheme, symmetry.as_str(), mode);
    let window = Window::new(
        s.space.map_or(base.space, |r| (r.0, r.1)),
        s.time.map_or(base.time, |r| (r.0, r.1)),
    );
    RunConfig {
        command,
        scheme,
        symmetry,
        mode,
        arithmetic: s.arithmetic.unwrap_or_default(),
        seed: s.seed.unwrap_or(0),
        tol: s.tol.unwrap_or(1e-8),
        samples: s.samples.unwrap_or(50),
        width: s.width.unwrap_or(12),
        steps: s.steps.unwrap_or(5),
        c: s.c.unwrap_or_else(|| "1/2".into()),
        alpha: s.alpha.unwrap_or_else(|| "2".into()),
        a: s.a.unwrap_or_else(|| "1".into()),
        beta: s.beta.unwrap_or_else(|| "1".into()),
        k: s.k,
        sigma_x: s.sigma_x.unwrap_or_else(|| "1/2".into()),
        sigma_t: s.sigma_t.unwrap_or_else(|| "1/4".into()),
        gamma0: s.gamma0.unwrap_or_else(|| "1".into()),
        big_a: s.big_a,
        big_b: s.big_b,
        c1: s.c1.unwrap_or_else(|| "1".into()),
        c2: s.c2.unwrap_or_else(|| "0".into()),
        a0: s.a0.unwrap_or_else(|| "1".into()),
        b0: s.b0.unwrap_or_else(|| "0".into()),
        big_n: s.big_n.unwrap_or(1),
        n: s.n.unwrap_or(3),
        m: s.m.unwrap_or(0),
        m0: s.m0.unwrap_or(0),
        n0: s.n0.unwrap_or(-1),
        window,
        bracket: s.bracket.map(|b| (b.0, b.1)),
        eps: s.eps.unwrap_or(1e-2),
        levels: s.levels.unwrap_or(5),
        form: s.form.unwrap_or(FamilyChoice::Printed),
        tail: s.tail.unwrap_or(64),
        check: s.check.unwrap_or(false),
        input: s.input,
        output: s.output,
        format: s.format.unwrap_or(OutputFormat::Json),
        config_file: s.config,
        oracle: None,
        files: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_and_toml_files_agree() {
        let kv = parse_config_text("scheme = dttl\nalpha = 3/2  # coupling\nspace = -4,4\nN = 7\ncheck=true\n").unwrap();
        let tm = parse_config_text("scheme = \"dttl\"\nalpha = \"3/2\"\nspace = [-4, 4]\nN = 7\ncheck = true\n").unwrap();
        for s in [kv, tm] {
            assert_eq!(s.scheme, Some(SchemeKind::Dttl));
            assert_eq!(s.alpha.as_deref(), Some("3/2"));
            assert_eq!(s.space, Some(IndexRange(-4, 4)));
            assert_eq!((s.big_n, s.check), (Some(7), Some(true)));
        }
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        assert!(matches!(parse_config_text("colour = red"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config_text("seed = minus one"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config_text("space = 3"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_win_over_file_and_defaults_fill_the_rest() {
        let file = parse_config_text("seed = 9\nc = 2\nscheme = dttl").unwrap();
        let flags = Settings { seed: Some(4), ..Settings::default() };
        let cfg = with_defaults(CommandKind::Verify, flags.or(file));
        assert_eq!((cfg.seed, cfg.c.as_str(), cfg.scheme), (4, "2", SchemeKind::Dttl));
        assert_eq!((cfg.symmetry.as_str(), cfg.samples, cfg.arithmetic), ("P0", 50, ArithmeticMode::Double));
        let reduce = with_defaults(CommandKind::Reduce, Settings { mode: Some(Formalism::Evolutionary), symmetry: Some("dilation".into()), ..Settings::default() });
        assert_eq!(reduce.window, Window::new((-20, 20), (1, 10)));
    }
}
