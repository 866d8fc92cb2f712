//! `oracle`: exact values of `I(N, n)`, `γ_n` and the powers of `q(z)`.

use clap::ValueEnum;
use latsym::heat::ztransform::{contour_quadrature_i, gamma_sequence, q_polynomial, z_transform_i};
use latsym::Scalar;
use serde::Serialize;
use serde_json::json;

use super::{exact, require_json};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Outcome, Status};

/// Largest deviation accepted between the exact value and the quadrature.
pub const QUADRATURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
pub enum OracleKind {
    /// `I(N, n)`, the `z^(N−1)` coefficient of `q(z)^n`
    #[value(name = "I", alias = "i")]
    #[serde(rename = "I")]
    I,
    /// `γ_n = (c+1)^n γ0`
    #[value(name = "gamma")]
    #[serde(rename = "gamma")]
    Gamma,
    /// Coefficients of `q(z)^n`, lowest degree first
    #[value(name = "q")]
    #[serde(rename = "q")]
    Q,
}

fn degree(cfg: &RunConfig) -> Result<u32, CliError> {
    u32::try_from(cfg.n).map_err(|_| CliError::Usage(format!("--n {} must be nonnegative", cfg.n)))
}

pub fn run(cfg: &RunConfig, kind: OracleKind) -> Result<Outcome, CliError> {
    require_json(cfg)?;
    let c = exact("c", &cfg.c)?;
    if !num_traits::Signed::is_positive(&c) {
        return Err(CliError::Usage(format!("--c {} must be positive", cfg.c)));
    }
    match kind {
        OracleKind::I => {
            let n = degree(cfg)?;
            let v = z_transform_i(cfg.big_n, n, &c)?;
            let mut result = json!({
                "oracle": kind, "N": cfg.big_n, "n": n, "c": c.to_json(),
                "value": v.to_json(), "decimal": v.to_f64_lossy(),
            });
            let mut status = Status::Ok;
            if cfg.check {
                let points = 2 * n as usize + (cfg.big_n - 1).unsigned_abs() as usize + 8;
                let q = contour_quadrature_i(cfg.big_n, n, c.to_f64_lossy(), points);
                let deviation = (q - v.to_f64_lossy()).abs();
                result["quadrature"] = json!({"value": q, "points": points, "deviation": deviation, "tolerance": QUADRATURE_TOL});
                status = Status::from_pass(deviation <= QUADRATURE_TOL);
            }
            Outcome::json(status, result)
        }
        OracleKind::Gamma => {
            let g = gamma_sequence(cfg.n, &c, &exact("gamma0", &cfg.gamma0)?);
            Outcome::json(Status::Ok, json!({"oracle": kind, "n": cfg.n, "c": c.to_json(), "value": g.to_json(), "decimal": g.to_f64_lossy()}))
        }
        OracleKind::Q => {
            let p = q_polynomial(&c).pow(degree(cfg)?);
            let coeffs: Vec<_> = p.coeffs().iter().map(Scalar::to_json).collect();
            Outcome::json(Status::Ok, json!({"oracle": kind, "n": cfg.n, "c": c.to_json(), "coefficients": coeffs}))
        }
    }
}
