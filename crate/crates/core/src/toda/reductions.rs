use std::sync::Arc;

use num_rational::BigRational;
use serde_json::json;

use super::{dttl_exponent_balance, dttl_residual, translational_family, DttlScheme, TodaError};
use crate::lattice::{LatticeGrid, Window};
use crate::reduction::{ReducedEquation, ReductionResult};
use crate::scalar::Scalar;

/// Translation reduction `u = u(ξ)`, `ξ = σx n + a σt m`, with the constants
/// of the translational family used for the residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct DttlTranslation {
    pub a: f64,
    pub sigma_x: f64,
    pub sigma_t: f64,
    pub alpha: f64,
    /// `[A, B, C, D]` of `u = A n(n+m) + B m + C n + D`.
    pub family: [f64; 4],
    pub window: Window,
}

impl DttlTranslation {
    pub fn new(a: f64, sigma_x: f64, sigma_t: f64) -> Self {
        DttlTranslation { a, sigma_x, sigma_t, alpha: 1.0, family: [1.0, 2.0, 3.0, 4.0], window: Window::new((-10, 10), (-10, 10)) }
    }

    pub fn k(&self) -> f64 {
        self.a * self.sigma_t / self.sigma_x
    }
}

pub fn translation_reduce_dttl(a: f64, sigma_x: f64, sigma_t: f64) -> Result<ReductionResult, TodaError> {
    translation_reduce_dttl_with(&DttlTranslation::new(a, sigma_x, sigma_t))
}

/// Requires `a σt/σx = k` integer. For `k = 1` the five points collapse to
/// three and the general solution is the four-parameter family.
pub fn translation_reduce_dttl_with(p: &DttlTranslation) -> Result<ReductionResult, TodaError> {
    let scheme = DttlScheme::new(p.alpha, p.sigma_x, p.sigma_t)?;
    let kf = p.k();
    let k = kf.round();
    if (kf - k).abs() > 1e-12 * kf.abs().max(1.0) {
        return Err(TodaError::NonLatticeReduction(kf));
    }
    let k = k as i64;
    let points = json!({
        "xi(n,m)": 0,
        "xi(n,m+1)": k,
        "xi(n,m+2)": 2 * k,
        "xi(n+1,m)": 1,
        "xi(n-1,m+2)": 2 * k - 1,
    });
    let variable = format!("xi(n,m) = sigma_x (n + {k} m), in units of sigma_x: N = n + {k} m");
    if k != 1 {
        let reduced = ReducedEquation::new(
            "exp(u(N) - u(N+k)) - exp(u(N+k) - u(N+2k)) = alpha^2 (exp(u(N+2k-1) - u(N+k)) - exp(u(N+k) - u(N+1)))",
        )
        .stencil(["N", "N+1", "N+k", "N+2k-1", "N+2k"])
        .coefficient("k", k)
        .coefficient("alpha", p.alpha)
        .coefficient("points", points);
        return Ok(ReductionResult::new("dttl", "translation", "point", "u(x,t) = u(xi), xi = x + a t", reduced)
            .variable(variable)
            .value("k", k)
            .note("no closed form is attached for k != 1"));
    }
    let grid = Arc::new(scheme.grid::<f64>(p.window)?);
    let u = translational_family(grid, p.family);
    let resid = dttl_residual(&u, p.alpha)?.max_abs;
    let exact_grid = Arc::new(LatticeGrid::toda(p.window, BigRational::from_f64_checked(p.sigma_x)?, BigRational::from_f64_checked(p.sigma_t)?)?);
    let exact = p.family.iter().map(|v| BigRational::from_f64_checked(*v)).collect::<Result<Vec<_>, _>>()?;
    let balance = dttl_exponent_balance(&translational_family(exact_grid, [exact[0].clone(), exact[1].clone(), exact[2].clone(), exact[3].clone()]))?.max_abs;
    let reduced = ReducedEquation::new("u(n,m) - 2 u(n,m+1) + u(n,m+2) = 0")
        .stencil(["(n,m)", "(n,m+1)", "(n,m+2)"])
        .coefficient("k", 1)
        .coefficient("points", points);
    Ok(ReductionResult::new("dttl", "translation", "point", "u(x,t) = u(xi), xi = x + a t, a sigma_t = sigma_x", reduced)
        .variable(variable)
        .closed_form("u(n,m) = f(n) m + g(n); substituting back: u(n,m) = A n (n+m) + B m + C n + D")
        .value("k", 1)
        .value("family", json!({"A": p.family[0], "B": p.family[1], "C": p.family[2], "D": p.family[3]}))
        .value("alpha", p.alpha)
        .value("exponent_balance", balance.to_json())
        .note("the right-hand side vanishes identically because xi(n,m+1) = xi(n+1,m) = xi(n-1,m+2)")
        .residual(resid, u.window()))
}

/// `[ξ, ξ1, ξ2, ξ3, ξ4]` at `(n, m)`, `ξ = σx σt^β n m^β`, from the
/// multiplicative form of the shifted points.
pub fn dilation_points(beta: f64, sigma_x: f64, sigma_t: f64, n: i64, m: i64) -> Result<[f64; 5], TodaError> {
    if m < 1 {
        return Err(TodaError::DegenerateTime { m });
    }
    let s = sigma_x * sigma_t.powf(beta);
    let mf = m as f64;
    let xi = s * n as f64 * mf.powf(beta);
    let r1 = ((mf + 1.0) / mf).powf(beta);
    let r2 = ((mf + 2.0) / mf).powf(beta);
    Ok([xi, xi * r1, xi * r2, xi * r2 - s * (mf + 2.0).powf(beta), xi + s * mf.powf(beta)])
}

/// Reduction by `D0 − βD1` to a dilation-delay equation; no solver is
/// attached. The shifted points are checked against direct evaluation of
/// `ξ` on `window` (time indices `m ≥ 1`).
pub fn dilation_reduce_dttl(beta: f64, sigma_x: f64, sigma_t: f64, window: Window) -> Result<ReductionResult, TodaError> {
    if window.time.0 < 1 {
        return Err(TodaError::DegenerateTime { m: window.time.0 });
    }
    let s = sigma_x * sigma_t.powf(beta);
    let direct = |n: i64, m: i64| s * n as f64 * (m as f64).powf(beta);
    let mut resid = 0.0f64;
    for m in window.time.0..=window.time.1 {
        for n in window.space.0..=window.space.1 {
            let p = dilation_points(beta, sigma_x, sigma_t, n, m)?;
            let d = [direct(n, m), direct(n, m + 1), direct(n, m + 2), direct(n - 1, m + 2), direct(n + 1, m)];
            for (a, b) in p.iter().zip(d) {
                resid = resid.max((a - b).abs() / b.abs().max(1.0));
            }
        }
    }
    let reduced = ReducedEquation::new("exp(u(xi) - u(xi1)) - exp(u(xi1) - u(xi2)) = alpha^2 (exp(u(xi3) - u(xi1)) - exp(u(xi1) - u(xi4)))")
        .stencil(["xi", "xi1", "xi2", "xi3", "xi4"])
        .coefficient("xi1", "xi ((m+1)/m)^beta")
        .coefficient("xi2", "xi ((m+2)/m)^beta")
        .coefficient("xi3", "xi ((m+2)/m)^beta - sigma_x sigma_t^beta (m+2)^beta")
        .coefficient("xi4", "xi + sigma_x sigma_t^beta m^beta")
        .coefficient("beta", beta);
    Ok(ReductionResult::new("dttl", "dilation", "point", "u(x,t) = u(xi), xi = x t^beta", reduced)
        .variable(format!("xi(n,m) = {sigma_x} * {sigma_t}^{beta} n m^{beta}"))
        .value("beta", beta)
        .note("dilation-delay equation: the points are related multiplicatively; no closed form is attached")
        .residual(resid, window))
}
