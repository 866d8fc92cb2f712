//! `reduce`: symmetry reductions with their closed forms and residuals.

use latsym::heat::dilation::{dilation_reduce_evolutionary, dilation_reduce_point};
use latsym::heat::translation::{translation_reduce_evolutionary, translation_reduce_point, PointTranslation};
use latsym::heat::HeatScheme;
use latsym::reduction::{ReducedEquation, ReductionResult};
use latsym::toda::{
    determine_ab_from_dttl, dilation_reduce_dttl, eliminated_residual, first_integrals, isospectral_at, isospectral_stationary_orbit,
    solve_nonisospectral_stationary, translation_reduce_dttl_with, DttlTranslation, FamilyForm, NonisospectralFamily,
};
use latsym::{ArithmeticMode, Scalar};
use num_rational::BigRational;
use serde_json::json;

use super::{exact, real, require_json, scalar};
use crate::config::{FamilyChoice, Formalism, RunConfig, SchemeKind};
use crate::error::CliError;
use crate::output::{Outcome, Status};

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    require_json(cfg)?;
    let sym = cfg.symmetry.trim().to_ascii_lowercase();
    let r = match (cfg.scheme, sym.as_str(), cfg.mode) {
        (SchemeKind::Heat, "translation", Formalism::Point) => heat_translation_point(cfg)?,
        (SchemeKind::Heat, "translation", _) => match cfg.arithmetic {
            ArithmeticMode::Double => heat_translation_evolutionary::<f64>(cfg)?,
            ArithmeticMode::Rational => heat_translation_evolutionary::<BigRational>(cfg)?,
        },
        (SchemeKind::Heat, "dilation", Formalism::Point) => dilation_reduce_point(real("c", &cfg.c)?, cfg.m0, cfg.n0, cfg.window)?,
        (SchemeKind::Heat, "dilation", _) => {
            let n = u32::try_from(cfg.n).map_err(|_| CliError::Usage(format!("--n {} must be nonnegative", cfg.n)))?;
            dilation_reduce_evolutionary(&exact("c", &cfg.c)?, &exact("gamma0", &cfg.gamma0)?, cfg.m, n, cfg.window)?
        }
        (SchemeKind::Dttl, "translation", _) => translation_reduce_dttl_with(&DttlTranslation {
            alpha: real("alpha", &cfg.alpha)?,
            window: cfg.window,
            ..DttlTranslation::new(real("a", &cfg.a)?, real("sigma-x", &cfg.sigma_x)?, real("sigma-t", &cfg.sigma_t)?)
        })?,
        (SchemeKind::Dttl, "dilation", _) => {
            dilation_reduce_dttl(real("beta", &cfg.beta)?, real("sigma-x", &cfg.sigma_x)?, real("sigma-t", &cfg.sigma_t)?, cfg.window)?
        }
        (SchemeKind::Dttl, "isospectral", _) => match cfg.arithmetic {
            ArithmeticMode::Double => isospectral::<f64>(cfg)?,
            ArithmeticMode::Rational => isospectral::<BigRational>(cfg)?,
        },
        (SchemeKind::Dttl, "nonisospectral", _) => nonisospectral(cfg)?,
        (scheme, other, _) => {
            return Err(CliError::Usage(format!(
                "no reduction `{other}` for {scheme}; use translation or dilation (heat), or translation, dilation, isospectral or nonisospectral (dttl)"
            )))
        }
    };
    let status = match r.residual_max {
        None => Status::Ok,
        Some(v) => Status::from_pass(v <= cfg.tol),
    };
    Outcome::json(status, r)
}

/// `--k` fixes `a = k/(A c)`; otherwise `--a` is used.
fn heat_translation_point(cfg: &RunConfig) -> Result<ReductionResult, CliError> {
    let c = real("c", &cfg.c)?;
    let big_a = match &cfg.big_a {
        Some(v) => real("A", v)?,
        None => 1.0,
    };
    let a = match &cfg.k {
        Some(k) => real("k", k)? / (big_a * c),
        None => real("a", &cfg.a)?,
    };
    let p = PointTranslation {
        c1: real("c1", &cfg.c1)?,
        c2: real("c2", &cfg.c2)?,
        bracket: cfg.bracket,
        ..PointTranslation::new(a, c, big_a)
    };
    Ok(translation_reduce_point(&p)?)
}

fn heat_translation_evolutionary<S: Scalar>(cfg: &RunConfig) -> Result<ReductionResult, CliError> {
    let scheme = HeatScheme::new(scalar::<S>("sigma-x", &cfg.sigma_x)?, scalar::<S>("sigma-t", &cfg.sigma_t)?)?;
    let (r, _) = translation_reduce_evolutionary(
        &scalar::<S>("a", &cfg.a)?,
        &scheme,
        &scalar::<S>("c1", &cfg.c1)?,
        &scalar::<S>("c2", &cfg.c2)?,
        cfg.window,
    )?;
    Ok(r)
}

/// The stationary orbit with first integrals `A`, `B` from `a(0) = a0`,
/// `b(0) = b0` over as many sites as the space window; the defaults give the
/// vacuum.
fn isospectral<S: Scalar>(cfg: &RunConfig) -> Result<ReductionResult, CliError> {
    let big_a = scalar::<S>("A", cfg.big_a.as_deref().unwrap_or("2"))?;
    let big_b = scalar::<S>("B", cfg.big_b.as_deref().unwrap_or("0"))?;
    let len = (cfg.window.space.1 - cfg.window.space.0 + 1) as usize;
    let (a, b) = isospectral_stationary_orbit(&big_a, &big_b, scalar::<S>("a0", &cfg.a0)?, scalar::<S>("b0", &cfg.b0)?, len)?;
    fn at<S: Clone>(v: &[S]) -> impl Fn(i64) -> S + '_ {
        move |n| v[(n + 1) as usize].clone()
    }
    let last = len as i64 - 1;
    let fi = first_integrals(at(&a), at(&b), (0, last));
    let mut flow = S::zero();
    for n in 1..last {
        let (ae, be) = isospectral_at(&at(&a), &at(&b), n);
        for v in [ae.abs(), be.abs()] {
            if v > flow {
                flow = v;
            }
        }
    }
    let a64: Vec<f64> = a.iter().map(Scalar::to_f64_lossy).collect();
    let eliminated = eliminated_residual(|n| a64[(n + 1) as usize], big_a.to_f64_lossy(), big_b.to_f64_lossy(), (0, last - 1));
    let residual = if fi.max_drift > flow { fi.max_drift.clone() } else { flow.clone() };
    let reduced = ReducedEquation::new("a(n-1) + a(n) + b(n)^2 = A, a(n) (b(n+1) + b(n)) = B")
        .stencil(["n-1", "n", "n+1"])
        .coefficient("A", big_a.to_json())
        .coefficient("B", big_b.to_json());
    let mut r = ReductionResult::new("dttl", "isospectral", "evolutionary", "a_eps = b_eps = 0 under the isospectral flow", reduced)
        .closed_form("b(n+1) = B/a(n) - b(n), a(n+1) = A - a(n) - b(n+1)^2")
        .value("a", a[1..].iter().map(Scalar::to_json).collect::<Vec<_>>())
        .value("b", b[1..].iter().map(Scalar::to_json).collect::<Vec<_>>())
        .value("first_integral_drift", fi.max_drift.to_json())
        .value("flow_residual", flow.to_json())
        .residual(residual.to_f64_lossy(), latsym::Window::new((0, last), (cfg.m, cfg.m)));
    r = match eliminated {
        Ok(v) => r.value("eliminated_residual", v.iter().fold(0.0f64, |m, x| m.max(x.abs()))).note(
            "the eliminated form a(n)(sqrt(A - a(n) - a(n+1)) + sqrt(A - a(n-1) - a(n))) = B uses principal roots, so it holds only where b(n), b(n+1) >= 0",
        ),
        Err(e) => r.value("eliminated_residual", json!(null)).note(e.to_string()),
    };
    Ok(r)
}

fn family_form(f: FamilyChoice) -> FamilyForm {
    match f {
        FamilyChoice::Printed => FamilyForm::Printed,
        FamilyChoice::Corrected => FamilyForm::Corrected,
    }
}

/// Selects `A(m) = m(m+1)`, `B = 0` by substituting the stationary family
/// into the Toda step at `α = 1` (time range from `--time`, space from
/// `--space`); with `--A`/`--B` also checks that family member exactly and
/// folds its residuals into the verdict.
fn nonisospectral(cfg: &RunConfig) -> Result<ReductionResult, CliError> {
    let d = determine_ab_from_dttl(cfg.window.time, cfg.window.space)?;
    let reduced = ReducedEquation::new(
        "(2s+3)^2 (s+2) a(n+1) - [s (2s+3)^2 + (s+1)(2s-1)^2] a(n) + (s-1)(2s-1)^2 a(n-1) = 16 (2s+1), s = n + m",
    )
    .stencil(["n-1", "n", "n+1"]);
    let mut r = ReductionResult::new("dttl", "nonisospectral", "evolutionary", "a_eps = b_eps = 0 under the nonisospectral flow", reduced)
        .closed_form("a = [A + B/(2s+1)^2 + n(n+2m+1)]/(s(s+1)), b = 4B/((2s-1)(2s+1)); the Toda step selects A(m) = m(m+1), B = 0: a = 1, b = 0")
        .value("A(m)", "m(m+1)")
        .value("B", 0)
        .value("a", 1)
        .value("b", 0)
        .value("selected_is_vacuum", d.selected_is_vacuum)
        .value("perturbed", json!(d.perturbed.iter().map(|(l, v)| json!({"choice": l, "residual": v})).collect::<Vec<_>>()))
        .residual(d.selected_residual, cfg.window);
    if let (Some(a), Some(b)) = (&cfg.big_a, &cfg.big_b) {
        let fam = NonisospectralFamily::new(exact("A", a)?, exact("B", b)?, cfg.m, family_form(cfg.form));
        let sol = solve_nonisospectral_stationary(&fam, cfg.window.space)?;
        let worst = [&sol.recurrence_residual, &sol.flow_residual_a, &sol.flow_residual_b]
            .into_iter()
            .fold(d.selected_residual, |m, v| m.max(v.to_f64_lossy().abs()));
        r = r.residual(worst, cfg.window).value(
            "family_check",
            json!({
                "A": a, "B": b, "m": cfg.m, "form": cfg.form,
                "recurrence_residual": sol.recurrence_residual.to_json(),
                "flow_residual_a": sol.flow_residual_a.to_json(),
                "flow_residual_b": sol.flow_residual_b.to_json(),
            }),
        );
    }
    Ok(r)
}
