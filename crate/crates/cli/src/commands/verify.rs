//! `verify`: sampled point and evolutionary symmetry checks, and commuting
//! flow order tests.

use std::str::FromStr;

use latsym::heat::{heat_flow_commutator, point_field, point_to_characteristic, HeatSampler, HeatScheme, HeatVariant, PointBuiltin};
use latsym::symmetry::{
    estimate_order, heat_operator, verify_evolutionary_symmetry, verify_point_symmetry, EvolutionaryCharacteristic, HeatOperator,
    OrderEstimate, OrderKind, PointVectorField, SolutionSampler, SymmetryReport, Verdict,
};
use latsym::toda::{commutation_order, random_ab_state, DttlPointBuiltin, DttlSampler, DttlScheme, FlowKind, StepOptions};
use latsym::{ArithmeticMode, Scalar};
use num_rational::BigRational;
use serde::Serialize;

use super::{expression_params, real, require_json, scalar};
use crate::config::{Formalism, RunConfig, SchemeKind};
use crate::error::CliError;
use crate::output::{Outcome, Status};

/// Smallest measured commutator order accepted for a commuting flow.
pub const REQUIRED_ORDER: f64 = 1.9;
const ORDER_FLOOR: f64 = 1e-13;
const AB_AMPLITUDE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowReport {
    pub symmetry: String,
    pub formalism: &'static str,
    pub scheme: SchemeKind,
    pub seed: u64,
    pub required_order: f64,
    pub estimate: OrderEstimate,
    pub verdict: Verdict,
}

impl FlowReport {
    fn new(cfg: &RunConfig, estimate: OrderEstimate) -> Self {
        let pass = match estimate.kind {
            OrderKind::Exact => true,
            OrderKind::Measured => estimate.order.is_some_and(|p| p >= REQUIRED_ORDER),
        };
        FlowReport {
            symmetry: cfg.symmetry.clone(),
            formalism: "commuting_flow",
            scheme: cfg.scheme,
            seed: cfg.seed,
            required_order: REQUIRED_ORDER,
            estimate,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    require_json(cfg)?;
    match cfg.scheme {
        SchemeKind::Heat => match cfg.mode {
            Formalism::Point => double_only(cfg, heat_point(cfg)),
            Formalism::Evolutionary if is_point_only_builtin(&cfg.symmetry) => double_only(cfg, heat_builtin_evolutionary(cfg)),
            Formalism::Evolutionary => match cfg.arithmetic {
                ArithmeticMode::Double => report_outcome(heat_evolutionary::<f64>(cfg)?),
                ArithmeticMode::Rational => report_outcome(heat_evolutionary::<BigRational>(cfg)?),
            },
            Formalism::Flow => double_only(cfg, heat_flow(cfg)),
        },
        SchemeKind::Dttl => match cfg.symmetry.trim().to_ascii_lowercase().as_str() {
            "isospectral" => double_only(cfg, dttl_flow(cfg, FlowKind::Isospectral)),
            "nonisospectral" => double_only(cfg, dttl_flow(cfg, FlowKind::Nonisospectral)),
            _ if cfg.mode == Formalism::Point => double_only(cfg, dttl_point(cfg)),
            _ => Err(CliError::Usage(
                "dttl supports point symmetries and the flows `isospectral` and `nonisospectral`".into(),
            )),
        },
    }
}

fn double_only(cfg: &RunConfig, r: Result<Outcome, CliError>) -> Result<Outcome, CliError> {
    let o = r?;
    Ok(if cfg.arithmetic == ArithmeticMode::Rational { o.with_note("this check runs in double arithmetic") } else { o })
}

fn report_outcome(r: SymmetryReport) -> Result<Outcome, CliError> {
    Outcome::json(Status::from_pass(r.verdict == Verdict::Pass), r)
}

fn flow_outcome(r: FlowReport) -> Result<Outcome, CliError> {
    Outcome::json(Status::from_pass(r.verdict == Verdict::Pass), r)
}

/// Heat builtins with no counterpart among the evolutionary operators.
fn is_point_only_builtin(name: &str) -> bool {
    HeatOperator::from_str(name).is_err() && PointBuiltin::from_str(name).is_ok()
}

pub fn heat_scheme<S: Scalar>(cfg: &RunConfig) -> Result<HeatScheme<S>, CliError> {
    Ok(HeatScheme::from_c(scalar::<S>("c", &cfg.c)?, scalar::<S>("sigma-x", &cfg.sigma_x)?)?)
}

/// A builtin name, or `xi_x = ...; xi_t = ...; phi = ...`.
fn point_vector_field(cfg: &RunConfig, builtin: impl Fn(&str) -> Option<PointVectorField>) -> Result<PointVectorField, CliError> {
    if cfg.symmetry.contains('=') {
        let mut params = expression_params::<f64>(cfg)?;
        params.insert("sigma_x".into(), real("sigma-x", &cfg.sigma_x)?);
        params.insert("sigma_t".into(), real("sigma-t", &cfg.sigma_t)?);
        return Ok(PointVectorField::from_source(cfg.symmetry.trim(), &cfg.symmetry, params)?);
    }
    builtin(&cfg.symmetry).ok_or_else(|| {
        CliError::Usage(format!("`{}` is neither a builtin nor a field `xi_x = ...; xi_t = ...; phi = ...`", cfg.symmetry))
    })
}

fn heat_point(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scheme = heat_scheme::<f64>(cfg)?;
    let (sx, st) = (*scheme.sigma_x(), *scheme.sigma_t());
    let x = point_vector_field(cfg, |s| PointBuiltin::from_str(s).ok().map(|b| point_field(b, sx, st)))?;
    let sampler = HeatSampler::new(scheme.clone(), cfg.width, cfg.steps, cfg.samples, cfg.seed);
    let system = scheme.with_variant(HeatVariant::PointForm).system();
    report_outcome(verify_point_symmetry(&x, &system, &sampler, cfg.tol)?)
}

fn heat_builtin_evolutionary(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scheme = heat_scheme::<f64>(cfg)?;
    let b = PointBuiltin::from_str(&cfg.symmetry)?;
    let q = point_to_characteristic(&point_field(b, *scheme.sigma_x(), *scheme.sigma_t()));
    let sampler = HeatSampler::new(scheme.clone(), cfg.width, cfg.steps, cfg.samples, cfg.seed);
    report_outcome(verify_evolutionary_symmetry(&q, &scheme.equation(), &sampler, cfg.tol)?)
}

/// One of P0, P1, W, B, D, K, or an expression in shifted `u`, `x`, `t`.
pub fn heat_characteristic<S: Scalar>(cfg: &RunConfig, scheme: &HeatScheme<S>) -> Result<EvolutionaryCharacteristic<S>, CliError> {
    match HeatOperator::from_str(&cfg.symmetry) {
        Ok(op) => Ok(heat_operator(op, scheme.sigma_x(), scheme.sigma_t()).to_characteristic()),
        Err(_) => Ok(EvolutionaryCharacteristic::from_source(cfg.symmetry.trim(), &cfg.symmetry, expression_params::<S>(cfg)?)?),
    }
}

fn heat_evolutionary<S: Scalar>(cfg: &RunConfig) -> Result<SymmetryReport, CliError> {
    let scheme = heat_scheme::<S>(cfg)?;
    let q = heat_characteristic(cfg, &scheme)?;
    let sampler = HeatSampler::new(scheme.clone(), cfg.width, cfg.steps, cfg.samples, cfg.seed);
    Ok(verify_evolutionary_symmetry(&q, &scheme.equation(), &sampler, cfg.tol)?)
}

/// Step-then-flow against flow-then-step on one sampled heat solution.
fn heat_flow(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scheme = heat_scheme::<f64>(cfg)?;
    let q = heat_characteristic(cfg, &scheme)?;
    let f = HeatSampler::new(scheme.clone(), cfg.width, cfg.steps, 1, cfg.seed).sample(0)?;
    let steps: Vec<f64> = (0..cfg.levels).map(|k| cfg.eps / 2f64.powi(k as i32)).collect();
    let errors = steps.iter().map(|h| heat_flow_commutator(&q, &f, scheme.c(), h)).collect::<Result<Vec<_>, _>>()?;
    flow_outcome(FlowReport::new(cfg, estimate_order(&steps, &errors, ORDER_FLOOR)))
}

pub fn dttl_scheme(cfg: &RunConfig) -> Result<DttlScheme, CliError> {
    Ok(DttlScheme::new(real("alpha", &cfg.alpha)?, real("sigma-x", &cfg.sigma_x)?, real("sigma-t", &cfg.sigma_t)?)?)
}

fn dttl_point(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scheme = dttl_scheme(cfg)?;
    let x = point_vector_field(cfg, |s| DttlPointBuiltin::from_str(s).ok().map(DttlPointBuiltin::field))?;
    let sampler = DttlSampler::new(scheme, cfg.width, cfg.steps, cfg.samples, cfg.seed);
    report_outcome(verify_point_symmetry(&x, &scheme.system(), &sampler, cfg.tol)?)
}

/// Euler step of the flow against one Toda step, on a random a/b state
/// supported on `[0, width − 1]`.
fn dttl_flow(cfg: &RunConfig, kind: FlowKind) -> Result<Outcome, CliError> {
    let alpha = real("alpha", &cfg.alpha)?;
    let state = random_ab_state(cfg.seed, cfg.m, 0, cfg.width, AB_AMPLITUDE)?;
    let opts = StepOptions { tail: cfg.tail, ..StepOptions::default() };
    flow_outcome(FlowReport::new(cfg, commutation_order(&state, alpha, kind, cfg.eps, cfg.levels, opts)?))
}
