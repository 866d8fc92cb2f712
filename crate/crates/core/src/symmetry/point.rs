use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{EquationReport, Formalism, SolutionSampler, SymmetryError, SymmetryReport};
use crate::expr::{parse_point_field, EvalContext, EvalError, Expr, NodeVar};
use crate::lattice::{Node, Offset, SchemeEquation};
use crate::scalar::ArithmeticMode;

pub type PointFn = Arc<dyn Fn(&Node<f64>) -> Result<f64, EvalError> + Send + Sync>;

/// `ξ_x ∂_x + ξ_t ∂_t + φ ∂_u` with coefficients that read one node only.
#[derive(Clone)]
pub struct PointVectorField {
    name: String,
    xi_x: PointFn,
    xi_t: PointFn,
    phi: PointFn,
}

impl fmt::Debug for PointVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointVectorField").field("name", &self.name).finish()
    }
}

struct NodeCtx<'a> {
    node: &'a Node<f64>,
    params: &'a BTreeMap<String, f64>,
}

impl EvalContext<f64> for NodeCtx<'_> {
    fn node(&self, var: NodeVar, offset: Offset) -> Result<f64, EvalError> {
        if offset != Offset::new(0, 0) {
            return Err(EvalError::Node(offset, "point field coefficients are local".into()));
        }
        Ok(match var {
            NodeVar::X => self.node.x,
            NodeVar::T => self.node.t,
            NodeVar::U => self.node.u,
        })
    }

    fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

impl PointVectorField {
    pub fn new(name: impl Into<String>, xi_x: PointFn, xi_t: PointFn, phi: PointFn) -> Self {
        PointVectorField { name: name.into(), xi_x, xi_t, phi }
    }

    /// Builds a field from closures that cannot fail.
    pub fn from_fns<A, B, C>(name: impl Into<String>, xi_x: A, xi_t: B, phi: C) -> Self
    where
        A: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        PointVectorField::new(
            name,
            Arc::new(move |n: &Node<f64>| Ok(xi_x(n.x, n.t, n.u))),
            Arc::new(move |n: &Node<f64>| Ok(xi_t(n.x, n.t, n.u))),
            Arc::new(move |n: &Node<f64>| Ok(phi(n.x, n.t, n.u))),
        )
    }

    /// Parses `xi_x = ...; xi_t = ...; phi = ...`; identifiers other than
    /// x, t, u must be keys of `params`.
    pub fn from_source(name: impl Into<String>, src: &str, params: BTreeMap<String, f64>) -> Result<Self, SymmetryError> {
        let pf = parse_point_field(src)?;
        let known: Vec<&str> = params.keys().map(String::as_str).collect();
        for e in [&pf.xi_x, &pf.xi_t, &pf.phi] {
            e.check_params(&known, src)?;
        }
        let params = Arc::new(params);
        let wrap = |e: Expr| -> PointFn {
            let params = params.clone();
            Arc::new(move |n: &Node<f64>| e.eval(&NodeCtx { node: n, params: &params }))
        };
        Ok(PointVectorField::new(name, wrap(pf.xi_x), wrap(pf.xi_t), wrap(pf.phi)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coefficients(&self, n: &Node<f64>) -> Result<[f64; 3], EvalError> {
        Ok([(self.xi_x)(n)?, (self.xi_t)(n)?, (self.phi)(n)?])
    }

    /// `λ·X`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let s = |f: &PointFn| -> PointFn {
            let f = f.clone();
            Arc::new(move |n: &Node<f64>| f(n).map(|v| lambda * v))
        };
        PointVectorField {
            name: format!("{}*{}", lambda, self.name),
            xi_x: s(&self.xi_x),
            xi_t: s(&self.xi_t),
            phi: s(&self.phi),
        }
    }
}

/// The prolongation of a point field applied to one scheme equation.
#[derive(Clone, Debug)]
pub struct ProlongedAction {
    field: PointVectorField,
    scheme: SchemeEquation<f64>,
}

impl ProlongedAction {
    /// `Σ_i [ξ_x(P_i) ∂E/∂x_i + ξ_t(P_i) ∂E/∂t_i + φ(P_i) ∂E/∂u_i]`.
    pub fn eval(&self, nodes: &[Node<f64>]) -> Result<f64, EvalError> {
        let partials = self.scheme.partials(nodes);
        let mut acc = 0.0;
        for (n, d) in nodes.iter().zip(&partials) {
            let c = self.field.coefficients(n)?;
            acc += c[0] * d[0] + c[1] * d[1] + c[2] * d[2];
        }
        Ok(acc)
    }

    pub fn scheme(&self) -> &SchemeEquation<f64> {
        &self.scheme
    }
}

pub fn prolong_point_field(x: &PointVectorField, s: &SchemeEquation<f64>) -> ProlongedAction {
    ProlongedAction { field: x.clone(), scheme: s.clone() }
}

/// Evaluates the prolonged action of `x` on every equation of `system` over
/// every sampled configuration.
pub fn verify_point_symmetry(
    x: &PointVectorField,
    system: &[SchemeEquation<f64>],
    sampler: &dyn SolutionSampler<f64>,
    tol: f64,
) -> Result<SymmetryReport, SymmetryError> {
    let actions: Vec<ProlongedAction> = system.iter().map(|s| prolong_point_field(x, s)).collect();
    let per_sample = (0..sampler.count())
        .into_par_iter()
        .map(|i| {
            let f = sampler.sample(i)?;
            actions
                .iter()
                .map(|a| {
                    let s = a.scheme();
                    let w = s.valid_window(&f.window());
                    if w.is_empty() {
                        return Err(SymmetryError::StencilExceedsWindow { name: s.name().into(), window: f.window() });
                    }
                    let mut rep = EquationReport::empty(s.name());
                    for (p, q) in w.indices() {
                        let nodes = s.gather(&f, p, q)?;
                        rep.max_abs_residual = rep.max_abs_residual.max(a.eval(&nodes)?.abs());
                        rep.max_scheme_residual = rep.max_scheme_residual.max(s.eval(&nodes).abs());
                        rep.points_evaluated += 1;
                    }
                    Ok(rep)
                })
                .collect::<Result<Vec<_>, SymmetryError>>()
        })
        .collect::<Result<Vec<_>, SymmetryError>>()?;
    Ok(SymmetryReport::assemble(
        x.name(),
        Formalism::Point,
        sampler.describe(),
        sampler.seed(),
        ArithmeticMode::Double,
        tol,
        per_sample,
    ))
}
