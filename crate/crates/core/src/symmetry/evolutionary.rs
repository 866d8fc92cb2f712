use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{EquationReport, Formalism, SolutionSampler, SymmetryError, SymmetryReport};
use crate::expr::{parse_expression, EvalContext, EvalError, NodeVar};
use crate::lattice::{Field, Offset, SchemeEquation};
use crate::scalar::Scalar;

/// Read access to a field restricted to a declared stencil around a base node.
pub struct StencilView<'a, S> {
    name: &'a str,
    field: &'a Field<S>,
    base: (i64, i64),
    stencil: &'a [Offset],
    params: &'a BTreeMap<String, S>,
}

impl<'a, S: Scalar> StencilView<'a, S> {
    fn locate(&self, o: Offset) -> Result<(i64, i64), SymmetryError> {
        if !self.stencil.contains(&o) {
            return Err(SymmetryError::UndeclaredOffset { name: self.name.to_string(), offset: o });
        }
        Ok((self.base.0 + o.ds, self.base.1 + o.dt))
    }

    pub fn u(&self, ds: i64, dt: i64) -> Result<S, SymmetryError> {
        let (s, t) = self.locate(Offset::new(ds, dt))?;
        Ok(self.field.get(s, t)?.clone())
    }

    pub fn x(&self, ds: i64, dt: i64) -> Result<S, SymmetryError> {
        let (s, t) = self.locate(Offset::new(ds, dt))?;
        Ok(self.field.x(s, t)?.clone())
    }

    pub fn t(&self, ds: i64, dt: i64) -> Result<S, SymmetryError> {
        let (s, t) = self.locate(Offset::new(ds, dt))?;
        Ok(self.field.t(s, t)?.clone())
    }

    /// Coordinates of the base node; always readable.
    pub fn base_coordinates(&self) -> Result<(S, S), SymmetryError> {
        let (s, t) = self.base;
        Ok((self.field.x(s, t)?.clone(), self.field.t(s, t)?.clone()))
    }

    pub fn sigma_x(&self) -> S {
        self.field.grid().sigma_x().clone()
    }

    pub fn sigma_t(&self) -> S {
        self.field.grid().sigma_t().clone()
    }
}

impl<S: Scalar> EvalContext<S> for StencilView<'_, S> {
    fn node(&self, var: NodeVar, offset: Offset) -> Result<S, EvalError> {
        let r = match var {
            NodeVar::U => self.u(offset.ds, offset.dt),
            NodeVar::X => self.x(offset.ds, offset.dt),
            NodeVar::T => self.t(offset.ds, offset.dt),
        };
        r.map_err(|e| EvalError::Node(offset, e.to_string()))
    }

    fn param(&self, name: &str) -> Option<S> {
        match name {
            "sigma_x" => Some(self.sigma_x()),
            "sigma_t" => Some(self.sigma_t()),
            _ => self.params.get(name).cloned(),
        }
    }
}

pub type CharacteristicFn<S> = Arc<dyn Fn(&StencilView<S>) -> Result<S, SymmetryError> + Send + Sync>;

/// `Q ∂_u` where `Q` reads `(x, t, u)` at a declared finite stencil.
#[derive(Clone)]
pub struct EvolutionaryCharacteristic<S> {
    name: String,
    stencil: Vec<Offset>,
    q: CharacteristicFn<S>,
    params: Arc<BTreeMap<String, S>>,
}

impl<S> fmt::Debug for EvolutionaryCharacteristic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolutionaryCharacteristic").field("name", &self.name).field("stencil", &self.stencil).finish()
    }
}

impl<S: Scalar> EvolutionaryCharacteristic<S> {
    pub fn new(name: impl Into<String>, stencil: Vec<Offset>, q: CharacteristicFn<S>) -> Self {
        EvolutionaryCharacteristic { name: name.into(), stencil, q, params: Arc::new(BTreeMap::new()) }
    }

    /// Parses an expression such as `u[1,0] - u`; its stencil is the set of
    /// offsets it mentions. `sigma_x`, `sigma_t` come from the grid.
    pub fn from_source(name: impl Into<String>, src: &str, params: BTreeMap<String, S>) -> Result<Self, SymmetryError> {
        let e = parse_expression(src)?;
        let mut known: Vec<&str> = params.keys().map(String::as_str).collect();
        known.extend(["sigma_x", "sigma_t"]);
        e.check_params(&known, src)?;
        let stencil = e.stencil();
        let q: CharacteristicFn<S> = Arc::new(move |v: &StencilView<S>| Ok(e.eval(v)?));
        Ok(EvolutionaryCharacteristic { name: name.into(), stencil, q, params: Arc::new(params) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stencil(&self) -> &[Offset] {
        &self.stencil
    }

    /// Evaluates `Q` at base index `(s, t)` of `f`.
    pub fn eval_at(&self, f: &Field<S>, s: i64, t: i64) -> Result<S, SymmetryError> {
        let view = StencilView { name: &self.name, field: f, base: (s, t), stencil: &self.stencil, params: &self.params };
        (self.q)(&view)
    }
}

/// `Q` evaluated as a field on the window where its stencil fits.
pub fn characteristic_field<S: Scalar>(q: &EvolutionaryCharacteristic<S>, f: &Field<S>) -> Result<Field<S>, SymmetryError> {
    let mut with_base = q.stencil().to_vec();
    with_base.push(Offset::new(0, 0));
    let w = f.window().stencil_window(&with_base);
    if w.is_empty() {
        return Err(SymmetryError::StencilExceedsWindow { name: q.name().into(), window: f.window() });
    }
    Field::try_from_fn_par(f.grid_arc().clone(), w, |s, t| q.eval_at(f, s, t))
}

/// Explicit Euler step `u ← u + dλ·Q`; coordinates are unchanged.
pub fn flow_step<S: Scalar>(q: &EvolutionaryCharacteristic<S>, f: &Field<S>, dlambda: &S) -> Result<Field<S>, SymmetryError> {
    let qf = characteristic_field(q, f)?;
    Ok(f.combine(&S::one(), &qf, dlambda)?)
}

/// Evaluates `Σ_i (T^{o_i} Q) ∂E/∂u_i` over sampled solutions.
pub fn verify_evolutionary_symmetry<S: Scalar>(
    q: &EvolutionaryCharacteristic<S>,
    s: &SchemeEquation<S>,
    sampler: &dyn SolutionSampler<S>,
    tol: f64,
) -> Result<SymmetryReport, SymmetryError> {
    let per_sample = (0..sampler.count())
        .into_par_iter()
        .map(|i| {
            let f = sampler.sample(i)?;
            let qf = characteristic_field(q, &f)?;
            let w = s.valid_window(&qf.window());
            if w.is_empty() {
                return Err(SymmetryError::StencilExceedsWindow { name: q.name().into(), window: f.window() });
            }
            let mut rep = EquationReport::empty(s.name());
            for (p, r) in w.indices() {
                let nodes = s.gather(&f, p, r)?;
                let partials = s.partials(&nodes);
                let mut acc = S::zero();
                for (o, d) in s.offsets().iter().zip(&partials) {
                    acc = acc + qf.get(p + o.ds, r + o.dt)?.clone() * d[2].clone();
                }
                rep.max_abs_residual = rep.max_abs_residual.max(acc.abs().to_f64_lossy());
                rep.max_scheme_residual = rep.max_scheme_residual.max(s.eval(&nodes).abs().to_f64_lossy());
                rep.points_evaluated += 1;
            }
            Ok(vec![rep])
        })
        .collect::<Result<Vec<_>, SymmetryError>>()?;
    Ok(SymmetryReport::assemble(
        q.name(),
        Formalism::Evolutionary,
        sampler.describe(),
        sampler.seed(),
        S::MODE,
        tol,
        per_sample,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeGrid, Window};

    fn field() -> Field<f64> {
        let g = Arc::new(LatticeGrid::heat(Window::new((0, 6), (0, 3)), 0.5, 1.0, 0.0, 0.0).unwrap());
        Field::from_fn(g, |m, n, _, _| (m * m + 3 * n) as f64)
    }

    #[test]
    fn undeclared_offsets_are_rejected() {
        let sneaky: EvolutionaryCharacteristic<f64> = EvolutionaryCharacteristic::new(
            "sneaky",
            vec![Offset::new(0, 0)],
            Arc::new(|v: &StencilView<f64>| v.u(1, 0)),
        );
        let err = characteristic_field(&sneaky, &field()).unwrap_err();
        assert!(matches!(err, SymmetryError::UndeclaredOffset { .. }));
    }

    #[test]
    fn zero_and_scaling_flows() {
        let f = field();
        let zero = EvolutionaryCharacteristic::<f64>::from_source("0", "0", BTreeMap::new()).unwrap();
        assert_eq!(flow_step(&zero, &f, &0.1).unwrap(), f);
        let w = EvolutionaryCharacteristic::<f64>::from_source("W", "u", BTreeMap::new()).unwrap();
        let g = flow_step(&w, &f, &0.25).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            assert_eq!(*a, b * 1.25);
        }
    }

    #[test]
    fn expression_stencils_shrink_the_window() {
        let f = field();
        let q = EvolutionaryCharacteristic::<f64>::from_source("P1", "(u[1,0]-u)/sigma_x", BTreeMap::new()).unwrap();
        let qf = characteristic_field(&q, &f).unwrap();
        assert_eq!(qf.window(), Window::new((0, 5), (0, 3)));
        assert_eq!(*qf.get(2, 1).unwrap(), 10.0);
    }
}
