use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::{Field, LatticeError, Offset, Window};
use crate::scalar::Scalar;

/// Values `(x, t, u)` at one stencil point.
#[derive(Debug, Clone, PartialEq)]
pub struct Node<S> {
    pub x: S,
    pub t: S,
    pub u: S,
}

impl<S> Node<S> {
    pub fn new(x: S, t: S, u: S) -> Self {
        Node { x, t, u }
    }
}

pub type ResidualFn<S> = Arc<dyn Fn(&[Node<S>]) -> S + Send + Sync>;
/// Returns `[∂E/∂x_i, ∂E/∂t_i, ∂E/∂u_i]` for each stencil point `i`.
pub type PartialsFn<S> = Arc<dyn Fn(&[Node<S>]) -> Vec<[S; 3]> + Send + Sync>;

/// A stencil residual `E(nodes)` with optional analytic partial derivatives.
#[derive(Clone)]
pub struct SchemeEquation<S> {
    name: String,
    offsets: Vec<Offset>,
    residual: ResidualFn<S>,
    partials: Option<PartialsFn<S>>,
}

impl<S> fmt::Debug for SchemeEquation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeEquation")
            .field("name", &self.name)
            .field("offsets", &self.offsets)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl<S: Scalar> SchemeEquation<S> {
    pub fn new(name: impl Into<String>, offsets: Vec<Offset>, residual: ResidualFn<S>) -> Self {
        SchemeEquation { name: name.into(), offsets, residual, partials: None }
    }

    pub fn with_partials(mut self, partials: PartialsFn<S>) -> Self {
        self.partials = Some(partials);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    /// The residual without any registered partials.
    pub fn residual_fn(&self) -> ResidualFn<S> {
        self.residual.clone()
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn eval(&self, nodes: &[Node<S>]) -> S {
        (self.residual)(nodes)
    }

    /// Analytic partials if registered, otherwise central differences with
    /// step `h = 1e-6·max(1, |value|)`.
    pub fn partials(&self, nodes: &[Node<S>]) -> Vec<[S; 3]> {
        if let Some(p) = &self.partials {
            return p(nodes);
        }
        let mut work = nodes.to_vec();
        let mut out = Vec::with_capacity(nodes.len());
        for i in 0..nodes.len() {
            let mut d: [S; 3] = [S::zero(), S::zero(), S::zero()];
            for (k, slot) in d.iter_mut().enumerate() {
                let original = component(&nodes[i], k).clone();
                let h = S::from_f64_checked(1e-6 * original.to_f64_lossy().abs().max(1.0))
                    .unwrap_or_else(|_| S::one());
                *component_mut(&mut work[i], k) = original.clone() + h.clone();
                let plus = self.eval(&work);
                *component_mut(&mut work[i], k) = original.clone() - h.clone();
                let minus = self.eval(&work);
                *component_mut(&mut work[i], k) = original;
                *slot = (plus - minus) / (h.clone() + h);
            }
            out.push(d);
        }
        out
    }

    /// Indices whose whole stencil lands inside `window`.
    pub fn valid_window(&self, window: &Window) -> Window {
        window.stencil_window(&self.offsets)
    }

    /// Stencil nodes of `f` at base index `(s, t)`.
    pub fn gather(&self, f: &Field<S>, s: i64, t: i64) -> Result<Vec<Node<S>>, LatticeError> {
        self.offsets
            .iter()
            .map(|o| {
                let (ps, pt) = (s + o.ds, t + o.dt);
                Ok(Node::new(f.x(ps, pt)?.clone(), f.t(ps, pt)?.clone(), f.get(ps, pt)?.clone()))
            })
            .collect()
    }
}

fn component<S>(n: &Node<S>, k: usize) -> &S {
    match k {
        0 => &n.x,
        1 => &n.t,
        _ => &n.u,
    }
}

fn component_mut<S>(n: &mut Node<S>, k: usize) -> &mut S {
    match k {
        0 => &mut n.x,
        1 => &mut n.t,
        _ => &mut n.u,
    }
}

/// Residual field plus its max-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResidual<S> {
    pub field: Field<S>,
    pub max_abs: S,
}

/// Evaluates `s` at every index of its valid window inside `f`.
pub fn scheme_residual<S: Scalar>(s: &SchemeEquation<S>, f: &Field<S>) -> Result<SchemeResidual<S>, LatticeError> {
    let w = s.valid_window(&f.window());
    if w.is_empty() {
        return Err(LatticeError::WindowTooSmall {
            window: f.window(),
            needed: format!("the stencil of `{}`", s.name()),
        });
    }
    let idx: Vec<(i64, i64)> = w.indices().collect();
    let values = idx
        .par_iter()
        .map(|&(a, b)| s.gather(f, a, b).map(|nodes| s.eval(&nodes)))
        .collect::<Result<Vec<S>, LatticeError>>()?;
    let field = Field::new(f.grid_arc().clone(), w, values)?;
    let max_abs = field.max_abs();
    Ok(SchemeResidual { field, max_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGrid;

    #[test]
    fn numeric_partials_match_hand_derivatives() {
        let e = SchemeEquation::<f64>::new(
            "test",
            vec![Offset::new(0, 0), Offset::new(1, 0)],
            Arc::new(|n: &[Node<f64>]| n[0].u * n[1].x * n[1].x + n[0].t.exp()),
        );
        let nodes = vec![Node::new(0.3, 0.2, 1.5), Node::new(2.0, -1.0, 4.0)];
        let p = e.partials(&nodes);
        assert!((p[0][2] - 4.0).abs() < 1e-8);
        assert!((p[1][0] - 2.0 * 1.5 * 2.0).abs() < 1e-7);
        assert!((p[0][1] - 0.2f64.exp()).abs() < 1e-8);
        assert!(p[1][2].abs() < 1e-12);
    }

    #[test]
    fn residual_reports_window_and_norm() {
        let g = Arc::new(LatticeGrid::heat(Window::new((0, 5), (0, 3)), 1.0, 1.0, 0.0, 0.0).unwrap());
        let f = Field::from_fn(g, |m, n, _, _| (m * n) as f64);
        let e = SchemeEquation::new(
            "dt",
            vec![Offset::new(0, 0), Offset::new(0, 1)],
            Arc::new(|n: &[Node<f64>]| n[1].u - n[0].u),
        );
        let r = scheme_residual(&e, &f).unwrap();
        assert_eq!(r.field.window(), Window::new((0, 5), (0, 2)));
        assert_eq!(r.max_abs, 5.0);
        let tiny = f.restrict(Window::new((0, 5), (1, 1))).unwrap();
        assert!(scheme_residual(&e, &tiny).is_err());
    }
}
