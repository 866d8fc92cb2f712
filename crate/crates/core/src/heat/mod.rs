//! The forward discrete heat scheme `u(m,n+1) − u = c (u(m+2) − 2u(m+1) + u)`,
//! its point-form counterpart on a moving lattice, and their reductions.

mod builtins;
pub mod dilation;
pub(crate) mod sampler;
pub mod translation;
pub mod ztransform;

pub use builtins::{point_field, point_to_characteristic, PointBuiltin};
pub use sampler::HeatSampler;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Field, LatticeError, LatticeGrid, Node, Offset, SchemeEquation, Window};
use crate::scalar::{int, Scalar};
use crate::symmetry::{characteristic_field, flow_step, EvolutionaryCharacteristic, SymmetryError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeatError {
    #[error("initial row has {got} cells; {steps} steps need at least {needed}")]
    RowTooShort { got: usize, steps: usize, needed: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("A·a·c = {0} is not an integer, so the reduced equation does not live on a lattice; pass a bracket to solve for the exponent")]
    NonLatticeReduction(f64),
    #[error("no real root v > 0 of the exponent condition for k = {k}, c = {c}")]
    NoPositiveRoot { k: i64, c: f64 },
    #[error("n = {n} does not exceed n0 = {n0}")]
    TimeNotAfterOrigin { n: i64, n0: i64 },
    #[error("1 + a·σx = {0} must be positive for the real exponential form")]
    NonPositiveBase(f64),
    #[error("recurrence violated at N = {big_n}, n = {n}: {lhs} != {rhs}")]
    RecurrenceViolation { big_n: i64, n: i64, lhs: String, rhs: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeatVariant {
    /// `Δt u = Δxx u` with forward differences on a fixed lattice.
    Forward,
    /// Difference quotients built from the node coordinates, paired with the
    /// lattice equations.
    PointForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatScheme<S> {
    c: S,
    sigma_x: S,
    sigma_t: S,
    variant: HeatVariant,
}

impl<S: Scalar> HeatScheme<S> {
    /// `c = σt / σx²`.
    pub fn new(sigma_x: S, sigma_t: S) -> Result<Self, HeatError> {
        if sigma_x <= S::zero() || sigma_t <= S::zero() {
            return Err(HeatError::InvalidParameter("σx and σt must be positive".into()));
        }
        let c = sigma_t.clone() / (sigma_x.clone() * sigma_x.clone());
        Ok(HeatScheme { c, sigma_x, sigma_t, variant: HeatVariant::Forward })
    }

    /// `σt = c σx²`.
    pub fn from_c(c: S, sigma_x: S) -> Result<Self, HeatError> {
        if c <= S::zero() {
            return Err(HeatError::InvalidParameter("c must be positive".into()));
        }
        let sigma_t = c * sigma_x.clone() * sigma_x.clone();
        Self::new(sigma_x, sigma_t)
    }

    pub fn with_variant(mut self, variant: HeatVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn c(&self) -> &S {
        &self.c
    }

    pub fn sigma_x(&self) -> &S {
        &self.sigma_x
    }

    pub fn sigma_t(&self) -> &S {
        &self.sigma_t
    }

    pub fn variant(&self) -> HeatVariant {
        self.variant
    }

    pub fn grid(&self, window: Window, x0: S, t0: S) -> Result<LatticeGrid<S>, HeatError> {
        Ok(LatticeGrid::heat(window, self.sigma_x.clone(), self.c.clone(), x0, t0)?)
    }

    /// The scheme equation of this variant.
    pub fn equation(&self) -> SchemeEquation<S> {
        match self.variant {
            HeatVariant::Forward => forward_equation(self.c.clone()),
            HeatVariant::PointForm => point_form_equation(),
        }
    }

    /// The scheme equation together with the lattice equations (point form
    /// only; the forward scheme lives on a fixed lattice).
    pub fn system(&self) -> Vec<SchemeEquation<S>> {
        match self.variant {
            HeatVariant::Forward => vec![self.equation()],
            HeatVariant::PointForm => {
                let mut v = vec![self.equation()];
                v.extend(lattice_equations(self.c.clone()));
                v
            }
        }
    }
}

const HEAT_STENCIL: [Offset; 4] = [Offset::new(0, 0), Offset::new(0, 1), Offset::new(1, 0), Offset::new(2, 0)];

/// `u(m,n+1) − u − c (u(m+2,n) − 2u(m+1,n) + u)` on `[(0,0), (0,1), (1,0), (2,0)]`.
pub fn forward_equation<S: Scalar>(c: S) -> SchemeEquation<S> {
    let cc = c.clone();
    SchemeEquation::new(
        "heat",
        HEAT_STENCIL.to_vec(),
        Arc::new(move |n: &[Node<S>]| {
            n[1].u.clone() - n[0].u.clone()
                - cc.clone() * (n[3].u.clone() - int::<S>(2) * n[2].u.clone() + n[0].u.clone())
        }),
    )
    .with_partials(Arc::new(move |_n: &[Node<S>]| {
        let z = S::zero;
        vec![
            [z(), z(), -S::one() - c.clone()],
            [z(), z(), S::one()],
            [z(), z(), int::<S>(2) * c.clone()],
            [z(), z(), -c.clone()],
        ]
    }))
}

/// `(u(n+1) − u)/(t(n+1) − t) − (u(m+2) − 2u(m+1) + u)/(x(m+1) − x)²` with
/// analytic partials in every node variable.
pub fn point_form_equation<S: Scalar>() -> SchemeEquation<S> {
    SchemeEquation::new(
        "heat-point-form",
        HEAT_STENCIL.to_vec(),
        Arc::new(|n: &[Node<S>]| {
            let dt = n[1].t.clone() - n[0].t.clone();
            let dx = n[2].x.clone() - n[0].x.clone();
            let l = n[3].u.clone() - int::<S>(2) * n[2].u.clone() + n[0].u.clone();
            (n[1].u.clone() - n[0].u.clone()) / dt - l / (dx.clone() * dx)
        }),
    )
    .with_partials(Arc::new(|n: &[Node<S>]| {
        let z = S::zero;
        let dt = n[1].t.clone() - n[0].t.clone();
        let dx = n[2].x.clone() - n[0].x.clone();
        let dx2 = dx.clone() * dx.clone();
        let dx3 = dx2.clone() * dx;
        let du = n[1].u.clone() - n[0].u.clone();
        let l = n[3].u.clone() - int::<S>(2) * n[2].u.clone() + n[0].u.clone();
        let two_l_dx3 = int::<S>(2) * l / dx3;
        let du_dt2 = du / (dt.clone() * dt.clone());
        vec![
            [-two_l_dx3.clone(), du_dt2.clone(), -S::one() / dt.clone() - S::one() / dx2.clone()],
            [z(), -du_dt2, S::one() / dt],
            [two_l_dx3, z(), int::<S>(2) / dx2.clone()],
            [z(), z(), -S::one() / dx2],
        ]
    }))
}

/// `x(m+2) − 2x(m+1) + x`, `x(n+1) − x`, `t(m+1) − t`, `t(n+1) − t − c (x(m+1) − x)²`.
pub fn lattice_equations<S: Scalar>(c: S) -> Vec<SchemeEquation<S>> {
    let o = Offset::new;
    vec![
        SchemeEquation::new(
            "lattice-x-space",
            vec![o(0, 0), o(1, 0), o(2, 0)],
            Arc::new(|n: &[Node<S>]| n[2].x.clone() - int::<S>(2) * n[1].x.clone() + n[0].x.clone()),
        ),
        SchemeEquation::new(
            "lattice-x-time",
            vec![o(0, 0), o(0, 1)],
            Arc::new(|n: &[Node<S>]| n[1].x.clone() - n[0].x.clone()),
        ),
        SchemeEquation::new(
            "lattice-t-space",
            vec![o(0, 0), o(1, 0)],
            Arc::new(|n: &[Node<S>]| n[1].t.clone() - n[0].t.clone()),
        ),
        SchemeEquation::new(
            "lattice-t-time",
            vec![o(0, 0), o(0, 1), o(1, 0)],
            Arc::new(move |n: &[Node<S>]| {
                let dx = n[2].x.clone() - n[0].x.clone();
                n[1].t.clone() - n[0].t.clone() - c.clone() * dx.clone() * dx
            }),
        ),
    ]
}

/// Rows `0..=steps` of the explicit evolution; row `k` has `len − 2k` cells.
pub fn evolve_rows<S: Scalar>(row: &[S], steps: usize, c: &S) -> Result<Vec<Vec<S>>, HeatError> {
    let needed = 2 * steps + 1;
    if row.len() < needed {
        return Err(HeatError::RowTooShort { got: row.len(), steps, needed });
    }
    let two = int::<S>(2);
    let mut rows = vec![row.to_vec()];
    for _ in 0..steps {
        let r = rows.last().expect("at least one row");
        let next = (0..r.len() - 2)
            .map(|m| r[m].clone() + c.clone() * (r[m + 2].clone() - two.clone() * r[m + 1].clone() + r[m].clone()))
            .collect();
        rows.push(next);
    }
    Ok(rows)
}

/// Evolves a one-row field `steps` times. The output window keeps the cells
/// still defined after the last step: `[lo, hi − 2·steps] × [n0, n0 + steps]`.
pub fn heat_evolve<S: Scalar>(initial: &Field<S>, steps: usize, scheme: &HeatScheme<S>) -> Result<Field<S>, HeatError> {
    let w = initial.window();
    if w.height() != 1 {
        return Err(HeatError::InvalidParameter(format!("initial data must be a single row, got window {w}")));
    }
    let n0 = w.time.0;
    let row = initial.row(n0)?;
    let rows = evolve_rows(&row, steps, scheme.c())?;
    let out = Window::new((w.space.0, w.space.1 - 2 * steps as i64), (n0, n0 + steps as i64));
    let x0 = initial.x(w.space.0, n0)?.clone() - scheme.sigma_x().clone() * int::<S>(w.space.0);
    let t0 = initial.t(w.space.0, n0)?.clone() - scheme.sigma_t().clone() * int::<S>(n0);
    let grid = Arc::new(scheme.grid(out, x0, t0)?);
    Ok(Field::from_fn(grid, |s, t, _, _| rows[(t - n0) as usize][(s - w.space.0) as usize].clone()))
}

/// Advances a field one heat step on its whole window (the result loses two
/// columns on the right and the first row).
pub fn heat_step<S: Scalar>(f: &Field<S>, c: &S) -> Result<Field<S>, HeatError> {
    let w = f.window();
    let out = Window::new((w.space.0, w.space.1 - 2), (w.time.0 + 1, w.time.1 + 1));
    if out.is_empty() {
        return Err(LatticeError::EmptyWindow.into());
    }
    let g = f.grid();
    let grid = Arc::new(LatticeGrid::uniform(
        out,
        g.sigma_x().clone(),
        g.sigma_t().clone(),
        g.x0().clone(),
        g.t0().clone(),
        g.convention(),
    )?);
    let two = int::<S>(2);
    let values = out
        .indices()
        .map(|(m, n)| {
            let u = |dm: i64| f.get(m + dm, n - 1).cloned();
            Ok(u(0)? + c.clone() * (u(2)? - two.clone() * u(1)? + u(0)?))
        })
        .collect::<Result<Vec<_>, LatticeError>>()?;
    Ok(Field::new(grid, out, values)?)
}

/// `‖L(f + dλ Q f) − (Lf + dλ Q(Lf))‖∞` where `L` is one heat step: the
/// one-step commutator of the flow of `Q` with the scheme.
pub fn heat_flow_commutator<S: Scalar>(
    q: &EvolutionaryCharacteristic<S>,
    f: &Field<S>,
    c: &S,
    dlambda: &S,
) -> Result<S, HeatError> {
    let a = heat_step(&flow_step(q, f, dlambda)?, c)?;
    let lf = heat_step(f, c)?;
    let b = flow_step(q, &lf, dlambda)?;
    Ok(a.max_abs_diff(&b)?)
}

/// `‖L(Qf) − Q(Lf)‖∞`: exact commutation of a linear characteristic with the
/// heat step.
pub fn heat_operator_commutator<S: Scalar>(q: &EvolutionaryCharacteristic<S>, f: &Field<S>, c: &S) -> Result<S, HeatError> {
    let a = heat_step(&characteristic_field(q, f)?, c)?;
    let b = characteristic_field(q, &heat_step(f, c)?)?;
    Ok(a.max_abs_diff(&b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::symmetry::{heat_operator, HeatOperator};
    use num_rational::BigRational;

    fn row_field<S: Scalar>(vals: Vec<S>, scheme: &HeatScheme<S>) -> Field<S> {
        let w = Window::new((0, vals.len() as i64 - 1), (0, 0));
        let g = Arc::new(scheme.grid(w, S::zero(), S::zero()).unwrap());
        Field::from_fn(g, |m, _, _, _| vals[m as usize].clone())
    }

    #[test]
    fn constant_and_linear_rows_are_stationary() {
        let s = HeatScheme::from_c(0.4, 0.5).unwrap();
        let f = heat_evolve(&row_field(vec![3.0; 12], &s), 4, &s).unwrap();
        assert!(f.values().iter().all(|v| *v == 3.0));
        let f = heat_evolve(&row_field((0..12).map(|m| m as f64).collect(), &s), 4, &s).unwrap();
        for (m, n) in f.window().indices() {
            assert_eq!(*f.get(m, n).unwrap(), m as f64);
        }
    }

    #[test]
    fn geometric_row_evolves_to_product_form() {
        let s = HeatScheme::new(rat(1, 1), rat(1, 1)).unwrap();
        let two = rat(2, 1);
        let row: Vec<BigRational> = (0..14).map(|m| crate::scalar::powi(&two, m)).collect();
        let f = heat_evolve(&row_field(row, &s), 5, &s).unwrap();
        assert_eq!(f.window(), Window::new((0, 3), (0, 5)));
        for (m, n) in f.window().indices() {
            assert_eq!(*f.get(m, n).unwrap(), crate::scalar::powi(&two, m + n));
        }
    }

    #[test]
    fn short_rows_are_rejected() {
        let s = HeatScheme::from_c(0.5, 1.0).unwrap();
        let err = heat_evolve(&row_field(vec![1.0; 6], &s), 3, &s).unwrap_err();
        assert!(matches!(err, HeatError::RowTooShort { .. }));
    }

    #[test]
    fn point_form_partials_match_central_differences() {
        let analytic = point_form_equation::<f64>();
        let numeric = SchemeEquation::new("n", HEAT_STENCIL.to_vec(), analytic.clone().residual_fn());
        let nodes = vec![
            Node::new(0.3, 0.2, 1.1),
            Node::new(0.3, 0.45, 0.7),
            Node::new(0.8, 0.2, -0.4),
            Node::new(1.3, 0.2, 0.9),
        ];
        for (a, b) in analytic.partials(&nodes).iter().zip(numeric.partials(&nodes)) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-5 * (1.0 + a[k].abs()), "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn linear_characteristics_commute_with_the_step() {
        let s = HeatScheme::new(rat(1, 2), rat(1, 8)).unwrap();
        let row: Vec<BigRational> = (0..30).map(|m| rat((m * 13 % 7) - 3, 5)).collect();
        let f = heat_evolve(&row_field(row, &s), 6, &s).unwrap();
        for op in HeatOperator::ALL {
            let q = heat_operator(op, s.sigma_x(), s.sigma_t()).to_characteristic();
            assert_eq!(heat_operator_commutator(&q, &f, s.c()).unwrap(), rat(0, 1), "{op}");
        }
    }
}
