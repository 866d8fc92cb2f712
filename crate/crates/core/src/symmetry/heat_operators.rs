use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{EvolutionaryCharacteristic, StencilView, SymmetryError};
use crate::lattice::{Field, LatticeError, Offset};
use crate::scalar::{powi, ratio, Scalar};

/// One term `coeff · x^x_pow · t^t_pow · u(base + offset)`, with `x`, `t`
/// taken at the base node.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilTerm<S> {
    pub offset: Offset,
    pub x_pow: u32,
    pub t_pow: u32,
    pub coeff: S,
}

/// A characteristic that is linear in `u` with polynomial coefficients in
/// the base coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearStencil<S> {
    pub name: String,
    pub terms: Vec<StencilTerm<S>>,
}

impl<S: Scalar> LinearStencil<S> {
    pub fn new(name: impl Into<String>) -> Self {
        LinearStencil { name: name.into(), terms: Vec::new() }
    }

    pub fn term(mut self, ds: i64, dt: i64, x_pow: u32, t_pow: u32, coeff: S) -> Self {
        self.terms.push(StencilTerm { offset: Offset::new(ds, dt), x_pow, t_pow, coeff });
        self
    }

    /// Distinct offsets in first-use order.
    pub fn stencil(&self) -> Vec<Offset> {
        let mut out: Vec<Offset> = Vec::new();
        for t in &self.terms {
            if !out.contains(&t.offset) {
                out.push(t.offset);
            }
        }
        out
    }

    pub fn eval_with<F>(&self, x: &S, t: &S, mut u: F) -> Result<S, SymmetryError>
    where
        F: FnMut(Offset) -> Result<S, SymmetryError>,
    {
        let mut acc = S::zero();
        for term in &self.terms {
            let w = term.coeff.clone() * powi(x, term.x_pow as i64) * powi(t, term.t_pow as i64);
            acc = acc + w * u(term.offset)?;
        }
        Ok(acc)
    }

    pub fn to_characteristic(&self) -> EvolutionaryCharacteristic<S> {
        let me = self.clone();
        EvolutionaryCharacteristic::new(
            self.name.clone(),
            self.stencil(),
            Arc::new(move |v: &StencilView<S>| {
                let (x, t) = v.base_coordinates()?;
                me.eval_with(&x, &t, |o| v.u(o.ds, o.dt))
            }),
        )
    }
}

/// Generators of the symmetry algebra of the forward heat scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeatOperator {
    P0,
    P1,
    W,
    B,
    D,
    K,
}

impl HeatOperator {
    pub const ALL: [HeatOperator; 6] =
        [HeatOperator::P0, HeatOperator::P1, HeatOperator::W, HeatOperator::B, HeatOperator::D, HeatOperator::K];

    pub fn as_str(self) -> &'static str {
        match self {
            HeatOperator::P0 => "P0",
            HeatOperator::P1 => "P1",
            HeatOperator::W => "W",
            HeatOperator::B => "B",
            HeatOperator::D => "D",
            HeatOperator::K => "K",
        }
    }
}

impl fmt::Display for HeatOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for HeatOperator {
    type Err = SymmetryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HeatOperator::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SymmetryError::UnknownOperator(s.to_string()))
    }
}

/// Galilei generator with `half·σx·u(m−1,n)` as its last term; `half = 1/2`
/// gives the algebra element.
pub fn galilei_with_half_term<S: Scalar>(sigma_x: &S, sigma_t: &S, half: S) -> LinearStencil<S> {
    let _ = sigma_t;
    let two_over_sx = ratio::<S>(2, 1) / sigma_x.clone();
    LinearStencil::new("B")
        .term(1, -1, 0, 1, two_over_sx.clone())
        .term(0, -1, 0, 1, -two_over_sx)
        .term(-1, 0, 1, 0, S::one())
        .term(-1, 0, 0, 0, half * sigma_x.clone())
}

/// Projective generator with `k·t·u(m−1,n−1)` subtracted; `k = 1/2` gives
/// the algebra element.
pub fn projective_with_coefficient<S: Scalar>(sigma_x: &S, sigma_t: &S, k: S) -> LinearStencil<S> {
    let (sx, st) = (sigma_x.clone(), sigma_t.clone());
    LinearStencil::new("K")
        .term(0, -1, 0, 2, S::one() / st.clone())
        .term(0, -2, 0, 2, -S::one() / st)
        .term(0, -1, 1, 1, S::one() / sx.clone())
        .term(-1, -1, 1, 1, -S::one() / sx.clone())
        .term(-2, 0, 2, 0, ratio(1, 4))
        .term(0, -2, 0, 1, S::one())
        .term(-1, -1, 0, 1, -k)
        .term(-2, 0, 0, 0, -(sx.clone() * sx) / ratio(16, 1))
}

pub fn heat_operator<S: Scalar>(op: HeatOperator, sigma_x: &S, sigma_t: &S) -> LinearStencil<S> {
    let (sx, st) = (sigma_x.clone(), sigma_t.clone());
    match op {
        HeatOperator::P0 => LinearStencil::new("P0")
            .term(0, 1, 0, 0, S::one() / st.clone())
            .term(0, 0, 0, 0, -S::one() / st),
        HeatOperator::P1 => LinearStencil::new("P1")
            .term(1, 0, 0, 0, S::one() / sx.clone())
            .term(0, 0, 0, 0, -S::one() / sx),
        HeatOperator::W => LinearStencil::new("W").term(0, 0, 0, 0, S::one()),
        HeatOperator::B => galilei_with_half_term(sigma_x, sigma_t, ratio(1, 2)),
        HeatOperator::D => {
            let two_over_st = ratio::<S>(2, 1) / st;
            LinearStencil::new("D")
                .term(0, 0, 0, 1, two_over_st.clone())
                .term(0, -1, 0, 1, -two_over_st)
                .term(0, 0, 1, 0, S::one() / sx.clone())
                .term(-1, 0, 1, 0, -S::one() / sx)
                .term(0, 0, 0, 0, S::one())
                .term(-1, 0, 0, 0, ratio(-1, 2))
        }
        HeatOperator::K => projective_with_coefficient(sigma_x, sigma_t, ratio(1, 2)),
    }
}

/// Evaluates a linear characteristic on `f` wherever its stencil fits.
pub fn apply_linear_symmetry<S: Scalar>(op: &LinearStencil<S>, f: &Field<S>) -> Result<Field<S>, SymmetryError> {
    let grid = f.grid();
    if !grid.is_uniform_space(1e-12) {
        return Err(LatticeError::NonUniform("space").into());
    }
    if !grid.is_uniform_time(1e-12) {
        return Err(LatticeError::NonUniform("time").into());
    }
    let mut offsets = op.stencil();
    offsets.push(Offset::new(0, 0));
    let w = f.window().stencil_window(&offsets);
    if w.is_empty() {
        return Err(SymmetryError::StencilExceedsWindow { name: op.name.clone(), window: f.window() });
    }
    Field::try_from_fn_par(f.grid_arc().clone(), w, |s, t| {
        op.eval_with(f.x(s, t)?, f.t(s, t)?, |o| Ok(f.get(s + o.ds, t + o.dt)?.clone()))
    })
}
