//! The discrete-time Toda lattice: the scheme in `u`, its a/b form, point
//! reductions, and the isospectral and nonisospectral flows.
//!
//! Storage is (space, time) = (n, m).

mod ab;
mod flows;
mod reductions;
mod sampler;

pub use ab::{ab_from_u, dttl_ab_residual, dttl_ab_step, ab_system_residual, AbDocument, AbFields, AbState, StepOptions, StepReport};
pub use flows::{
    commutation_order, determine_ab_from_dttl, eliminated_residual, first_integrals, flow_commutator, flow_euler,
    homogeneous_seed, isospectral_rhs, isospectral_stationary_orbit, nonisospectral_rhs, family_dttl_residual,
    recurrence_c_residual, recurrence_a_residual, solve_nonisospectral_stationary, DetermineAbReport, FamilyForm,
    FirstIntegrals, FlowKind, FlowRhs, NonisospectralFamily, StationarySolution, flow_rhs, isospectral_at, nonisospectral_at,
};
pub use reductions::{dilation_points, dilation_reduce_dttl, translation_reduce_dttl, translation_reduce_dttl_with, DttlTranslation};
pub use sampler::{random_ab_state, DttlSampler};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::lattice::{scheme_residual, Field, LatticeError, LatticeGrid, Node, Offset, SchemeEquation, SchemeResidual, Window};
use crate::scalar::{int, Scalar, ScalarError};
use crate::symmetry::{PointVectorField, SymmetryError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("a·σt/σx = {0} is not an integer, so the reduced equation does not live on a lattice")]
    NonLatticeReduction(f64),
    #[error("m = {m}: the dilation variable needs m >= 1")]
    DegenerateTime { m: i64 },
    #[error("pole of the stationary family at n = {n}, m = {m}")]
    Pole { n: i64, m: i64 },
    #[error("a vanishes at n = {n}")]
    ZeroA { n: i64 },
    #[error("division by a vanishing product at n = {n}")]
    VanishingProduct { n: i64 },
    #[error("the step leaves a deviation {deviation:e} at the truncation index {at}; increase the tail or use |alpha| > 1")]
    SupportGrowth { at: i64, deviation: f64 },
    #[error("step self-check failed: reconstructed a/b residual {0:e}")]
    StepSelfCheck(f64),
    #[error("negative radicand {value} in the eliminated first-integral equation at n = {n}")]
    NegativeRadicand { n: i64, value: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `e^{u − u(m+1)} − e^{u(m+1) − u(m+2)} = α² (e^{u(n−1,m+2) − u(m+1)} − e^{u(m+1) − u(n+1,m)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DttlScheme {
    pub alpha: f64,
    pub sigma_x: f64,
    pub sigma_t: f64,
}

impl DttlScheme {
    pub fn new(alpha: f64, sigma_x: f64, sigma_t: f64) -> Result<Self, TodaError> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(TodaError::InvalidParameter(format!("alpha = {alpha} must be finite and nonzero")));
        }
        if !(sigma_x > 0.0 && sigma_t > 0.0) {
            return Err(TodaError::InvalidParameter("lattice spacings must be positive".into()));
        }
        Ok(DttlScheme { alpha, sigma_x, sigma_t })
    }

    pub fn grid<S: Scalar>(&self, window: Window) -> Result<LatticeGrid<S>, TodaError> {
        Ok(LatticeGrid::toda(window, S::from_f64_checked(self.sigma_x)?, S::from_f64_checked(self.sigma_t)?)?)
    }

    pub fn equation(&self) -> SchemeEquation<f64> {
        dttl_equation(self.alpha)
    }

    /// The scheme together with the four lattice equations.
    pub fn system(&self) -> Vec<SchemeEquation<f64>> {
        let mut v = vec![self.equation()];
        v.extend(lattice_equations());
        v
    }
}

/// Offsets `(n,m), (n,m+1), (n,m+2), (n−1,m+2), (n+1,m)`.
pub const DTTL_STENCIL: [Offset; 5] = [Offset::new(0, 0), Offset::new(0, 1), Offset::new(0, 2), Offset::new(-1, 2), Offset::new(1, 0)];

pub fn dttl_equation(alpha: f64) -> SchemeEquation<f64> {
    let a2 = alpha * alpha;
    SchemeEquation::new(
        "dttl",
        DTTL_STENCIL.to_vec(),
        Arc::new(move |p: &[Node<f64>]| {
            let u1 = p[1].u;
            (p[0].u - u1).exp() - (u1 - p[2].u).exp() - a2 * ((p[3].u - u1).exp() - (u1 - p[4].u).exp())
        }),
    )
    .with_partials(Arc::new(move |p: &[Node<f64>]| {
        let u1 = p[1].u;
        let (f0, f1) = ((p[0].u - u1).exp(), (u1 - p[2].u).exp());
        let (g, h) = ((p[3].u - u1).exp(), (u1 - p[4].u).exp());
        vec![
            [0.0, 0.0, f0],
            [0.0, 0.0, -f0 - f1 + a2 * g + a2 * h],
            [0.0, 0.0, f1],
            [0.0, 0.0, -a2 * g],
            [0.0, 0.0, -a2 * h],
        ]
    }))
}

/// `x(n+1) − 2x + x(n−1)`, `x(m+1) − x`, `t(m+1) − 2t + t(m−1)`, `t(n+1) − t`.
pub fn lattice_equations<S: Scalar>() -> Vec<SchemeEquation<S>> {
    let o = Offset::new;
    vec![
        SchemeEquation::new(
            "lattice-x-space",
            vec![o(-1, 0), o(0, 0), o(1, 0)],
            Arc::new(|p: &[Node<S>]| p[2].x.clone() - int::<S>(2) * p[1].x.clone() + p[0].x.clone()),
        ),
        SchemeEquation::new("lattice-x-time", vec![o(0, 0), o(0, 1)], Arc::new(|p: &[Node<S>]| p[1].x.clone() - p[0].x.clone())),
        SchemeEquation::new(
            "lattice-t-time",
            vec![o(0, -1), o(0, 0), o(0, 1)],
            Arc::new(|p: &[Node<S>]| p[2].t.clone() - int::<S>(2) * p[1].t.clone() + p[0].t.clone()),
        ),
        SchemeEquation::new("lattice-t-space", vec![o(0, 0), o(1, 0)], Arc::new(|p: &[Node<S>]| p[1].t.clone() - p[0].t.clone())),
    ]
}

/// Residual of the scheme on the valid window of `u`.
pub fn dttl_residual(u: &Field<f64>, alpha: f64) -> Result<SchemeResidual<f64>, TodaError> {
    Ok(scheme_residual(&dttl_equation(alpha), u)?)
}

/// `|(u − u(m+1)) − (u(m+1) − u(m+2))| + |(u(n−1,m+2) − u(m+1)) − (u(m+1) − u(n+1,m))|`.
/// When this vanishes both sides of the scheme vanish for every α, so a zero
/// here certifies an exact solution without evaluating exponentials.
pub fn dttl_exponent_balance<S: Scalar>(u: &Field<S>) -> Result<SchemeResidual<S>, TodaError> {
    let eq = SchemeEquation::new(
        "dttl-exponent-balance",
        DTTL_STENCIL.to_vec(),
        Arc::new(|p: &[Node<S>]| {
            let u1 = p[1].u.clone();
            let lhs = p[0].u.clone() - u1.clone() - (u1.clone() - p[2].u.clone());
            let rhs = p[3].u.clone() - u1.clone() - (u1 - p[4].u.clone());
            lhs.abs() + rhs.abs()
        }),
    );
    Ok(scheme_residual(&eq, u)?)
}

/// `u = A n(n+m) + B m + C n + D` on `window` (spacings of `grid`).
pub fn translational_family<S: Scalar>(grid: Arc<LatticeGrid<S>>, coeffs: [S; 4]) -> Field<S> {
    let [a, b, c, d] = coeffs;
    Field::from_fn(grid, move |n, m, _, _| {
        a.clone() * int::<S>(n) * int::<S>(n + m) + b.clone() * int::<S>(m) + c.clone() * int::<S>(n) + d.clone()
    })
}

/// Point fields of the Toda system, plus the negative control `u∂u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DttlPointBuiltin {
    /// `∂t`
    P0,
    /// `∂x`
    P1,
    /// `t∂t`
    D0,
    /// `x∂x`
    D1,
    /// `∂u`
    W,
    /// `u∂u`
    UDu,
}

impl DttlPointBuiltin {
    pub const ALGEBRA: [DttlPointBuiltin; 5] = [Self::P0, Self::P1, Self::D0, Self::D1, Self::W];
    const ALL: [DttlPointBuiltin; 6] = [Self::P0, Self::P1, Self::D0, Self::D1, Self::W, Self::UDu];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::P0 => "P0",
            Self::P1 => "P1",
            Self::D0 => "D0",
            Self::D1 => "D1",
            Self::W => "W",
            Self::UDu => "u_du",
        }
    }

    pub fn field(self) -> PointVectorField {
        let zero = |_: f64, _: f64, _: f64| 0.0;
        let one = |_: f64, _: f64, _: f64| 1.0;
        match self {
            Self::P0 => PointVectorField::from_fns("P0", zero, one, zero),
            Self::P1 => PointVectorField::from_fns("P1", one, zero, zero),
            Self::D0 => PointVectorField::from_fns("D0", zero, |_, t, _| t, zero),
            Self::D1 => PointVectorField::from_fns("D1", |x, _, _| x, zero, zero),
            Self::W => PointVectorField::from_fns("W", zero, zero, one),
            Self::UDu => PointVectorField::from_fns("u_du", zero, zero, |_, _, u| u),
        }
    }
}

impl fmt::Display for DttlPointBuiltin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DttlPointBuiltin {
    type Err = SymmetryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SymmetryError::UnknownOperator(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::symmetry::{verify_point_symmetry, Verdict};
    use num_rational::BigRational;

    #[test]
    fn vacuum_and_translational_family() {
        let s = DttlScheme::new(1.0, 1.0, 1.0).unwrap();
        let grid = Arc::new(s.grid::<f64>(Window::new((-10, 10), (-10, 10))).unwrap());
        let zero = Field::from_fn(grid.clone(), |_, _, _, _| 0.0);
        assert_eq!(dttl_residual(&zero, 1.0).unwrap().max_abs, 0.0);
        let u = translational_family(grid.clone(), [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(dttl_residual(&u, 1.0).unwrap().max_abs, 0.0);
        assert_eq!(dttl_residual(&u, 0.37).unwrap().max_abs, 0.0);
        let sq = Field::from_fn(grid, |n, _, _, _| (n * n) as f64);
        assert!(dttl_residual(&sq, 1.0).unwrap().max_abs > 1e-3);
    }

    #[test]
    fn exponent_balance_certifies_rational_family() {
        let grid = Arc::new(LatticeGrid::toda(Window::new((-10, 10), (-10, 10)), rat(1, 1), rat(1, 1)).unwrap());
        let u: Field<BigRational> = translational_family(grid.clone(), [rat(3, 7), rat(-2, 5), rat(11, 3), rat(1, 9)]);
        assert_eq!(dttl_exponent_balance(&u).unwrap().max_abs, rat(0, 1));
        let sq = Field::from_fn(grid, |n, _, _, _| rat(n * n, 1));
        assert_ne!(dttl_exponent_balance(&sq).unwrap().max_abs, rat(0, 1));
    }

    #[test]
    fn point_algebra_passes_and_control_fails() {
        let s = DttlScheme::new(0.8, 0.5, 0.25).unwrap();
        let sampler = DttlSampler::new(s, 10, 6, 8, 0);
        for b in DttlPointBuiltin::ALL {
            let r = verify_point_symmetry(&b.field(), &s.system(), &sampler, 1e-8).unwrap();
            let expected = if b == DttlPointBuiltin::UDu { Verdict::Fail } else { Verdict::Pass };
            assert_eq!(r.verdict, expected, "{b}: {}", r.max_abs_residual);
        }
    }
}
