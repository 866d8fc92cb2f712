//! Dilation-invariant heat solutions: the point reduction to a
//! difference-delay equation, and the evolutionary reduction with its exact
//! self-similar solution.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use super::ztransform::{gamma_sequence, z_transform_i, z_transform_row};
use super::{HeatError, HeatScheme};
use crate::lattice::{scheme_residual, Field, LatticeGrid, Node, Offset, SchemeEquation, Window};
use crate::reduction::{ReducedEquation, ReductionResult};
use crate::scalar::{int, Scalar};

/// `z(m,n) = (m − m0)/√(c(n − n0))`.
pub fn dilation_variable(c: f64, m0: i64, n0: i64, m: i64, n: i64) -> Result<f64, HeatError> {
    if n <= n0 {
        return Err(HeatError::TimeNotAfterOrigin { n, n0 });
    }
    Ok((m - m0) as f64 / (c * (n - n0) as f64).sqrt())
}

/// `γ_n = 1/√(c(n − n0))`, the spacing of `z` along the row `n`.
pub fn dilation_spacing(c: f64, n0: i64, n: i64) -> Result<f64, HeatError> {
    if n <= n0 {
        return Err(HeatError::TimeNotAfterOrigin { n, n0 });
    }
    Ok(1.0 / (c * (n - n0) as f64).sqrt())
}

/// Max residuals of the two lattice recurrences for `z` on `window`:
/// `z(m+1) − 2z + z(m−1) = 0` and `z(n+1) = z/√(1 + c(z − z(m−1))²)`.
pub fn dilation_lattice_residuals(c: f64, m0: i64, n0: i64, window: Window) -> Result<(f64, f64), HeatError> {
    let z = |m, n| dilation_variable(c, m0, n0, m, n);
    let (mut space, mut time) = (0.0f64, 0.0f64);
    for n in window.time.0..=window.time.1 {
        for m in window.space.0 + 1..window.space.1 {
            space = space.max((z(m + 1, n)? - 2.0 * z(m, n)? + z(m - 1, n)?).abs());
        }
        if n < window.time.1 {
            for m in window.space.0 + 1..=window.space.1 {
                let (here, left) = (z(m, n)?, z(m - 1, n)?);
                let next = here / (1.0 + c * (here - left).powi(2)).sqrt();
                time = time.max((z(m, n + 1)? - next).abs());
            }
        }
    }
    Ok((space, time))
}

/// Reduction by the point dilation `x∂x + 2t∂t`. The result is a
/// difference-delay equation; no solver is attached.
pub fn dilation_reduce_point(c: f64, m0: i64, n0: i64, window: Window) -> Result<ReductionResult, HeatError> {
    if c <= 0.0 {
        return Err(HeatError::InvalidParameter(format!("c = {c} must be positive")));
    }
    if window.time.0 <= n0 {
        return Err(HeatError::TimeNotAfterOrigin { n: window.time.0, n0 });
    }
    let (space, time) = dilation_lattice_residuals(c, m0, n0, window)?;
    let gammas: Vec<f64> = (window.time.0..=window.time.1).map(|n| dilation_spacing(c, n0, n)).collect::<Result<_, _>>()?;
    let ratios: Vec<f64> = (window.time.0..=window.time.1).map(|n| (((n - n0) as f64) / ((n - n0 + 1) as f64)).sqrt()).collect();
    let reduced = ReducedEquation::new("u(z gamma_{n+1}/gamma_n) - u(z) = c [u(z + 2 gamma_n) - 2 u(z + gamma_n) + u(z)], gamma_n = 1/sqrt(c (n - n0))")
        .stencil(["z", "z + gamma_n", "z + 2 gamma_n", "z gamma_{n+1}/gamma_n"])
        .coefficient("c", c)
        .coefficient("n0", n0)
        .coefficient("gamma_n", json!(gammas))
        .coefficient("gamma_ratio", json!(ratios));
    Ok(ReductionResult::new("heat", "dilation", "point", "u(x,t) = u(z), z = x t^(-1/2)", reduced)
        .variable(format!("z(m,n) = (m - {m0}) / sqrt({c} (n - {n0}))"))
        .value("lattice_space_residual", space)
        .value("lattice_time_residual", time)
        .note("difference-delay equation: u is determined at irrationally spaced points along each row; no closed form is attached")
        .residual(space.max(time), window))
}

/// `2t (u − u(n−1))/σt + x (u − u(m−1))/σx` on the window shrunk by one
/// back-shift in each direction.
pub fn dilation_constraint_residual<S: Scalar>(f: &Field<S>, scheme: &HeatScheme<S>) -> Result<Field<S>, HeatError> {
    let (sx, st) = (scheme.sigma_x().clone(), scheme.sigma_t().clone());
    let eq = SchemeEquation::new(
        "dilation-invariance",
        vec![Offset::new(0, 0), Offset::new(0, -1), Offset::new(-1, 0)],
        Arc::new(move |p: &[Node<S>]| {
            int::<S>(2) * p[0].t.clone() * (p[0].u.clone() - p[1].u.clone()) / st.clone()
                + p[0].x.clone() * (p[0].u.clone() - p[2].u.clone()) / sx.clone()
        }),
    );
    Ok(scheme_residual(&eq, f)?.field)
}

/// Coefficients of the reduced dilation equations at fixed `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationReducedEquation<S> {
    pub n: i64,
    pub c: S,
}

/// The four-point equation in `u` and the three-point equation in
/// `v = (u(m+1) − u)/σx` at time index `n`.
pub fn build_dilation_reduced_equation<S: Scalar>(n: i64, c: S) -> DilationReducedEquation<S> {
    DilationReducedEquation { n, c }
}

impl<S: Scalar> DilationReducedEquation<S> {
    /// Coefficients of `u(m+2), u(m+1), u(m), u(m−1)`.
    pub fn u_coefficients(&self, m: i64) -> [S; 4] {
        let c = self.c.clone();
        let k = int::<S>(2) * c.clone() * int::<S>(self.n + 1);
        let m = int::<S>(m);
        [
            k.clone() + m.clone() * c.clone(),
            -(int::<S>(2) * k.clone()) - int::<S>(3) * m.clone() * c.clone(),
            k + int::<S>(2) * m.clone() * c.clone() + m.clone() * (c.clone() + S::one()),
            -(m * (c + S::one())),
        ]
    }

    /// Coefficients of `v(m+1), v(m), v(m−1)`.
    pub fn v_coefficients(&self, m: i64) -> [S; 3] {
        let c = self.c.clone();
        let k = int::<S>(2) * c.clone() * int::<S>(self.n + 1);
        let m = int::<S>(m);
        [
            k.clone() + m.clone() * c.clone(),
            -k - int::<S>(2) * m.clone() * c.clone(),
            m * (c + S::one()),
        ]
    }

    pub fn u_residual(&self, m: i64, u: impl Fn(i64) -> S) -> S {
        let k = self.u_coefficients(m);
        k[0].clone() * u(m + 2) + k[1].clone() * u(m + 1) + k[2].clone() * u(m) + k[3].clone() * u(m - 1)
    }

    pub fn v_residual(&self, m: i64, v: impl Fn(i64) -> S) -> S {
        let k = self.v_coefficients(m);
        k[0].clone() * v(m + 1) + k[1].clone() * v(m) + k[2].clone() * v(m - 1)
    }

    pub fn describe(&self) -> ReducedEquation {
        ReducedEquation::new("2c(n+1)(v(m+1) - v(m)) + m [c v(m+1) - 2c v(m) + (c+1) v(m-1)] = 0, v(m) = (u(m+1) - u(m))/sigma_x")
            .stencil(["m-1", "m", "m+1"])
            .coefficient("n", self.n)
            .coefficient("c", self.c.to_json())
            .coefficient("u_equation", "2c(n+1)[u(m+2) - 2u(m+1) + u(m)] + m [c(u(m+2) - u(m+1)) - 2c(u(m+1) - u(m)) + (c+1)(u(m) - u(m-1))] = 0")
    }
}

/// `2n(v − v(n−1)) + (m+1)v − m v(m−1)`: the dilation constraint written
/// for the m-difference `v`.
pub fn invariance_v_residual<S: Scalar>(m: i64, n: i64, v: impl Fn(i64, i64) -> S) -> S {
    int::<S>(2 * n) * (v(m, n) - v(m, n - 1)) + int::<S>(m + 1) * v(m, n) - int::<S>(m) * v(m - 1, n)
}

/// Continuum defect of the four-point `u` equation at `(x, t)` with
/// `σx = σ`, `σt = cσ²`: `|E_σ(u) − (2t u_xx + x u_x)|`. `x/σ` and
/// `t/(cσ²)` are rounded to the nearest lattice indices.
pub fn dilation_continuum_defect(
    c: f64,
    sigma: f64,
    x: f64,
    t: f64,
    u: impl Fn(f64) -> f64,
    ux: impl Fn(f64) -> f64,
    uxx: impl Fn(f64) -> f64,
) -> f64 {
    let m = (x / sigma).round() as i64;
    let n = (t / (c * sigma * sigma)).round() as i64;
    let (xm, tn) = (sigma * m as f64, c * sigma * sigma * n as f64);
    let eq = build_dilation_reduced_equation(n, c);
    let discrete = eq.u_residual(m, |j| u(sigma * j as f64));
    (discrete - (2.0 * tn * uxx(xm) + xm * ux(xm))).abs()
}

/// Exact self-similar data on `m ∈ space`, `n ∈ time` (`time.0 ≥ 0`): the
/// m-difference `v(m,n) = γ0 (c+1)ⁿ I(m+2n+2, n)`.
pub fn self_similar_v(c: &BigRational, gamma0: &BigRational, window: Window) -> Result<Field<BigRational>, HeatError> {
    if window.time.0 < 0 {
        return Err(HeatError::InvalidParameter("the self-similar solution is built for n >= 0".into()));
    }
    let rows = self_similar_rows(c, gamma0, window)?;
    let grid = Arc::new(LatticeGrid::heat(window, BigRational::one(), c.clone(), BigRational::zero(), BigRational::zero())?);
    Ok(Field::from_fn(grid, |m, n, _, _| rows[(n - window.time.0) as usize](m)))
}

type Row = Box<dyn Fn(i64) -> BigRational>;

fn self_similar_rows(c: &BigRational, gamma0: &BigRational, window: Window) -> Result<Vec<Row>, HeatError> {
    (window.time.0..=window.time.1)
        .map(|n| {
            let row = z_transform_row(n as u32, c)?;
            let g = gamma_sequence(n, c, gamma0);
            Ok(Box::new(move |m: i64| {
                let k = m + 2 * n + 1;
                if k < 0 || k as usize >= row.len() {
                    BigRational::zero()
                } else {
                    &g * &row[k as usize]
                }
            }) as Row)
        })
        .collect()
}

/// The dilation-invariant heat solution `u(m,n) = σx Σ_{j<m} v(j,n)` on a
/// lattice with `x = σx m`, `t = σt n`. It vanishes for `m ≤ −2n−1`.
pub fn self_similar_u(c: &BigRational, sigma_x: &BigRational, gamma0: &BigRational, window: Window) -> Result<Field<BigRational>, HeatError> {
    if window.time.0 < 0 {
        return Err(HeatError::InvalidParameter("the self-similar solution is built for n >= 0".into()));
    }
    let rows = self_similar_rows(c, gamma0, window)?;
    let sums: Vec<Vec<BigRational>> = (window.time.0..=window.time.1)
        .zip(&rows)
        .map(|(n, v)| {
            let mut acc = BigRational::zero();
            for j in (-2 * n - 1)..window.space.0 {
                acc += v(j);
            }
            (window.space.0..=window.space.1)
                .map(|m| {
                    let out = sigma_x * &acc;
                    acc += v(m);
                    out
                })
                .collect()
        })
        .collect();
    let grid = Arc::new(LatticeGrid::heat(window, sigma_x.clone(), c.clone(), BigRational::zero(), BigRational::zero())?);
    Ok(Field::from_fn(grid, |m, n, _, _| sums[(n - window.time.0) as usize][(m - window.space.0) as usize].clone()))
}

/// Max residuals of the three-point reduced equation and of the invariance
/// condition in `v` for the exact self-similar data, over `m ∈ space`,
/// `n ∈ time` (`time.0 ≥ 1`).
pub fn self_similar_residuals(c: &BigRational, gamma0: &BigRational, window: Window) -> Result<(BigRational, BigRational), HeatError> {
    if window.time.0 < 1 {
        return Err(HeatError::InvalidParameter("the invariance condition needs n >= 1".into()));
    }
    let padded = Window::new((window.space.0 - 1, window.space.1 + 1), (window.time.0 - 1, window.time.1));
    let rows = self_similar_rows(c, gamma0, padded)?;
    let v = |m: i64, n: i64| rows[(n - padded.time.0) as usize](m);
    let (mut reduced, mut invariance) = (BigRational::zero(), BigRational::zero());
    for n in window.time.0..=window.time.1 {
        let eq = build_dilation_reduced_equation(n, c.clone());
        for m in window.space.0..=window.space.1 {
            let r = eq.v_residual(m, |j| v(j, n)).abs();
            if r > reduced {
                reduced = r;
            }
            let r = invariance_v_residual(m, n, v).abs();
            if r > invariance {
                invariance = r;
            }
        }
    }
    Ok((reduced, invariance))
}

/// Reduction by the flow of `D − (1 − ½T_x⁻¹)W`, reporting `v(m, n)` and the
/// exact residuals on `window`.
pub fn dilation_reduce_evolutionary(
    c: &BigRational,
    gamma0: &BigRational,
    m: i64,
    n: u32,
    window: Window,
) -> Result<ReductionResult, HeatError> {
    if !c.is_positive() {
        return Err(HeatError::InvalidParameter("c must be positive".into()));
    }
    let big_n = m + 2 * n as i64 + 2;
    let gamma = gamma_sequence(n as i64, c, gamma0);
    let i = z_transform_i(big_n, n, c)?;
    let v = &gamma * &i;
    let (reduced, invariance) = self_similar_residuals(c, gamma0, window)?;
    let residual = if reduced > invariance { reduced.clone() } else { invariance.clone() };
    let eq = build_dilation_reduced_equation(n as i64, c.clone());
    Ok(ReductionResult::new(
        "heat",
        "dilation",
        "evolutionary",
        "2 t (u(m,n) - u(m,n-1))/sigma_t + x (u(m,n) - u(m-1,n))/sigma_x = 0",
        eq.describe(),
    )
    .variable("v(m,n) = (u(m+1,n) - u(m,n))/sigma_x; N = m + 2n + 2")
    .closed_form("v(m,n) = gamma0 (c+1)^n I(N,n), I(N,n) = z^(N-1) coefficient of (z^2 - 2c/(c+1) z + c/(c+1))^n")
    .value("m", m)
    .value("n", n)
    .value("N", big_n)
    .value("gamma_n", gamma.to_json())
    .value("I", i.to_json())
    .value("v", v.to_json())
    .value("v_decimal", v.to_f64_lossy())
    .value("reduced_equation_residual", reduced.to_json())
    .value("invariance_residual", invariance.to_json())
    .residual(residual.to_f64_lossy(), window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::forward_equation;
    use crate::scalar::rat;

    #[test]
    fn dilation_variable_follows_the_lattice() {
        assert!((dilation_variable(1.0, 0, 0, 3, 4).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(dilation_variable(1.0, 0, 0, 2, 1).unwrap(), dilation_variable(1.0, 0, 0, 4, 4).unwrap());
        let z = |m, n| dilation_variable(1.0, 0, 0, m, n).unwrap();
        assert!((z(5, 8) - z(5, 7) * (7.0f64 / 8.0).sqrt()).abs() < 1e-15);
        let (s, t) = dilation_lattice_residuals(0.7, 2, -1, Window::new((-5, 9), (0, 12))).unwrap();
        assert!(s < 1e-13 && t < 1e-13);
        assert!(matches!(dilation_variable(1.0, 0, 2, 1, 2), Err(HeatError::TimeNotAfterOrigin { .. })));
        assert!(dilation_reduce_point(1.0, 0, 0, Window::new((0, 3), (0, 3))).is_err());
    }

    #[test]
    fn v_equation_is_the_difference_of_the_u_equation() {
        let eq = build_dilation_reduced_equation(3, rat(1, 2));
        let u = |m: i64| rat(m * m * m - 2 * m + 7, 3 + m * m);
        let v = |m: i64| u(m + 1) - u(m);
        for m in -5..6 {
            assert_eq!(eq.u_residual(m, u), eq.v_residual(m, v));
        }
        let at0 = build_dilation_reduced_equation(4, rat(3, 1)).v_coefficients(0);
        assert_eq!(at0[0], -at0[1].clone());
        assert_eq!(at0[2], rat(0, 1));
    }

    #[test]
    fn self_similar_data_is_exact() {
        for c in [rat(1, 1), rat(1, 2), rat(3, 1)] {
            let (r, i) = self_similar_residuals(&c, &rat(1, 1), Window::new((-20, 20), (1, 10))).unwrap();
            assert_eq!((r, i), (rat(0, 1), rat(0, 1)));
        }
    }

    #[test]
    fn self_similar_u_solves_scheme_and_constraint() {
        let (c, sx) = (rat(1, 2), rat(1, 3));
        let s = HeatScheme::from_c(c.clone(), sx.clone()).unwrap();
        let u = self_similar_u(&c, &sx, &rat(2, 1), Window::new((-14, 8), (0, 6))).unwrap();
        assert_eq!(scheme_residual(&forward_equation(c), &u).unwrap().max_abs, rat(0, 1));
        assert_eq!(dilation_constraint_residual(&u, &s).unwrap().max_abs(), rat(0, 1));
        assert_ne!(u.max_abs(), rat(0, 1));
    }

    #[test]
    fn constraint_residual_detects_linear_field() {
        let s = HeatScheme::new(1.0, 1.0).unwrap();
        let grid = Arc::new(s.grid(Window::new((0, 5), (0, 1)), 0.0, 0.0).unwrap());
        let f = Field::from_fn(grid, |m, _, _, _| m as f64);
        let r = dilation_constraint_residual(&f, &s).unwrap();
        for m in 1..=5 {
            assert_eq!(*r.get(m, 1).unwrap(), m as f64);
        }
        let constant = f.map(|_| 3.0);
        assert_eq!(dilation_constraint_residual(&constant, &s).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn continuum_defect_is_first_order() {
        let e: Vec<f64> = (3..9)
            .map(|k| dilation_continuum_defect(1.0, 0.5f64.powi(k), 1.0, 1.0, |x| x.sin(), |x| x.cos(), |x| -x.sin()))
            .collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() > 0.9, "{e:?}");
        }
    }

    #[test]
    fn evolutionary_reduction_reports_v() {
        let r = dilation_reduce_evolutionary(&rat(1, 1), &rat(1, 1), -7, 3, Window::new((-8, 8), (1, 4))).unwrap();
        assert_eq!(r.values["gamma_n"], json!("8"));
        assert_eq!(r.values["v"], json!("1"));
        assert_eq!(r.residual_max, Some(0.0));
    }
}
