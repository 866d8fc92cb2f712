//! Translation-invariant heat solutions, from the point field `∂t − a∂x` and
//! from the commuting flow `Δt u − a Δx u`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde_json::json;

use super::{HeatError, HeatScheme};
use crate::lattice::{scheme_residual, Field, Node, Offset, SchemeEquation, Window};
use crate::reduction::{ReducedEquation, ReductionResult};
use crate::scalar::{int, powi, Scalar};

/// `v^k − 1 − c (v − 1)²`, multiplied by `v^{−k}` when `k < 0`, as ascending
/// coefficients.
pub fn exponent_polynomial(k: i64, c: f64) -> Vec<f64> {
    let shift = if k < 0 { (-k) as usize } else { 0 };
    let deg = (k.max(0) as usize).max(2) + shift;
    let mut p = vec![0.0; deg + 1];
    // −1 − c(v² − 2v + 1), then times v^shift
    p[shift] += -1.0 - c;
    p[shift + 1] += 2.0 * c;
    p[shift + 2] += -c;
    if k >= 0 {
        p[k as usize] += 1.0;
    } else {
        p[0] += 1.0;
    }
    while p.len() > 1 && p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

fn eval_poly(p: &[f64], v: f64) -> (f64, f64) {
    let mut val = 0.0;
    let mut der = 0.0;
    for &c in p.iter().rev() {
        der = der * v + val;
        val = val * v + c;
    }
    (val, der)
}

/// Positive real roots of [`exponent_polynomial`], ascending. `v = 1` is
/// always among them and gives the constant branch.
pub fn exponent_roots(k: i64, c: f64) -> Vec<f64> {
    let p = exponent_polynomial(k, c);
    let deg = p.len() - 1;
    let mut roots = Vec::new();
    if deg == 1 {
        roots.push(-p[0] / p[1]);
    } else if deg >= 2 {
        let lead = p[deg];
        let mut m = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            m[(i, deg - 1)] = -p[i] / lead;
        }
        for z in m.complex_eigenvalues().iter() {
            if z.im.abs() <= 1e-7 * (1.0 + z.re.abs()) {
                roots.push(z.re);
            }
        }
    }
    let mut out: Vec<f64> = Vec::new();
    for mut v in roots {
        for _ in 0..50 {
            let (f, d) = eval_poly(&p, v);
            if d == 0.0 {
                break;
            }
            let step = f / d;
            v -= step;
            if step.abs() <= 1e-16 * v.abs().max(1.0) {
                break;
            }
        }
        if (v - 1.0).abs() < 1e-7 {
            v = 1.0;
        }
        if v > 0.0 && !out.iter().any(|w| (w - v).abs() < 1e-9 * v.max(1.0)) {
            out.push(v);
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// `e^{α a c A²} − 1 − c (e^{αA} − 1)²`.
pub fn exponent_condition(alpha: f64, a: f64, c: f64, big_a: f64) -> f64 {
    (alpha * a * c * big_a * big_a).exp_m1() - c * (alpha * big_a).exp_m1().powi(2)
}

/// Bisection for a nonzero root of [`exponent_condition`] in `bracket`.
pub fn solve_exponent(a: f64, c: f64, big_a: f64, bracket: (f64, f64)) -> Result<f64, HeatError> {
    let f = |al: f64| exponent_condition(al, a, c, big_a);
    let (mut lo, mut hi) = bracket;
    let (mut flo, fhi) = (f(lo), f(hi));
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(HeatError::InvalidParameter(format!(
            "bracket [{lo}, {hi}] does not enclose a sign change of the exponent condition"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() <= 4.0 * f64::EPSILON * mid.abs() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A bracket around the nonzero root nearest the continuum value `α = a`,
/// found by geometric scanning away from `α = 0`.
pub fn default_bracket(a: f64, c: f64, big_a: f64) -> Option<(f64, f64)> {
    if a == 0.0 {
        return None;
    }
    let f = |al: f64| exponent_condition(al, a, c, big_a);
    let mut lo = a / 1024.0;
    let f0 = f(lo);
    for _ in 0..40 {
        let hi = lo * 2.0;
        let fh = f(hi);
        if !fh.is_finite() {
            return None;
        }
        if fh.signum() != f0.signum() {
            return Some((lo, hi));
        }
        lo = hi;
    }
    None
}

/// Residual of `u(N+k) − u(N) = c[u(N+2) − 2u(N+1) + u(N)]` for
/// `u(N) = c1 vᴺ + c2` on `range`.
pub fn reduced_translation_residual<S: Scalar>(k: i64, c: &S, v: &S, c1: &S, c2: &S, range: std::ops::RangeInclusive<i64>) -> S {
    let u = |n: i64| c1.clone() * powi(v, n) + c2.clone();
    let mut worst = S::zero();
    for n in range {
        let r = u(n + k) - u(n) - c.clone() * (u(n + 2) - int::<S>(2) * u(n + 1) + u(n));
        if r.abs() > worst {
            worst = r.abs();
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointTranslation {
    pub a: f64,
    pub c: f64,
    /// Spacing `A` of the symmetry variable `z = A(m + Aac n) + z0`.
    pub big_a: f64,
    pub z0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Needed when `Aac` is not an integer.
    pub bracket: Option<(f64, f64)>,
}

impl PointTranslation {
    pub fn new(a: f64, c: f64, big_a: f64) -> Self {
        PointTranslation { a, c, big_a, z0: 0.0, c1: 1.0, c2: 0.0, bracket: None }
    }

    pub fn k(&self) -> f64 {
        self.big_a * self.a * self.c
    }
}

fn integer_k(k: f64) -> Option<i64> {
    let r = k.round();
    ((k - r).abs() <= 1e-12 * k.abs().max(1.0)).then_some(r as i64)
}

const REDUCED_POINTS: std::ops::RangeInclusive<i64> = -10..=10;

/// Reduction by `∂t − a∂x`: `u = u(z)`, `z = x + at`.
pub fn translation_reduce_point(p: &PointTranslation) -> Result<ReductionResult, HeatError> {
    if p.c <= 0.0 || p.big_a == 0.0 {
        return Err(HeatError::InvalidParameter("c must be positive and A nonzero".into()));
    }
    let k = p.k();
    let reduced = ReducedEquation::new("u(z + a c A^2) - u(z) = c [u(z + 2A) - 2 u(z + A) + u(z)]")
        .stencil(["z", "z + A", "z + 2A", "z + a c A^2"])
        .coefficient("c", p.c)
        .coefficient("A", p.big_a)
        .coefficient("a_c_A^2", k * p.big_a);
    let mut r = ReductionResult::new("heat", "translation", "point", "u(x,t) = u(z), z = x + a t", reduced)
        .variable(format!("z(m,n) = A (m + A a c n) + z0 with A = {}, z0 = {}", p.big_a, p.z0))
        .value("k", k);
    let u = |alpha: f64, n: f64| p.c1 * (alpha * (p.big_a * n + p.z0)).exp() + p.c2;
    let residual_for = |alpha: f64, kk: f64| {
        REDUCED_POINTS
            .map(|n| {
                let n = n as f64;
                let lhs = u(alpha, n + kk) - u(alpha, n);
                let rhs = p.c * (u(alpha, n + 2.0) - 2.0 * u(alpha, n + 1.0) + u(alpha, n));
                (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
            })
            .fold(0.0, f64::max)
    };
    match integer_k(k) {
        Some(ki) => {
            let roots = exponent_roots(ki, p.c);
            let nontrivial: Vec<f64> = roots.iter().copied().filter(|v| *v != 1.0).collect();
            if roots.is_empty() {
                return Err(HeatError::NoPositiveRoot { k: ki, c: p.c });
            }
            let alpha_a: Vec<f64> = nontrivial.iter().map(|v| v.ln()).collect();
            let resid = alpha_a.iter().map(|aa| residual_for(aa / p.big_a, ki as f64)).fold(residual_for(0.0, ki as f64), f64::max);
            r = r
                .value("lattice", true)
                .value("root_condition", format!("v^{ki} - 1 = {} (v - 1)^2, v = exp(alpha A)", p.c))
                .value("roots_v", json!(roots))
                .value("alpha_A", json!(alpha_a))
                .value("alpha", json!(alpha_a.iter().map(|x| x / p.big_a).collect::<Vec<_>>()))
                .residual(resid, Window::new((*REDUCED_POINTS.start(), *REDUCED_POINTS.end()), (0, 0)));
            if nontrivial.is_empty() {
                r = r.value("branch", "constant").note("only v = 1 solves the root condition: the constant-solution branch u = c1 + c2");
                r = r.closed_form("u = c1 + c2");
            } else {
                r = r.value("branch", "exponential").closed_form("u = c1 exp(alpha z) + c2");
            }
            Ok(r)
        }
        None => {
            let bracket = p.bracket.ok_or(HeatError::NonLatticeReduction(k))?;
            let alpha = solve_exponent(p.a, p.c, p.big_a, bracket)?;
            Ok(r
                .value("lattice", false)
                .value("alpha", alpha)
                .value("alpha_A", alpha * p.big_a)
                .value("branch", "exponential")
                .closed_form("u = c1 exp(alpha z) + c2")
                .note("A a c is not an integer: the reduced equation is a difference-delay equation and alpha solves a transcendental condition")
                .residual(residual_for(alpha, k), Window::new((*REDUCED_POINTS.start(), *REDUCED_POINTS.end()), (0, 0))))
        }
    }
}

/// Exponent `α` of the point-invariant solution on the lattice with spacings
/// `σx`, `σt`, choosing the nonconstant branch nearest `α = a` (zero when
/// only the constant branch exists).
pub fn point_translation_exponent(a: f64, sigma_x: f64, sigma_t: f64) -> Result<f64, HeatError> {
    let c = sigma_t / (sigma_x * sigma_x);
    let p = PointTranslation::new(a, c, sigma_x);
    match integer_k(p.k()) {
        Some(k) => Ok(exponent_roots(k, c)
            .into_iter()
            .filter(|v| *v != 1.0)
            .map(|v| v.ln() / sigma_x)
            .min_by(|x, y| (x - a).abs().total_cmp(&(y - a).abs()))
            .unwrap_or(0.0)),
        None => {
            let br = default_bracket(a, c, sigma_x).ok_or(HeatError::NonLatticeReduction(p.k()))?;
            solve_exponent(a, c, sigma_x, br)
        }
    }
}

/// `c1 e^{α(x + at)} + c2` at `x = σx m`, `t = σt n`.
pub fn point_translation_value(a: f64, sigma_x: f64, sigma_t: f64, c1: f64, c2: f64, m: i64, n: i64) -> Result<f64, HeatError> {
    let alpha = point_translation_exponent(a, sigma_x, sigma_t)?;
    Ok(c1 * (alpha * (sigma_x * m as f64 + a * sigma_t * n as f64)).exp() + c2)
}

/// `u(m,n+1) − u = a (σt/σx)(u(m+1,n) − u)`: invariance under the flow
/// `Δt u − a Δx u`.
pub fn translation_flow_constraint<S: Scalar>(a: S, sigma_x: S, sigma_t: S) -> SchemeEquation<S> {
    let k = a * sigma_t / sigma_x;
    SchemeEquation::new(
        "translation-flow-invariance",
        vec![Offset::new(0, 0), Offset::new(0, 1), Offset::new(1, 0)],
        Arc::new(move |n: &[Node<S>]| n[1].u.clone() - n[0].u.clone() - k.clone() * (n[2].u.clone() - n[0].u.clone())),
    )
}

/// `c1 (1 + a²σt)ⁿ (1 + aσx)^m + c2` on `window`, with `x0 = t0 = 0`.
pub fn evolutionary_translation_field<S: Scalar>(
    a: &S,
    scheme: &HeatScheme<S>,
    c1: &S,
    c2: &S,
    window: Window,
) -> Result<Field<S>, HeatError> {
    let bx = S::one() + a.clone() * scheme.sigma_x().clone();
    if bx.is_zero() {
        return Err(HeatError::InvalidParameter("1 + a σx must be nonzero".into()));
    }
    let bt = S::one() + a.clone() * a.clone() * scheme.sigma_t().clone();
    let grid = Arc::new(scheme.grid(window, S::zero(), S::zero())?);
    Ok(Field::from_fn(grid, |m, n, _, _| c1.clone() * powi(&bt, n) * powi(&bx, m) + c2.clone()))
}

/// Reduction by the flow of `Δt u − a Δx u`; returns the closed-form field
/// with the residuals of the scheme and of the invariance constraint.
pub fn translation_reduce_evolutionary<S: Scalar>(
    a: &S,
    scheme: &HeatScheme<S>,
    c1: &S,
    c2: &S,
    window: Window,
) -> Result<(ReductionResult, Field<S>), HeatError> {
    let f = evolutionary_translation_field(a, scheme, c1, c2, window)?;
    let heat = scheme_residual(&scheme.equation(), &f)?.max_abs;
    let flow = translation_flow_constraint(a.clone(), scheme.sigma_x().clone(), scheme.sigma_t().clone());
    let inv = scheme_residual(&flow, &f)?.max_abs;
    let joint = if heat > inv { heat.clone() } else { inv.clone() };
    let reduced = ReducedEquation::new("a (u(m+1,n) - u(m,n)) = (u(m+2,n) - 2 u(m+1,n) + u(m,n)) / sigma_x")
        .stencil(["(m,n)", "(m+1,n)", "(m+2,n)"])
        .coefficient("a", a.to_json())
        .coefficient("sigma_x", scheme.sigma_x().to_json());
    let r = ReductionResult::new(
        "heat",
        "translation",
        "evolutionary",
        "u(m,n+1) - u(m,n) = a (sigma_t / sigma_x) (u(m+1,n) - u(m,n))",
        reduced,
    )
    .closed_form("u(m,n) = c1 (1 + a^2 sigma_t)^n (1 + a sigma_x)^m + c2 = c1 (1 + a sigma_x)^(x/sigma_x) (1 + a^2 sigma_t)^(t/sigma_t) + c2")
    .value("heat_residual", heat.to_json())
    .value("constraint_residual", inv.to_json())
    .value("arithmetic_mode", S::MODE.as_str())
    .residual(joint.to_f64_lossy(), f.window());
    Ok((r, f))
}

/// `c1 (1 + aσx)^{x/σx} (1 + a²σt)^{t/σt} + c2` at real `(x, t)`.
pub fn evolutionary_translation_xt(a: f64, sigma_x: f64, sigma_t: f64, c1: f64, c2: f64, x: f64, t: f64) -> Result<f64, HeatError> {
    let bx = 1.0 + a * sigma_x;
    if bx <= 0.0 {
        return Err(HeatError::NonPositiveBase(bx));
    }
    Ok(c1 * (x / sigma_x * bx.ln() + t / sigma_t * (a * a * sigma_t).ln_1p()).exp() + c2)
}

/// `|u_σ(x,t) − e^{ax + a²t}|` for `σx = σ`, `σt = σ²`, `c1 = 1`, `c2 = 0`.
pub fn continuum_translation_defect(a: f64, x: f64, t: f64, sigma: f64) -> Result<f64, HeatError> {
    Ok((evolutionary_translation_xt(a, sigma, sigma * sigma, 1.0, 0.0, x, t)? - (a * x + a * a * t).exp()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    #[test]
    fn k_one_gives_log_ratio() {
        for c in [0.5, 1.0, 2.0] {
            let r = translation_reduce_point(&PointTranslation::new(1.0 / c, c, 1.0)).unwrap();
            let aa = r.values["alpha_A"][0].as_f64().unwrap();
            assert!((aa - ((c + 1.0) / c).ln()).abs() < 1e-12);
            assert!(r.residual_max.unwrap() < 1e-12);
        }
    }

    #[test]
    fn k_two_at_c_one_is_constant_branch() {
        let r = translation_reduce_point(&PointTranslation::new(2.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.values["branch"], "constant");
        assert_eq!(r.values["roots_v"], json!([1.0]));
    }

    #[test]
    fn roots_of_higher_and_negative_k() {
        for (k, c) in [(3, 0.7), (4, 2.0), (-1, 0.5), (-2, 1.5), (0, 1.0)] {
            for v in exponent_roots(k, c) {
                let lhs = v.powi(k as i32) - 1.0;
                assert!((lhs - c * (v - 1.0).powi(2)).abs() < 1e-10, "k={k} v={v}");
            }
        }
        assert_eq!(exponent_roots(2, 3.0), vec![1.0, 2.0]);
    }

    #[test]
    fn non_integer_k_needs_a_bracket() {
        let p = PointTranslation::new(1.0, 1.0, 0.5);
        assert!(matches!(translation_reduce_point(&p), Err(HeatError::NonLatticeReduction(_))));
        let br = default_bracket(1.0, 1.0, 0.5).unwrap();
        let r = translation_reduce_point(&PointTranslation { bracket: Some(br), ..p }).unwrap();
        let alpha = r.values["alpha"].as_f64().unwrap();
        assert!(exponent_condition(alpha, 1.0, 1.0, 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_reduced_equation_for_k_one() {
        let c = rat(3, 2);
        let v = (c.clone() + rat(1, 1)) / c.clone();
        assert_eq!(reduced_translation_residual(1, &c, &v, &rat(2, 1), &rat(-1, 3), -8..=8), rat(0, 1));
    }

    #[test]
    fn evolutionary_solution_is_exact() {
        let s = HeatScheme::new(rat(1, 2), rat(1, 4)).unwrap();
        let (r, f): (ReductionResult, Field<BigRational>) =
            translation_reduce_evolutionary(&rat(1, 1), &s, &rat(1, 1), &rat(0, 1), Window::new((-4, 6), (0, 5))).unwrap();
        assert_eq!(r.residual_max, Some(0.0));
        assert_eq!(*f.get(1, 0).unwrap(), rat(3, 2));
        let (_, f) = translation_reduce_evolutionary(&rat(0, 1), &s, &rat(2, 1), &rat(3, 1), Window::new((0, 3), (0, 3))).unwrap();
        assert!(f.values().iter().all(|v| *v == rat(5, 1)));
    }

    #[test]
    fn continuum_limit_is_first_order() {
        let e: Vec<f64> = (1..7).map(|k| continuum_translation_defect(1.0, 1.0, 1.0, 0.5f64.powi(k)).unwrap()).collect();
        for w in e.windows(2) {
            assert!(w[1] < w[0]);
            assert!((w[0] / w[1]).log2() > 0.9);
        }
        assert!(evolutionary_translation_xt(-3.0, 0.5, 0.25, 1.0, 0.0, 1.0, 1.0).is_err());
    }
}
