//! The isospectral and nonisospectral flows on `(a, b)`, their stationary
//! states, and the selection of the stationary family by the Toda step.

use serde::Serialize;

use super::ab::{dttl_ab_step, AbState, StepOptions};
use super::TodaError;
use crate::scalar::{int, Scalar};
use crate::symmetry::{estimate_order, OrderEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    Isospectral,
    Nonisospectral,
}

/// Flow velocities on `[lo, lo + len − 1]`; zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRhs<S> {
    pub lo: i64,
    pub a_eps: Vec<S>,
    pub b_eps: Vec<S>,
}

impl<S: Scalar> FlowRhs<S> {
    pub fn max_abs(&self) -> S {
        self.a_eps.iter().chain(&self.b_eps).fold(S::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }
}

/// `a_ε = a(n)[a(n−1) − a(n+1) + b(n)² − b(n+1)²]`,
/// `b_ε = a(n−1)[b(n) + b(n−1)] − a(n)[b(n+1) + b(n)]`.
pub fn isospectral_at<S: Scalar>(a: &impl Fn(i64) -> S, b: &impl Fn(i64) -> S, n: i64) -> (S, S) {
    let ae = a(n) * (a(n - 1) - a(n + 1) + b(n) * b(n) - b(n + 1) * b(n + 1));
    let be = a(n - 1) * (b(n) + b(n - 1)) - a(n) * (b(n + 1) + b(n));
    (ae, be)
}

/// `a_ε = a(n)[(2s+3) b(n+1) − (2s−1) b(n)]`,
/// `b_ε = b(n)² − 4 + 2[(s+1) a(n) − (s−1) a(n−1)]`, `s = n + m`.
pub fn nonisospectral_at<S: Scalar>(a: &impl Fn(i64) -> S, b: &impl Fn(i64) -> S, n: i64, m: i64) -> (S, S) {
    let s = n + m;
    let ae = a(n) * (int::<S>(2 * s + 3) * b(n + 1) - int::<S>(2 * s - 1) * b(n));
    let be = b(n) * b(n) - int::<S>(4) + int::<S>(2) * (int::<S>(s + 1) * a(n) - int::<S>(s - 1) * a(n - 1));
    (ae, be)
}

fn rhs_over<S: Scalar>(state: &AbState<S>, at: impl Fn(i64) -> (S, S)) -> FlowRhs<S> {
    let lo = state.support_lo() - 1;
    let (a_eps, b_eps) = (lo..=state.support_hi() + 1).map(at).unzip();
    FlowRhs { lo, a_eps, b_eps }
}

pub fn isospectral_rhs<S: Scalar>(state: &AbState<S>) -> FlowRhs<S> {
    rhs_over(state, |n| isospectral_at(&|k| state.a(k), &|k| state.b(k), n))
}

/// Uses the state's time index `m` in the explicit coefficients.
pub fn nonisospectral_rhs<S: Scalar>(state: &AbState<S>) -> FlowRhs<S> {
    rhs_over(state, |n| nonisospectral_at(&|k| state.a(k), &|k| state.b(k), n, state.m()))
}

pub fn flow_rhs<S: Scalar>(state: &AbState<S>, kind: FlowKind) -> FlowRhs<S> {
    match kind {
        FlowKind::Isospectral => isospectral_rhs(state),
        FlowKind::Nonisospectral => nonisospectral_rhs(state),
    }
}

/// `(a, b) + ε (a_ε, b_ε)`.
pub fn flow_euler<S: Scalar>(state: &AbState<S>, rhs: &FlowRhs<S>, eps: &S) -> Result<AbState<S>, TodaError> {
    let hi_rhs = rhs.lo + rhs.a_eps.len() as i64 - 1;
    let (lo, hi) = if state.is_vacuum_support() { (rhs.lo, hi_rhs) } else { (state.support_lo().min(rhs.lo), state.support_hi().max(hi_rhs)) };
    let at = |v: &[S], n: i64| if n >= rhs.lo && n <= hi_rhs { v[(n - rhs.lo) as usize].clone() } else { S::zero() };
    let a = (lo..=hi).map(|n| state.a(n) + eps.clone() * at(&rhs.a_eps, n)).collect();
    let b = (lo..=hi).map(|n| state.b(n) + eps.clone() * at(&rhs.b_eps, n)).collect();
    AbState::new(state.m(), lo, a, b)
}

/// `max |S(Φ_ε(s)) − Φ_ε(S(s))|` for the Toda step `S` and the Euler step
/// `Φ_ε` of the flow, over `a` and `b`.
pub fn flow_commutator(state: &AbState<f64>, alpha: f64, kind: FlowKind, eps: f64, opts: StepOptions) -> Result<f64, TodaError> {
    let flowed = flow_euler(state, &flow_rhs(state, kind), &eps)?;
    let left = dttl_ab_step(&flowed, &alpha, opts)?.state;
    let stepped = dttl_ab_step(state, &alpha, opts)?.state;
    let right = flow_euler(&stepped, &flow_rhs(&stepped, kind), &eps)?;
    let lo = left.support_lo().min(right.support_lo());
    let hi = left.support_hi().max(right.support_hi());
    Ok((lo..=hi).map(|n| (left.a(n) - right.a(n)).abs().max((left.b(n) - right.b(n)).abs())).fold(0.0, f64::max))
}

/// Commutator norms under `ε → ε/2`, `levels` times, with the fitted order.
pub fn commutation_order(state: &AbState<f64>, alpha: f64, kind: FlowKind, eps0: f64, levels: usize, opts: StepOptions) -> Result<OrderEstimate, TodaError> {
    let steps: Vec<f64> = (0..levels).map(|k| eps0 / 2f64.powi(k as i32)).collect();
    let errors = steps.iter().map(|&e| flow_commutator(state, alpha, kind, e, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(estimate_order(&steps, &errors, 1e-15))
}

/// `A(n) = a(n−1) + a(n) + b(n)²` and `B(n) = a(n)(b(n+1) + b(n))` over
/// `range`, with their largest deviation from the first site.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegrals<S> {
    pub range: (i64, i64),
    pub a_values: Vec<S>,
    pub b_values: Vec<S>,
    pub big_a: S,
    pub big_b: S,
    pub max_drift: S,
}

pub fn first_integrals<S: Scalar>(a: impl Fn(i64) -> S, b: impl Fn(i64) -> S, range: (i64, i64)) -> FirstIntegrals<S> {
    let a_values: Vec<S> = (range.0..=range.1).map(|n| a(n - 1) + a(n) + b(n) * b(n)).collect();
    let b_values: Vec<S> = (range.0..=range.1).map(|n| a(n) * (b(n + 1) + b(n))).collect();
    let big_a = a_values.first().cloned().unwrap_or_else(S::zero);
    let big_b = b_values.first().cloned().unwrap_or_else(S::zero);
    let drift = a_values.iter().map(|v| (v.clone() - big_a.clone()).abs()).chain(b_values.iter().map(|v| (v.clone() - big_b.clone()).abs()));
    let max_drift = drift.fold(S::zero(), |m, v| if v > m { v } else { m });
    FirstIntegrals { range, a_values, b_values, big_a, big_b, max_drift }
}

impl<S: Scalar> FirstIntegrals<S> {
    /// Over the support widened by one site.
    pub fn of_state(state: &AbState<S>) -> Self {
        first_integrals(|n| state.a(n), |n| state.b(n), (state.support_lo() - 1, state.support_hi() + 1))
    }
}

/// Sequences with constant first integrals `A`, `B` starting from
/// `a(0)`, `b(0)`: `b(n+1) = B/a(n) − b(n)`, `a(n+1) = A − a(n) − b(n+1)²`,
/// with `a(−1) = A − a(0) − b(0)²`. Returns `a`, `b` on `[−1, len]`.
pub fn isospectral_stationary_orbit<S: Scalar>(big_a: &S, big_b: &S, a0: S, b0: S, len: usize) -> Result<(Vec<S>, Vec<S>), TodaError> {
    let mut a = vec![big_a.clone() - a0.clone() - b0.clone() * b0.clone(), a0];
    let mut b = vec![S::zero(), b0];
    for n in 0..len as i64 {
        let an = a[(n + 1) as usize].clone();
        if an.is_zero() {
            return Err(TodaError::ZeroA { n });
        }
        let bn = big_b.clone() / an.clone() - b[(n + 1) as usize].clone();
        a.push(big_a.clone() - an - bn.clone() * bn.clone());
        b.push(bn);
    }
    Ok((a, b))
}

/// `a(n)(√(A − a(n) − a(n+1)) + √(A − a(n−1) − a(n))) − B` on `range`,
/// principal square roots.
pub fn eliminated_residual(a: impl Fn(i64) -> f64, big_a: f64, big_b: f64, range: (i64, i64)) -> Result<Vec<f64>, TodaError> {
    let root = |n: i64, v: f64| {
        if v >= 0.0 {
            Ok(v.sqrt())
        } else if v > -1e-13 * big_a.abs().max(1.0) {
            Ok(0.0)
        } else {
            Err(TodaError::NegativeRadicand { n, value: v })
        }
    };
    (range.0..=range.1)
        .map(|n| Ok(a(n) * (root(n, big_a - a(n) - a(n + 1))? + root(n, big_a - a(n - 1) - a(n))?) - big_b))
        .collect()
}

/// Which closed form of the stationary nonisospectral family to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyForm {
    /// `a = [A + B/(2s+1)² + n(n+2m+1)]/(s(s+1))`, `b = 4B/((2s−1)(2s+1))`.
    Printed,
    /// `a = [A + β²/(2s+1)² + n(n+2m+1)]/(s(s+1))`, `b = 4β/((2s−1)(2s+1))`
    /// with `β` passed as `B`. Agrees with the printed form for `B ∈ {0, 1}`.
    Corrected,
}

/// Stationary states of the nonisospectral flow at time `m`, `s = n + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonisospectralFamily<S> {
    pub big_a: S,
    pub big_b: S,
    pub m: i64,
    pub form: FamilyForm,
}

impl<S: Scalar> NonisospectralFamily<S> {
    pub fn new(big_a: S, big_b: S, m: i64, form: FamilyForm) -> Self {
        NonisospectralFamily { big_a, big_b, m, form }
    }

    fn check(&self, n: i64) -> Result<i64, TodaError> {
        let s = n + self.m;
        if s == 0 || s == -1 {
            return Err(TodaError::Pole { n, m: self.m });
        }
        Ok(s)
    }

    pub fn a(&self, n: i64) -> Result<S, TodaError> {
        let s = self.check(n)?;
        let w = int::<S>(2 * s + 1);
        let bb = match self.form {
            FamilyForm::Printed => self.big_b.clone(),
            FamilyForm::Corrected => self.big_b.clone() * self.big_b.clone(),
        };
        Ok((self.big_a.clone() + bb / (w.clone() * w) + int::<S>(n * (n + 2 * self.m + 1))) / int::<S>(s * (s + 1)))
    }

    pub fn b(&self, n: i64) -> Result<S, TodaError> {
        let s = self.check(n)?;
        Ok(int::<S>(4) * self.big_b.clone() / int::<S>((2 * s - 1) * (2 * s + 1)))
    }
}

/// Left side minus right side of the second-order recurrence for stationary
/// `a`:
/// `(2s+3)²(s+2) a(n+1) − [s(2s+3)² + (s+1)(2s−1)²] a(n) + (s−1)(2s−1)² a(n−1) = 16(2s+1)`.
/// With `homogeneous` the right side is dropped.
pub fn recurrence_a_residual<S: Scalar>(a: impl Fn(i64) -> S, n: i64, m: i64, homogeneous: bool) -> S {
    let s = n + m;
    let (p, q) = (int::<S>(2 * s + 3), int::<S>(2 * s - 1));
    let lhs = p.clone() * p.clone() * int::<S>(s + 2) * a(n + 1)
        - (int::<S>(s) * p.clone() * p + int::<S>(s + 1) * q.clone() * q.clone()) * a(n)
        + int::<S>(s - 1) * q.clone() * q * a(n - 1);
    if homogeneous {
        lhs
    } else {
        lhs - int::<S>(16 * (2 * s + 1))
    }
}

/// `1/((n+m)(n+m+1))`, a solution of the homogeneous recurrence.
pub fn homogeneous_seed<S: Scalar>(n: i64, m: i64) -> Result<S, TodaError> {
    let s = n + m;
    if s == 0 || s == -1 {
        return Err(TodaError::Pole { n, m });
    }
    Ok(S::one() / int::<S>(s * (s + 1)))
}

/// Residual of the first-order recurrence for `c(n) = β(n+1) − β(n)`,
/// `a = β/((n+m)(n+m+1))`:
/// `c(n+1) = (s+2)(2s+1)²/((s+1)(2s+5)²) c(n) + 16 (s+2)(2s+3)/(2s+5)²`.
pub fn recurrence_c_residual<S: Scalar>(c: impl Fn(i64) -> S, n: i64, m: i64) -> S {
    let s = n + m;
    let (w1, w5) = (int::<S>(2 * s + 1), int::<S>(2 * s + 5));
    let k = int::<S>(s + 2) * w1.clone() * w1 / (int::<S>(s + 1) * w5.clone() * w5.clone());
    c(n + 1) - k * c(n) - int::<S>(16 * (s + 2) * (2 * s + 3)) / (w5.clone() * w5)
}

/// The family on `n_range` with its exact residuals: the recurrence for `a`
/// and both components of the nonisospectral flow.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution<S> {
    pub n_range: (i64, i64),
    pub a: Vec<S>,
    pub b: Vec<S>,
    pub recurrence_residual: S,
    pub flow_residual_a: S,
    pub flow_residual_b: S,
}

pub fn solve_nonisospectral_stationary<S: Scalar>(family: &NonisospectralFamily<S>, n_range: (i64, i64)) -> Result<StationarySolution<S>, TodaError> {
    let (lo, hi) = n_range;
    let pad: Vec<(S, S)> = (lo - 1..=hi + 1).map(|n| Ok((family.a(n)?, family.b(n)?))).collect::<Result<_, TodaError>>()?;
    let a = |n: i64| pad[(n - lo + 1) as usize].0.clone();
    let b = |n: i64| pad[(n - lo + 1) as usize].1.clone();
    let mut out = (S::zero(), S::zero(), S::zero());
    let bump = |slot: &mut S, v: S| {
        if v.abs() > *slot {
            *slot = v.abs();
        }
    };
    for n in lo..=hi {
        bump(&mut out.0, recurrence_a_residual(a, n, family.m, false));
        let (ae, be) = nonisospectral_at(&a, &b, n, family.m);
        bump(&mut out.1, ae);
        bump(&mut out.2, be);
    }
    Ok(StationarySolution {
        n_range,
        a: (lo..=hi).map(a).collect(),
        b: (lo..=hi).map(b).collect(),
        recurrence_residual: out.0,
        flow_residual_a: out.1,
        flow_residual_b: out.2,
    })
}

const PRODUCT_TERMS: i64 = 4000;

/// `π(n,m+1)/π(n+1,m)` for the family, truncated after `PRODUCT_TERMS` sites
/// with the tail from `a − 1 ≈ (A(m) − m(m+1))/(s(s+1))`.
fn family_ratio(a_of: &impl Fn(i64, i64) -> Result<f64, TodaError>, big_a: &impl Fn(i64) -> f64, n: i64, m: i64) -> Result<f64, TodaError> {
    let j_max = n + PRODUCT_TERMS;
    let mut p = a_of(n, m + 1)?;
    for j in n + 1..=j_max {
        p *= a_of(j, m + 1)? / a_of(j, m)?;
    }
    let k0 = big_a(m) - (m * (m + 1)) as f64;
    let k1 = big_a(m + 1) - ((m + 1) * (m + 2)) as f64;
    Ok(p * (k1 / (j_max + m + 2) as f64 - k0 / (j_max + m + 1) as f64).exp())
}

/// Max residual of the a/b equations with `α = 1` for the stationary family
/// with `A(m)`, `B(m)`, over `m ∈ m_range`, `n ∈ n_range` (needs
/// `n + m ≥ 2` throughout).
pub fn family_dttl_residual(
    big_a: impl Fn(i64) -> f64,
    big_b: impl Fn(i64) -> f64,
    form: FamilyForm,
    m_range: (i64, i64),
    n_range: (i64, i64),
) -> Result<f64, TodaError> {
    if n_range.0 + m_range.0 < 2 {
        return Err(TodaError::InvalidParameter("the products need n + m >= 2 on the whole window".into()));
    }
    let fam = |m: i64| NonisospectralFamily::new(big_a(m), big_b(m), m, form);
    let a_of = |n: i64, m: i64| fam(m).a(n);
    let b_of = |n: i64, m: i64| fam(m).b(n);
    let mut worst = 0.0f64;
    for m in m_range.0..=m_range.1 {
        for n in n_range.0..=n_range.1 {
            let r = family_ratio(&a_of, &big_a, n, m)?;
            let r_prev = family_ratio(&a_of, &big_a, n - 1, m)?;
            let ra = a_of(n, m + 1)? - a_of(n, m)? - (b_of(n, m + 1)? - b_of(n + 1, m)?) * r;
            let rb = b_of(n, m + 1)? - b_of(n, m)? - (r_prev - r);
            worst = worst.max(ra.abs()).max(rb.abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetermineAbReport {
    pub m_range: (i64, i64),
    pub n_range: (i64, i64),
    /// Residual for `A(m) = m(m+1)`, `B(m) = 0`.
    pub selected_residual: f64,
    /// Whether that choice gives `a = 1`, `b = 0` exactly on the window.
    pub selected_is_vacuum: bool,
    /// `(label, residual)` for perturbed choices.
    pub perturbed: Vec<(String, f64)>,
}

/// Substitutes the stationary family into the Toda a/b equations at `α = 1`:
/// `A(m) = m(m+1)`, `B = 0` gives zero residual, perturbations do not.
pub fn determine_ab_from_dttl(m_range: (i64, i64), n_range: (i64, i64)) -> Result<DetermineAbReport, TodaError> {
    use num_rational::BigRational;
    let selected_residual = family_dttl_residual(|m| (m * (m + 1)) as f64, |_| 0.0, FamilyForm::Printed, m_range, n_range)?;
    let mut selected_is_vacuum = true;
    for m in m_range.0..=m_range.1 + 1 {
        let fam = NonisospectralFamily::new(int::<BigRational>(m * (m + 1)), int::<BigRational>(0), m, FamilyForm::Printed);
        for n in n_range.0 - 1..=n_range.1 + 1 {
            selected_is_vacuum &= fam.a(n)? == int::<BigRational>(1) && fam.b(n)? == int::<BigRational>(0);
        }
    }
    let perturbed = vec![
        ("A = m(m+1) + 1, B = 0".to_string(), family_dttl_residual(|m| (m * (m + 1) + 1) as f64, |_| 0.0, FamilyForm::Printed, m_range, n_range)?),
        ("A = 0, B = 1".to_string(), family_dttl_residual(|_| 0.0, |_| 1.0, FamilyForm::Printed, m_range, n_range)?),
    ];
    Ok(DetermineAbReport { m_range, n_range, selected_residual, selected_is_vacuum, perturbed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::symmetry::OrderKind;
    use num_rational::BigRational;

    #[test]
    fn vacuum_is_stationary_for_both_flows() {
        let v = AbState::<BigRational>::vacuum(2);
        assert_eq!(isospectral_rhs(&v).max_abs(), rat(0, 1));
        assert_eq!(nonisospectral_rhs(&v).max_abs(), rat(0, 1));
        let fi = FirstIntegrals::of_state(&v);
        assert_eq!((fi.big_a, fi.big_b, fi.max_drift), (rat(2, 1), rat(0, 1), rat(0, 1)));
        assert_eq!(eliminated_residual(|_| 1.0, 2.0, 0.0, (-3, 3)).unwrap(), vec![0.0; 7]);
    }

    #[test]
    fn isospectral_rhs_on_a_bump() {
        let s = AbState::new(0, 0, vec![rat(2, 1)], vec![rat(0, 1)]).unwrap();
        let r = isospectral_rhs(&s);
        assert_eq!(r.lo, -1);
        assert_eq!(r.a_eps, vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        let fi = FirstIntegrals::of_state(&s);
        assert_eq!(fi.a_values, vec![rat(2, 1), rat(3, 1), rat(3, 1)]);
        assert!(fi.max_drift > rat(0, 1));
    }

    #[test]
    fn stationary_orbits_have_constant_integrals() {
        let (a, b) = isospectral_stationary_orbit(&rat(5, 2), &rat(1, 3), rat(1, 1), rat(1, 5), 12).unwrap();
        let fi = first_integrals(|n| a[(n + 1) as usize].clone(), |n| b[(n + 1) as usize].clone(), (1, 11));
        assert_eq!(fi.max_drift, rat(0, 1));
        assert_eq!((fi.big_a, fi.big_b), (rat(5, 2), rat(1, 3)));
        let (ae, be) = isospectral_at(&|n| a[(n + 1) as usize].clone(), &|n| b[(n + 1) as usize].clone(), 4);
        assert_eq!((ae, be), (rat(0, 1), rat(0, 1)));
    }

    #[test]
    fn eliminated_form_on_a_positive_branch() {
        let (big_a, big_b) = (2.5, 0.6);
        let (a, b) = isospectral_stationary_orbit(&big_a, &big_b, 1.0, 0.3, 3).unwrap();
        let r = eliminated_residual(|n| a[(n + 1) as usize], big_a, big_b, (0, 0)).unwrap();
        assert!(b[1] > 0.0 && b[2] > 0.0);
        assert!(r[0].abs() < 1e-14);
        assert!(matches!(eliminated_residual(|_| 2.0, 2.0, 0.0, (0, 0)), Err(TodaError::NegativeRadicand { .. })));
    }

    #[test]
    fn isospectral_flow_commutes_to_second_order() {
        let s = AbState::new(0, 0, vec![1.05, 0.97, 1.08, 0.92, 1.01], vec![0.03, -0.06, 0.02, 0.05, -0.01]).unwrap();
        let est = commutation_order(&s, 2.0, FlowKind::Isospectral, 1e-2, 5, StepOptions::default()).unwrap();
        assert_eq!(est.kind, OrderKind::Measured);
        assert!(est.order.unwrap() > 1.9, "{est:?}");
        let non = commutation_order(&s, 2.0, FlowKind::Nonisospectral, 1e-2, 5, StepOptions::default()).unwrap();
        assert!(non.order.unwrap() < 1.5, "{non:?}");
    }

    #[test]
    fn homogeneous_seed_and_c_recurrence() {
        for m in 0..4 {
            for n in (2 - m).max(1)..10 {
                let r: BigRational = recurrence_a_residual(|k| homogeneous_seed(k, m).unwrap(), n, m, true);
                assert_eq!(r, rat(0, 1));
                let beta = |k: i64| rat(k * (k + 2 * m + 1), 1);
                assert_eq!(recurrence_c_residual(|k| beta(k + 1) - beta(k), n, m), rat(0, 1));
                let printed = |k: i64| rat(k * (k + m + 1), 1);
                if m == 0 {
                    continue;
                }
                assert_ne!(recurrence_c_residual(|k| printed(k + 1) - printed(k), n, m), rat(0, 1));
            }
        }
    }

    #[test]
    fn printed_family_is_stationary_only_for_special_b() {
        for (big_a, big_b) in [(rat(0, 1), rat(1, 1)), (rat(3, 1), rat(0, 1))] {
            let sol = solve_nonisospectral_stationary(&NonisospectralFamily::new(big_a, big_b, 1, FamilyForm::Printed), (1, 12)).unwrap();
            assert_eq!((sol.recurrence_residual, sol.flow_residual_a, sol.flow_residual_b), (rat(0, 1), rat(0, 1), rat(0, 1)));
        }
        let printed = solve_nonisospectral_stationary(&NonisospectralFamily::new(rat(3, 7), rat(-2, 5), 2, FamilyForm::Printed), (1, 12)).unwrap();
        assert_eq!(printed.recurrence_residual, rat(0, 1));
        assert_ne!(printed.flow_residual_b, rat(0, 1));
        let fixed = solve_nonisospectral_stationary(&NonisospectralFamily::new(rat(3, 7), rat(-2, 5), 2, FamilyForm::Corrected), (1, 12)).unwrap();
        assert_eq!((fixed.recurrence_residual, fixed.flow_residual_a, fixed.flow_residual_b), (rat(0, 1), rat(0, 1), rat(0, 1)));
        assert!(matches!(NonisospectralFamily::new(rat(0, 1), rat(0, 1), 0, FamilyForm::Printed).a(0), Err(TodaError::Pole { .. })));
    }

    #[test]
    fn recurrence_residual_is_shift_invariant() {
        let g = |s: i64| rat(s * s - 3 * s + 7, s * s + 1);
        for m in 1..5 {
            for n in 1..8 {
                let here: BigRational = recurrence_a_residual(|k| g(k + m), n, m, false);
                let shifted = recurrence_a_residual(|k| g(k + m - 1), n + 1, m - 1, false);
                assert_eq!(here, shifted);
            }
        }
    }

    #[test]
    fn selection_of_a_and_b() {
        let r = determine_ab_from_dttl((0, 3), (2, 6)).unwrap();
        assert_eq!(r.selected_residual, 0.0);
        assert!(r.selected_is_vacuum);
        for (label, v) in &r.perturbed {
            assert!(*v > 1e-3, "{label}: {v}");
        }
        let at2 = family_dttl_residual(|_| 0.0, |_| 1.0, FamilyForm::Printed, (2, 2), (1, 5)).unwrap();
        assert!(at2 > 1e-3);
    }
}
