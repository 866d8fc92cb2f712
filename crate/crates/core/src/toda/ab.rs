//! The a/b form: `π(n,m) = e^{u(n,m)} = Π_{j≥n} a(j,m)` and
//!
//! ```text
//! a(n,m+1) − a(n,m) = α (b(n,m+1) − b(n+1,m)) π(n,m+1)/π(n+1,m)
//! b(n,m+1) − b(n,m) = α (π(n−1,m+1)/π(n,m) − π(n,m+1)/π(n+1,m))
//! ```
//!
//! States deviate from the vacuum `a = 1`, `b = 0` on a finite window only,
//! which keeps the products finite.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::TodaError;
use crate::lattice::{Field, Window};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct AbState<S> {
    m: i64,
    support_lo: i64,
    a: Vec<S>,
    b: Vec<S>,
}

/// JSON form `{m, support_lo, support_hi, a, b}`; sites outside the support
/// are vacuum. Exact values are `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbDocument {
    pub m: i64,
    pub support_lo: i64,
    pub support_hi: i64,
    pub a: Vec<Value>,
    pub b: Vec<Value>,
}

impl<S: Scalar> AbState<S> {
    pub fn new(m: i64, support_lo: i64, a: Vec<S>, b: Vec<S>) -> Result<Self, TodaError> {
        if a.len() != b.len() {
            return Err(TodaError::InvalidParameter(format!("a has {} sites but b has {}", a.len(), b.len())));
        }
        if let Some(i) = a.iter().position(|v| v.is_zero()) {
            return Err(TodaError::ZeroA { n: support_lo + i as i64 });
        }
        Ok(AbState { m, support_lo, a, b })
    }

    pub fn vacuum(m: i64) -> Self {
        AbState { m, support_lo: 0, a: Vec::new(), b: Vec::new() }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn with_m(mut self, m: i64) -> Self {
        self.m = m;
        self
    }

    pub fn support_lo(&self) -> i64 {
        self.support_lo
    }

    /// `support_lo − 1` for the vacuum.
    pub fn support_hi(&self) -> i64 {
        self.support_lo + self.a.len() as i64 - 1
    }

    pub fn is_vacuum_support(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a_values(&self) -> &[S] {
        &self.a
    }

    pub fn b_values(&self) -> &[S] {
        &self.b
    }

    fn index(&self, n: i64) -> Option<usize> {
        (n >= self.support_lo && n <= self.support_hi()).then(|| (n - self.support_lo) as usize)
    }

    pub fn a(&self, n: i64) -> S {
        self.index(n).map_or_else(S::one, |i| self.a[i].clone())
    }

    pub fn b(&self, n: i64) -> S {
        self.index(n).map_or_else(S::zero, |i| self.b[i].clone())
    }

    /// Largest `|a − 1| + |b|` over the support.
    pub fn max_deviation(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| deviation(a, b)).fold(0.0, f64::max)
    }

    /// Drops vacuum sites (deviation `≤ tol`) from both ends.
    pub fn trimmed(&self, tol: f64) -> Self {
        let keep: Vec<usize> = (0..self.a.len()).filter(|&i| deviation(&self.a[i], &self.b[i]) > tol).collect();
        match (keep.first(), keep.last()) {
            (Some(&lo), Some(&hi)) => AbState {
                m: self.m,
                support_lo: self.support_lo + lo as i64,
                a: self.a[lo..=hi].to_vec(),
                b: self.b[lo..=hi].to_vec(),
            },
            _ => AbState::vacuum(self.m),
        }
    }

    /// `π(n) = Π_{j≥n} a(j)` for `n ∈ [lo, hi]`, indexed by `n − lo`.
    pub fn products(&self, lo: i64, hi: i64) -> Vec<S> {
        let top = hi.max(self.support_hi());
        let mut p = S::one();
        let mut out = vec![S::one(); (hi - lo + 1).max(0) as usize];
        for n in (lo..=top).rev() {
            p = p * self.a(n);
            if n <= hi {
                out[(n - lo) as usize] = p.clone();
            }
        }
        out
    }

    pub fn to_document(&self) -> AbDocument {
        AbDocument {
            m: self.m,
            support_lo: self.support_lo,
            support_hi: self.support_hi(),
            a: self.a.iter().map(Scalar::to_json).collect(),
            b: self.b.iter().map(Scalar::to_json).collect(),
        }
    }

    pub fn from_document(doc: &AbDocument) -> Result<Self, TodaError> {
        let expected = (doc.support_hi - doc.support_lo + 1).max(0) as usize;
        if doc.a.len() != expected || doc.b.len() != expected {
            return Err(TodaError::InvalidParameter(format!(
                "support [{}, {}] needs {expected} values of a and b",
                doc.support_lo, doc.support_hi
            )));
        }
        let parse = |v: &[Value]| v.iter().map(S::from_json).collect::<Result<Vec<S>, _>>();
        Self::new(doc.m, doc.support_lo, parse(&doc.a)?, parse(&doc.b)?)
    }
}

fn deviation<S: Scalar>(a: &S, b: &S) -> f64 {
    (a.clone() - S::one()).abs().to_f64_lossy() + b.abs().to_f64_lossy()
}

/// Max residuals of the two a/b equations between `prev` (time m) and
/// `next` (time m+1): the first over `a_range`, the second over `b_range`.
pub fn ab_system_residual<S: Scalar>(prev: &AbState<S>, next: &AbState<S>, alpha: &S, a_range: (i64, i64), b_range: (i64, i64)) -> (S, S) {
    let lo = a_range.0.min(b_range.0) - 1;
    let hi = a_range.1.max(b_range.1) + 2;
    let (p0, p1) = (prev.products(lo, hi), next.products(lo, hi));
    let pi0 = |n: i64| p0[(n - lo) as usize].clone();
    let pi1 = |n: i64| p1[(n - lo) as usize].clone();
    let ratio = |n: i64| pi1(n) / pi0(n + 1);
    let mut ra = S::zero();
    for n in a_range.0..=a_range.1 {
        let r = next.a(n) - prev.a(n) - alpha.clone() * (next.b(n) - prev.b(n + 1)) * ratio(n);
        if r.abs() > ra {
            ra = r.abs();
        }
    }
    let mut rb = S::zero();
    for n in b_range.0..=b_range.1 {
        let r = next.b(n) - prev.b(n) - alpha.clone() * (ratio(n - 1) - ratio(n));
        if r.abs() > rb {
            rb = r.abs();
        }
    }
    (ra, rb)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    /// Sites solved below the support before the state is cut to vacuum.
    pub tail: usize,
    /// Largest deviation tolerated at the truncation index.
    pub truncation_tol: f64,
    /// Largest reconstructed residual tolerated, relative to `1 + max|a|+|b|`.
    pub check_tol: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { tail: 64, truncation_tol: 1e-14, check_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport<S> {
    pub state: AbState<S>,
    pub residual_a: S,
    pub residual_b: S,
    pub truncation_index: i64,
    pub truncation_deviation: f64,
}

/// One step `m → m+1`. The second equation at `n+1` gives `π(n,m+1)` from
/// data above `n`, so the new state is found by recursion downward from the
/// vacuum above the support; the first equation then gives `b(n,m+1)`.
/// Deviations below the support decay by about `1/α²` per site, so the
/// recursion runs `tail` sites below the support and the remainder is
/// checked against `truncation_tol`.
pub fn dttl_ab_step<S: Scalar>(state: &AbState<S>, alpha: &S, opts: StepOptions) -> Result<StepReport<S>, TodaError> {
    if alpha.is_zero() {
        return Err(TodaError::InvalidParameter("alpha must be nonzero".into()));
    }
    if state.is_vacuum_support() {
        return Ok(StepReport {
            state: AbState::vacuum(state.m + 1),
            residual_a: S::zero(),
            residual_b: S::zero(),
            truncation_index: state.support_lo,
            truncation_deviation: 0.0,
        });
    }
    let top = state.support_hi() + 2;
    let bot = state.support_lo - opts.tail as i64;
    let pim = state.products(bot, top + 2);
    let pi = |n: i64| pim[(n - bot) as usize].clone();
    let len = (top - bot + 2) as usize;
    let mut p1 = vec![S::one(); len];
    let mut a1 = vec![S::one(); len];
    let mut b1 = vec![S::zero(); len];
    let at = |n: i64| (n - bot) as usize;
    for n in (bot..=top).rev() {
        let p = pi(n + 1) * ((b1[at(n + 1)].clone() - state.b(n + 1)) / alpha.clone() + p1[at(n + 1)].clone() / pi(n + 2));
        if p.is_zero() || p1[at(n + 1)].is_zero() {
            return Err(TodaError::VanishingProduct { n });
        }
        a1[at(n)] = p.clone() / p1[at(n + 1)].clone();
        b1[at(n)] = state.b(n + 1) + (a1[at(n)].clone() - state.a(n)) * pi(n + 1) / (alpha.clone() * p.clone());
        p1[at(n)] = p;
    }
    a1.pop();
    b1.pop();
    let truncation_deviation = deviation(&a1[0], &b1[0]);
    if truncation_deviation > opts.truncation_tol {
        return Err(TodaError::SupportGrowth { at: bot, deviation: truncation_deviation });
    }
    let raw = AbState::new(state.m + 1, bot, a1, b1)?;
    let (residual_a, residual_b) = ab_system_residual(state, &raw, alpha, (bot, top), (bot + 1, top + 1));
    let scale = 1.0 + raw.a.iter().chain(&raw.b).map(|v| v.abs().to_f64_lossy()).fold(0.0, f64::max);
    let worst = residual_a.to_f64_lossy().max(residual_b.to_f64_lossy());
    if worst > opts.check_tol * scale {
        return Err(TodaError::StepSelfCheck(worst));
    }
    Ok(StepReport { state: raw.trimmed(0.0), residual_a, residual_b, truncation_index: bot, truncation_deviation })
}

/// `a`, `b` and the ratio `R(n,m) = π(n,m+1)/π(n+1,m)` of a `u`-field on a
/// common window.
#[derive(Debug, Clone, PartialEq)]
pub struct AbFields {
    pub a: Field<f64>,
    pub b: Field<f64>,
    pub ratio: Field<f64>,
}

/// `a = e^{u − u(n+1)}` and
/// `b = α + 1/α − (F(n,m) + F(n,m−1))/(2α) − α (E(n−1,m) + E(n,m−1))/2`
/// with `F(n,m) = e^{u(n,m) − u(n,m+1)}` and `E(n,m) = e^{u(n,m+1) − u(n+1,m)}`.
/// `b` is fixed up to a constant by the a/b equations; this choice vanishes
/// on the vacuum `u = 0`.
pub fn ab_from_u(u: &Field<f64>, alpha: f64) -> Result<AbFields, TodaError> {
    let w = u.window();
    let inner = Window::new((w.space.0 + 1, w.space.1 - 1), (w.time.0 + 1, w.time.1 - 1));
    if inner.is_empty() {
        return Err(crate::lattice::LatticeError::WindowTooSmall { window: w, needed: "one site on each side".into() }.into());
    }
    let g = |n: i64, m: i64| u.get(n, m).copied();
    let f = |n: i64, m: i64| -> Result<f64, TodaError> { Ok((g(n, m)? - g(n, m + 1)?).exp()) };
    let e = |n: i64, m: i64| -> Result<f64, TodaError> { Ok((g(n, m + 1)? - g(n + 1, m)?).exp()) };
    let grid = Arc::clone(u.grid_arc());
    let a = Field::try_from_fn_par(grid.clone(), inner, |n, m| -> Result<f64, TodaError> { Ok((g(n, m)? - g(n + 1, m)?).exp()) })?;
    let ratio = Field::try_from_fn_par(grid.clone(), inner, e)?;
    let b = Field::try_from_fn_par(grid, inner, |n, m| -> Result<f64, TodaError> {
        Ok(alpha + 1.0 / alpha - (f(n, m)? + f(n, m - 1)?) / (2.0 * alpha) - alpha * (e(n - 1, m)? + e(n, m - 1)?) / 2.0)
    })?;
    Ok(AbFields { a, b, ratio })
}

/// Max residuals of the two a/b equations for the fields of [`ab_from_u`].
pub fn dttl_ab_residual(u: &Field<f64>, alpha: f64) -> Result<(f64, f64), TodaError> {
    let AbFields { a, b, ratio } = ab_from_u(u, alpha)?;
    let w = a.window();
    let (mut ra, mut rb) = (0.0f64, 0.0f64);
    for m in w.time.0..w.time.1 {
        for n in w.space.0..w.space.1 {
            let r = a.get(n, m + 1)? - a.get(n, m)? - alpha * (b.get(n, m + 1)? - b.get(n + 1, m)?) * ratio.get(n, m)?;
            ra = ra.max(r.abs());
        }
        for n in w.space.0 + 1..=w.space.1 {
            let r = b.get(n, m + 1)? - b.get(n, m)? - alpha * (ratio.get(n - 1, m)? - ratio.get(n, m)?);
            rb = rb.max(r.abs());
        }
    }
    Ok((ra, rb))
}
