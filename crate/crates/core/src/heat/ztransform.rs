//! Exact generating-function machinery for the self-similar heat solution.
//!
//! With `q(z) = z² − (2c/(c+1)) z + c/(c+1)`, the contour integral
//! `I(N, n) = (1/2πi) ∮ q(z)ⁿ z^{−N} dz` over the unit circle is the
//! coefficient of `z^{N−1}` in `q(z)ⁿ`, since both roots of `q` lie inside
//! the circle.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::HeatError;

/// Univariate polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffPolynomial {
    coeffs: Vec<BigRational>,
}

impl CoeffPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        CoeffPolynomial { coeffs }
    }

    pub fn one() -> Self {
        CoeffPolynomial::new(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `z^k`; zero outside the stored range.
    pub fn coeff(&self, k: i64) -> BigRational {
        usize::try_from(k).ok().and_then(|k| self.coeffs.get(k).cloned()).unwrap_or_else(BigRational::zero)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = CoeffPolynomial::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Mul for &CoeffPolynomial {
    type Output = CoeffPolynomial;

    fn mul(self, rhs: &CoeffPolynomial) -> CoeffPolynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return CoeffPolynomial::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CoeffPolynomial::new(out)
    }
}

impl Add for &CoeffPolynomial {
    type Output = CoeffPolynomial;

    fn add(self, rhs: &CoeffPolynomial) -> CoeffPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        CoeffPolynomial::new((0..len as i64).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl fmt::Display for CoeffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{k}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

fn check_c(c: &BigRational) -> Result<(), HeatError> {
    if *c <= BigRational::zero() {
        return Err(HeatError::InvalidParameter(format!("c = {c} must be positive")));
    }
    Ok(())
}

/// `q(z) = z² − (2c/(c+1)) z + c/(c+1)`, whose roots are `(c ± i√c)/(c+1)`.
pub fn q_polynomial(c: &BigRational) -> CoeffPolynomial {
    let r = c / (c + BigRational::one());
    CoeffPolynomial::new(vec![r.clone(), -(r.clone() + r), BigRational::one()])
}

/// `I(N, n)`: the `z^{N−1}` coefficient of `q(z)ⁿ`, zero for `N ≤ 0` or
/// `N − 1 > 2n`.
pub fn z_transform_i(big_n: i64, n: u32, c: &BigRational) -> Result<BigRational, HeatError> {
    check_c(c)?;
    if big_n <= 0 || big_n - 1 > 2 * n as i64 {
        return Ok(BigRational::zero());
    }
    Ok(q_polynomial(c).pow(n).coeff(big_n - 1))
}

/// All `I(N, n)` for `N = 1..=2n+1` from a single power of `q`.
pub fn z_transform_row(n: u32, c: &BigRational) -> Result<Vec<BigRational>, HeatError> {
    check_c(c)?;
    let p = q_polynomial(c).pow(n);
    Ok((0..=2 * n as i64).map(|k| p.coeff(k)).collect())
}

/// Trapezoid rule for the contour integral on `|z| = 1` with `points` nodes:
/// `(1/2π) ∫ q(e^{iθ})ⁿ e^{−i(N−1)θ} dθ`. The rule is exact up to rounding
/// once `points > 2n + |N − 1|`.
pub fn contour_quadrature_i(big_n: i64, n: u32, c: f64, points: usize) -> f64 {
    let r = c / (c + 1.0);
    let q = |z: Complex64| z * z - 2.0 * r * z + r;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let theta = std::f64::consts::TAU * j as f64 / points as f64;
        let z = Complex64::from_polar(1.0, theta);
        acc += q(z).powu(n) * Complex64::from_polar(1.0, -((big_n - 1) as f64) * theta);
    }
    (acc / points as f64).re
}

/// Corrected closed form `I(3, n) = n (c/(c+1))^{n−1} ((2n−1)c + 1)/(c+1)`.
pub fn i3_closed_form(n: u32, c: &BigRational) -> BigRational {
    if n == 0 {
        return BigRational::zero();
    }
    let one = BigRational::one();
    let r = c / (c + &one);
    let nn = BigRational::from_integer(BigInt::from(n));
    let two_n_minus_1 = BigRational::from_integer(BigInt::from(2 * n as i64 - 1));
    &nn * num_traits::pow(r, n as usize - 1) * (two_n_minus_1 * c + &one) / (c + one)
}

/// `γ_n = (c+1)ⁿ γ0` for any integer `n`.
pub fn gamma_sequence(n: i64, c: &BigRational, gamma0: &BigRational) -> BigRational {
    crate::scalar::powi(&(c + BigRational::one()), n) * gamma0
}

/// `I` extended by zero to every integer `N` and to `n < 0`.
fn i_total(big_n: i64, n: i64, c: &BigRational) -> Result<BigRational, HeatError> {
    if n < 0 {
        return Ok(BigRational::zero());
    }
    z_transform_i(big_n, n as u32, c)
}

/// Both sides of `γ_n[(N−1) I(N,n) − (N−2n−2) I(N−1,n)] = 2n γ_{n−1} I(N−2,n−1)`.
pub fn gamma_recurrence_sides(big_n: i64, n: i64, c: &BigRational, gamma0: &BigRational) -> Result<(BigRational, BigRational), HeatError> {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let lhs = gamma_sequence(n, c, gamma0) * (int(big_n - 1) * i_total(big_n, n, c)? - int(big_n - 2 * n - 2) * i_total(big_n - 1, n, c)?);
    let rhs = int(2 * n) * gamma_sequence(n - 1, c, gamma0) * i_total(big_n - 2, n - 1, c)?;
    Ok((lhs, rhs))
}

/// Checks the γ recurrence for every `N` in `big_ns`; any mismatch is an error.
pub fn verify_gamma_recurrence(n: i64, c: &BigRational, gamma0: &BigRational, big_ns: std::ops::RangeInclusive<i64>) -> Result<(), HeatError> {
    for big_n in big_ns {
        let (lhs, rhs) = gamma_recurrence_sides(big_n, n, c, gamma0)?;
        if lhs != rhs {
            return Err(HeatError::RecurrenceViolation { big_n, n, lhs: lhs.to_string(), rhs: rhs.to_string() });
        }
    }
    Ok(())
}

/// `v(m, n) = γ0 (c+1)ⁿ I(m + 2n + 2, n)`: the m-difference of the dilation
/// invariant solution.
pub fn dilation_invariant_solution(m: i64, n: u32, c: &BigRational, gamma0: &BigRational) -> Result<BigRational, HeatError> {
    let big_n = m + 2 * n as i64 + 2;
    Ok(gamma_sequence(n as i64, c, gamma0) * z_transform_i(big_n, n, c)?)
}

/// `Σ_m v(m,n) e^{imθ}/γ0 = e^{−iθ} (1 + c (1 − e^{−iθ})²)ⁿ`.
pub fn self_similar_transform(theta: f64, n: u32, c: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, -theta);
    let one = Complex64::new(1.0, 0.0);
    e * (one + c * (one - e) * (one - e)).powu(n)
}

/// Max over `xis` of `|V_σ(ξ) − e^{−tξ²}|` where `V_σ` is the transform at
/// `θ = σξ`, `n = t/(cσ²)` (rounded), normalised to 1 at `ξ = 0`. The target
/// is the normalised transform of `γ0 t^{−1/2} e^{−x²/4t}`.
pub fn fourier_limit_error(t: f64, c: f64, sigma: f64, xis: &[f64]) -> f64 {
    let n = (t / (c * sigma * sigma)).round() as u32;
    let tn = c * sigma * sigma * n as f64;
    xis.iter()
        .map(|&xi| (self_similar_transform(sigma * xi, n, c) - Complex64::new((-tn * xi * xi).exp(), 0.0)).norm())
        .fold(0.0, f64::max)
}

/// Max over `xis` of `|V'/V + 2tξ|`: the transformed residual of
/// `2t v_x + x v = 0` for the discrete solution, in the same normalisation.
pub fn fourier_limit_residual(t: f64, c: f64, sigma: f64, xis: &[f64]) -> f64 {
    let n = (t / (c * sigma * sigma)).round() as u32;
    let tn = c * sigma * sigma * n as f64;
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    xis.iter()
        .map(|&xi| {
            let e = Complex64::from_polar(1.0, -sigma * xi);
            let base = one + c * (one - e) * (one - e);
            let dbase = 2.0 * c * (one - e) * (i * sigma * e);
            let logderiv = -i * sigma + n as f64 * dbase / base;
            (logderiv + 2.0 * tn * xi).norm()
        })
        .fold(0.0, f64::max)
}
