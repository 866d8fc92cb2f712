//! Scalar arithmetic shared by every module: IEEE doubles or exact rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Environment variable that selects the default arithmetic mode.
pub const MODE_ENV_VAR: &str = "LATSYM_MODE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum ArithmeticMode {
    #[default]
    Double,
    Rational,
}


impl ArithmeticMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArithmeticMode::Double => "double",
            ArithmeticMode::Rational => "rational",
        }
    }

    /// Reads `LATSYM_MODE`; unset means `None`, an unknown value is an error.
    pub fn from_env() -> Result<Option<Self>, ScalarError> {
        match std::env::var(MODE_ENV_VAR) {
            Ok(v) if v.trim().is_empty() => Ok(None),
            Ok(v) => v.parse().map(Some),
            Err(_) => Ok(None),
        }
    }
}

impl fmt::Display for ArithmeticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ArithmeticMode {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" | "float" => Ok(ArithmeticMode::Double),
            "rational" | "exact" => Ok(ArithmeticMode::Rational),
            other => Err(ScalarError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("unknown arithmetic mode `{0}` (expected `double` or `rational`)")]
    UnknownMode(String),
    #[error("cannot parse `{0}` as a number")]
    Parse(String),
    #[error("value {0} has no exact rational representation")]
    NotFinite(f64),
    #[error("expected a JSON number or a \"p/q\" string, found {0}")]
    Json(String),
}

/// Field-like numeric type. Implemented for `f64` and `BigRational`.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + fmt::Debug + Send + Sync + 'static
{
    const MODE: ArithmeticMode;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts an f64; rationals take the exact binary value.
    fn from_f64_checked(v: f64) -> Result<Self, ScalarError>;

    /// `a ≈ b` with relative tolerance `rel` in double mode, equality in rational mode.
    fn near(a: &Self, b: &Self, rel: f64) -> bool;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self, ScalarError>;

    /// Parses decimal, scientific, or `p/q` notation.
    fn parse_scalar(s: &str) -> Result<Self, ScalarError>;

    fn render(&self) -> String;

    fn from_rational(r: &BigRational) -> Self;

    /// Applies a transcendental function; `None` when the result is not
    /// representable in this arithmetic.
    fn transcendental(&self, f: fn(f64) -> f64) -> Option<Self>;

    /// `self^e`; exact arithmetic supports integer exponents only.
    fn pow_scalar(&self, e: &Self) -> Option<Self>;
}

pub fn int<S: Scalar>(v: i64) -> S {
    S::from_i64(v).expect("every i64 is representable")
}

pub fn ratio<S: Scalar>(p: i64, q: i64) -> S {
    int::<S>(p) / int::<S>(q)
}

pub fn powi<S: Scalar>(base: &S, exp: i64) -> S {
    let mut acc = S::one();
    let mut b = if exp < 0 { S::one() / base.clone() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b.clone();
        }
        b = b.clone() * b;
        e >>= 1;
    }
    acc
}

pub fn max_abs<'a, S: Scalar, I: IntoIterator<Item = &'a S>>(values: I) -> S {
    values
        .into_iter()
        .fold(S::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
}

impl Scalar for f64 {
    const MODE: ArithmeticMode = ArithmeticMode::Double;

    fn from_f64_checked(v: f64) -> Result<Self, ScalarError> {
        Ok(v)
    }

    fn near(a: &Self, b: &Self, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.to_string()))
    }

    fn from_json(v: &Value) -> Result<Self, ScalarError> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| ScalarError::Json(v.to_string())),
            Value::String(s) => f64::parse_scalar(s),
            other => Err(ScalarError::Json(other.to_string())),
        }
    }

    fn parse_scalar(s: &str) -> Result<Self, ScalarError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
            let q: f64 = q.trim().parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
            return Ok(p / q);
        }
        s.parse().map_err(|_| ScalarError::Parse(s.to_string()))
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn transcendental(&self, f: fn(f64) -> f64) -> Option<Self> {
        Some(f(*self))
    }

    fn pow_scalar(&self, e: &Self) -> Option<Self> {
        if e.fract() == 0.0 && e.abs() < 1e9 {
            Some(self.powi(*e as i32))
        } else {
            Some(self.powf(*e))
        }
    }
}

impl Scalar for BigRational {
    const MODE: ArithmeticMode = ArithmeticMode::Rational;

    fn from_f64_checked(v: f64) -> Result<Self, ScalarError> {
        BigRational::from_float(v).ok_or(ScalarError::NotFinite(v))
    }

    fn near(a: &Self, b: &Self, _rel: f64) -> bool {
        a == b
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self, ScalarError> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigRational::from_integer(i.into()))
                } else {
                    parse_rational(&n.to_string())
                }
            }
            other => Err(ScalarError::Json(other.to_string())),
        }
    }

    fn parse_scalar(s: &str) -> Result<Self, ScalarError> {
        parse_rational(s)
    }

    fn render(&self) -> String {
        format_rational(self)
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn transcendental(&self, _f: fn(f64) -> f64) -> Option<Self> {
        None
    }

    fn pow_scalar(&self, e: &Self) -> Option<Self> {
        if !e.is_integer() || (self.is_zero() && e.is_negative()) {
            return None;
        }
        e.to_integer().to_i64().map(|k| powi(self, k))
    }
}

/// `p/q` in lowest terms; integers render without a denominator.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `-1.25e-3`, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut r = BigRational::from_integer(n);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}
