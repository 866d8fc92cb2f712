use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::lattice::{Node, Offset};
use crate::symmetry::{EvolutionaryCharacteristic, PointVectorField, StencilView, SymmetryError};

/// Point fields of the heat system, plus two negative-control candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointBuiltin {
    /// `∂t`
    P0,
    /// `∂x`
    P1,
    /// `x∂x + 2t∂t`
    D,
    /// `u∂u`
    W,
    /// `S(x,t)∂u` with `S = (1+σx/2)^{x/σx} (1+σt/4)^{t/σt}`, a solution of the scheme.
    S,
    /// `x∂u`
    XDu,
    /// `x²∂u`
    X2Du,
}

impl PointBuiltin {
    pub const ALGEBRA: [PointBuiltin; 5] = [PointBuiltin::P0, PointBuiltin::P1, PointBuiltin::D, PointBuiltin::W, PointBuiltin::S];

    pub fn as_str(self) -> &'static str {
        match self {
            PointBuiltin::P0 => "P0",
            PointBuiltin::P1 => "P1",
            PointBuiltin::D => "D",
            PointBuiltin::W => "W",
            PointBuiltin::S => "S",
            PointBuiltin::XDu => "x_du",
            PointBuiltin::X2Du => "x2_du",
        }
    }
}

impl fmt::Display for PointBuiltin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PointBuiltin {
    type Err = SymmetryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            PointBuiltin::P0,
            PointBuiltin::P1,
            PointBuiltin::D,
            PointBuiltin::W,
            PointBuiltin::S,
            PointBuiltin::XDu,
            PointBuiltin::X2Du,
        ]
        .into_iter()
        .find(|b| b.as_str().eq_ignore_ascii_case(s.trim()))
        .ok_or_else(|| SymmetryError::UnknownOperator(s.to_string()))
    }
}

const S_RATE: f64 = 0.5;

/// Builds the point field; `S` depends on the lattice spacings.
pub fn point_field(b: PointBuiltin, sigma_x: f64, sigma_t: f64) -> PointVectorField {
    let zero = |_: f64, _: f64, _: f64| 0.0;
    match b {
        PointBuiltin::P0 => PointVectorField::from_fns("P0", zero, |_, _, _| 1.0, zero),
        PointBuiltin::P1 => PointVectorField::from_fns("P1", |_, _, _| 1.0, zero, zero),
        PointBuiltin::D => PointVectorField::from_fns("D", |x, _, _| x, |_, t, _| 2.0 * t, zero),
        PointBuiltin::W => PointVectorField::from_fns("W", zero, zero, |_, _, u| u),
        PointBuiltin::S => {
            let a = S_RATE;
            let (gx, gt) = ((1.0 + a * sigma_x).ln() / sigma_x, (1.0 + a * a * sigma_t).ln() / sigma_t);
            PointVectorField::from_fns("S", zero, zero, move |x, t, _| (gx * x + gt * t).exp())
        }
        PointBuiltin::XDu => PointVectorField::from_fns("x_du", zero, zero, |x, _, _| x),
        PointBuiltin::X2Du => PointVectorField::from_fns("x2_du", zero, zero, |x, _, _| x * x),
    }
}

/// `Q = φ − ξx (u − u(m−1))/σx − ξt (u − u(n−1))/σt` with coefficients at the
/// base node: the evolutionary form of a point field on the fixed lattice.
pub fn point_to_characteristic(x: &PointVectorField) -> EvolutionaryCharacteristic<f64> {
    let field = x.clone();
    EvolutionaryCharacteristic::new(
        format!("{}:evolutionary", x.name()),
        vec![Offset::new(0, 0), Offset::new(-1, 0), Offset::new(0, -1)],
        Arc::new(move |v: &StencilView<f64>| {
            let (xx, tt) = v.base_coordinates()?;
            let u = v.u(0, 0)?;
            let c = field.coefficients(&Node::new(xx, tt, u))?;
            let ux = (u - v.u(-1, 0)?) / v.sigma_x();
            let ut = (u - v.u(0, -1)?) / v.sigma_t();
            Ok(c[2] - c[0] * ux - c[1] * ut)
        }),
    )
}
