use serde::{Deserialize, Serialize};

use super::{Field, LatticeError, Offset};
use crate::scalar::{int, Scalar};

/// Relative tolerance used to decide that a double-precision grid is uniform.
const UNIFORM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeKind {
    Forward,
    Backward,
    Symmetric,
    SecondForward,
}

/// `result(s, t) = f(s + ds, t + dt)` wherever both sides are defined.
pub fn shift<S: Scalar>(f: &Field<S>, ds: i64, dt: i64) -> Result<Field<S>, LatticeError> {
    let w = f
        .window()
        .translate_back(Offset::new(ds, dt))
        .intersect(&f.grid().window());
    if w.is_empty() {
        return Err(LatticeError::EmptyWindow);
    }
    let values = w
        .indices()
        .map(|(s, t)| f.get(s + ds, t + dt).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    Field::new(f.grid_arc().clone(), w, values)
}

/// Discrete derivative along one axis on the correspondingly shrunken window.
pub fn discrete_derivative<S: Scalar>(
    f: &Field<S>,
    axis: Axis,
    kind: DerivativeKind,
) -> Result<Field<S>, LatticeError> {
    let grid = f.grid();
    let (uniform, sigma, unit) = match axis {
        Axis::X => (grid.is_uniform_space(UNIFORM_REL_TOL), grid.sigma_x().clone(), Offset::new(1, 0)),
        Axis::T => (grid.is_uniform_time(UNIFORM_REL_TOL), grid.sigma_t().clone(), Offset::new(0, 1)),
    };
    if !uniform {
        return Err(LatticeError::NonUniform(match axis {
            Axis::X => "x",
            Axis::T => "t",
        }));
    }
    let at = |k: i64| Offset::new(unit.ds * k, unit.dt * k);
    // (offset multiple, weight) pairs and the common divisor.
    let (terms, denom): (Vec<(i64, i64)>, S) = match kind {
        DerivativeKind::Forward => (vec![(1, 1), (0, -1)], sigma),
        DerivativeKind::Backward => (vec![(0, 1), (-1, -1)], sigma),
        DerivativeKind::Symmetric => (vec![(1, 1), (-1, -1)], int::<S>(2) * sigma),
        DerivativeKind::SecondForward => (vec![(2, 1), (1, -2), (0, 1)], sigma.clone() * sigma),
    };
    let offsets: Vec<Offset> = terms.iter().map(|(k, _)| at(*k)).collect();
    let w = f.window().stencil_window(&offsets);
    if w.is_empty() {
        return Err(LatticeError::WindowTooSmall { window: f.window(), needed: format!("a {kind:?} difference along {axis:?}") });
    }
    let values = w
        .indices()
        .map(|(s, t)| {
            let mut acc = S::zero();
            for ((_, wgt), o) in terms.iter().zip(&offsets) {
                acc = acc + int::<S>(*wgt) * f.get(s + o.ds, t + o.dt)?.clone();
            }
            Ok(acc / denom.clone())
        })
        .collect::<Result<Vec<_>, LatticeError>>()?;
    Field::new(f.grid_arc().clone(), w, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeGrid, Window};
    use crate::scalar::rat;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn rgrid(sx: BigRational, c: BigRational) -> Arc<LatticeGrid<BigRational>> {
        Arc::new(LatticeGrid::heat(Window::new((-2, 8), (0, 5)), sx, c, rat(0, 1), rat(0, 1)).unwrap())
    }

    #[test]
    fn shift_identity_and_linear() {
        let g = rgrid(rat(1, 1), rat(1, 1));
        let f = Field::from_fn(g, |s, _, _, _| rat(s, 1));
        assert_eq!(shift(&f, 0, 0).unwrap(), f);
        let h = shift(&f, 1, 0).unwrap();
        assert_eq!(h.window(), Window::new((-2, 7), (0, 5)));
        for (s, t) in h.window().indices() {
            assert_eq!(*h.get(s, t).unwrap(), rat(s + 1, 1));
        }
    }

    #[test]
    fn shift_of_exponential_solution_doubles() {
        // u = (1 + a σx)^m (1 + a² σt)^n with a = σx = σt = 1.
        let g = rgrid(rat(1, 1), rat(1, 1));
        let f = Field::from_fn(g, |m, n, _, _| crate::scalar::powi(&rat(2, 1), m + n));
        let h = shift(&f, 1, 0).unwrap();
        for (m, n) in h.window().indices() {
            assert_eq!(*h.get(m, n).unwrap(), rat(2, 1) * f.get(m, n).unwrap().clone());
        }
    }

    #[test]
    fn derivative_examples() {
        let g = rgrid(rat(1, 2), rat(2, 1));
        let constant = Field::from_fn(g.clone(), |_, _, _, _| rat(7, 3));
        for axis in [Axis::X, Axis::T] {
            for kind in [
                DerivativeKind::Forward,
                DerivativeKind::Backward,
                DerivativeKind::Symmetric,
                DerivativeKind::SecondForward,
            ] {
                let d = discrete_derivative(&constant, axis, kind).unwrap();
                assert!(d.values().iter().all(|v| *v == rat(0, 1)));
            }
        }
        let xfield = Field::from_fn(g, |_, _, x, _| x.clone());
        let d = discrete_derivative(&xfield, Axis::X, DerivativeKind::Forward).unwrap();
        assert!(d.values().iter().all(|v| *v == rat(1, 1)));

        let g1 = rgrid(rat(1, 1), rat(1, 1));
        let sq = Field::from_fn(g1, |m, _, _, _| rat(m * m, 1));
        let d2 = discrete_derivative(&sq, Axis::X, DerivativeKind::SecondForward).unwrap();
        assert!(d2.values().iter().all(|v| *v == rat(2, 1)));
    }

    #[test]
    fn non_uniform_axis_is_rejected() {
        let w = Window::new((0, 2), (0, 0));
        let grid = LatticeGrid::from_coordinates(
            w,
            vec![0.0, 1.0, 3.0],
            vec![0.0; 3],
            1.0,
            1.0,
            crate::lattice::IndexConvention::Heat,
        )
        .unwrap();
        let f = Field::from_fn(Arc::new(grid), |_, _, x, _| *x);
        assert!(matches!(
            discrete_derivative(&f, Axis::X, DerivativeKind::Forward),
            Err(LatticeError::NonUniform("x"))
        ));
    }

    fn random_field(vals: Vec<i64>) -> Field<BigRational> {
        let g = Arc::new(
            LatticeGrid::heat(Window::new((0, 5), (0, 4)), rat(1, 2), rat(1, 3), rat(1, 5), rat(0, 1)).unwrap(),
        );
        let w = g.window();
        Field::new(g, w, vals.into_iter().map(|v| rat(v, 7)).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn shift_composition(vals in proptest::collection::vec(-50i64..50, 30), a in -2i64..3, b in -2i64..3, c in -2i64..3, d in -2i64..3) {
            let f = random_field(vals);
            if let (Ok(g), Ok(direct)) = (shift(&f, a, b).and_then(|g| shift(&g, c, d)), shift(&f, a + c, b + d)) {
                for (s, t) in g.window().indices() {
                    prop_assert_eq!(g.get(s, t).unwrap(), direct.get(s, t).unwrap());
                }
            }
        }

        #[test]
        fn derivatives_commute_with_shift(vals in proptest::collection::vec(-50i64..50, 30), ds in -1i64..2, dt in -1i64..2) {
            let f = random_field(vals);
            for axis in [Axis::X, Axis::T] {
                for kind in [DerivativeKind::Forward, DerivativeKind::Backward] {
                    let a = shift(&discrete_derivative(&f, axis, kind).unwrap(), ds, dt);
                    let b = discrete_derivative(&shift(&f, ds, dt).unwrap(), axis, kind);
                    if let (Ok(a), Ok(b)) = (a, b) {
                        let w = a.window().intersect(&b.window());
                        for (s, t) in w.indices() {
                            prop_assert_eq!(a.get(s, t).unwrap(), b.get(s, t).unwrap());
                        }
                    }
                }
            }
        }

        #[test]
        fn symmetric_is_mean_of_one_sided(vals in proptest::collection::vec(-50i64..50, 30)) {
            let f = random_field(vals);
            for axis in [Axis::X, Axis::T] {
                let fw = discrete_derivative(&f, axis, DerivativeKind::Forward).unwrap();
                let bw = discrete_derivative(&f, axis, DerivativeKind::Backward).unwrap();
                let sy = discrete_derivative(&f, axis, DerivativeKind::Symmetric).unwrap();
                let mean = fw.combine(&rat(1, 2), &bw, &rat(1, 2)).unwrap();
                prop_assert_eq!(mean.window(), sy.window());
                prop_assert_eq!(mean.values(), sy.values());
            }
        }
    }
}
