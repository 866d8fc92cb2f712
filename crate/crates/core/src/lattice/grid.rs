use serde::{Deserialize, Serialize};

use super::{LatticeError, Window};
use crate::scalar::{int, Scalar};

/// How the (space, time) storage indices are named at the I/O boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum IndexConvention {
    /// `(m, n)`: m spatial, n temporal.
    #[default]
    Heat,
    /// `(n, m)`: n spatial, m temporal.
    Toda,
}

impl IndexConvention {
    /// Column names for (space, time).
    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            IndexConvention::Heat => ("m", "n"),
            IndexConvention::Toda => ("n", "m"),
        }
    }
}

/// Finite index window with per-node coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid<S> {
    window: Window,
    x: Vec<S>,
    t: Vec<S>,
    sigma_x: S,
    sigma_t: S,
    x0: S,
    t0: S,
    convention: IndexConvention,
}

impl<S: Scalar> LatticeGrid<S> {
    /// `x = σx·s + x0`, `t = σt·τ + t0`.
    pub fn uniform(
        window: Window,
        sigma_x: S,
        sigma_t: S,
        x0: S,
        t0: S,
        convention: IndexConvention,
    ) -> Result<Self, LatticeError> {
        if window.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        if sigma_x <= S::zero() || sigma_t <= S::zero() {
            return Err(LatticeError::InvalidSpacing(format!(
                "sigma_x = {:?}, sigma_t = {:?}; both must be positive",
                sigma_x, sigma_t
            )));
        }
        let (x, t) = window
            .indices()
            .map(|(s, tau)| {
                (
                    sigma_x.clone() * int::<S>(s) + x0.clone(),
                    sigma_t.clone() * int::<S>(tau) + t0.clone(),
                )
            })
            .unzip();
        Ok(LatticeGrid { window, x, t, sigma_x, sigma_t, x0, t0, convention })
    }

    /// Heat lattice: `x = σx m + x0`, `t = c σx² n + t0`.
    pub fn heat(window: Window, sigma_x: S, c: S, x0: S, t0: S) -> Result<Self, LatticeError> {
        if c <= S::zero() {
            return Err(LatticeError::InvalidSpacing("c must be positive".into()));
        }
        let sigma_t = c * sigma_x.clone() * sigma_x.clone();
        Self::uniform(window, sigma_x, sigma_t, x0, t0, IndexConvention::Heat)
    }

    /// Toda lattice with the origin constants set to zero: `x = σx n`, `t = σt m`.
    pub fn toda(window: Window, sigma_x: S, sigma_t: S) -> Result<Self, LatticeError> {
        Self::uniform(window, sigma_x, sigma_t, S::zero(), S::zero(), IndexConvention::Toda)
    }

    /// Grid with explicit coordinates, listed in storage order.
    pub fn from_coordinates(
        window: Window,
        x: Vec<S>,
        t: Vec<S>,
        sigma_x: S,
        sigma_t: S,
        convention: IndexConvention,
    ) -> Result<Self, LatticeError> {
        if window.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        for v in [&x, &t] {
            if v.len() != window.len() {
                return Err(LatticeError::SizeMismatch { expected: window.len(), got: v.len() });
            }
        }
        let (s0, t0i) = (window.space.0, window.time.0);
        let x0 = x[0].clone() - sigma_x.clone() * int::<S>(s0);
        let t0 = t[0].clone() - sigma_t.clone() * int::<S>(t0i);
        Ok(LatticeGrid { window, x, t, sigma_x, sigma_t, x0, t0, convention })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    pub fn sigma_x(&self) -> &S {
        &self.sigma_x
    }

    pub fn sigma_t(&self) -> &S {
        &self.sigma_t
    }

    pub fn x0(&self) -> &S {
        &self.x0
    }

    pub fn t0(&self) -> &S {
        &self.t0
    }

    /// `σt / σx²`.
    pub fn heat_c(&self) -> S {
        self.sigma_t.clone() / (self.sigma_x.clone() * self.sigma_x.clone())
    }

    pub fn x(&self, s: i64, t: i64) -> Result<&S, LatticeError> {
        self.window
            .position(s, t)
            .map(|p| &self.x[p])
            .ok_or(LatticeError::OutOfWindow(s, t, self.window))
    }

    pub fn t(&self, s: i64, t: i64) -> Result<&S, LatticeError> {
        self.window
            .position(s, t)
            .map(|p| &self.t[p])
            .ok_or(LatticeError::OutOfWindow(s, t, self.window))
    }

    pub fn xs(&self) -> &[S] {
        &self.x
    }

    pub fn ts(&self) -> &[S] {
        &self.t
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, window: Window) -> Result<Self, LatticeError> {
        if window.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        if !self.window.contains_window(&window) {
            return Err(LatticeError::OutOfWindow(window.space.0, window.time.0, self.window));
        }
        let pick = |v: &[S]| -> Vec<S> {
            window
                .indices()
                .map(|(s, t)| v[self.window.position(s, t).unwrap()].clone())
                .collect()
        };
        Ok(LatticeGrid {
            window,
            x: pick(&self.x),
            t: pick(&self.t),
            sigma_x: self.sigma_x.clone(),
            sigma_t: self.sigma_t.clone(),
            x0: self.x0.clone(),
            t0: self.t0.clone(),
            convention: self.convention,
        })
    }

    /// Uniform spacing check along space (`x` advances by σx, `t` constant).
    pub fn is_uniform_space(&self, rel: f64) -> bool {
        self.window.indices().all(|(s, t)| {
            if s == self.window.space.1 {
                return true;
            }
            let dx = self.x(s + 1, t).unwrap().clone() - self.x(s, t).unwrap().clone();
            let dt = self.t(s + 1, t).unwrap().clone() - self.t(s, t).unwrap().clone();
            S::near(&dx, &self.sigma_x, rel) && S::near(&(dt + self.sigma_t.clone()), &self.sigma_t, rel)
        })
    }

    /// Uniform spacing check along time (`t` advances by σt, `x` constant).
    pub fn is_uniform_time(&self, rel: f64) -> bool {
        self.window.indices().all(|(s, t)| {
            if t == self.window.time.1 {
                return true;
            }
            let dt = self.t(s, t + 1).unwrap().clone() - self.t(s, t).unwrap().clone();
            let dx = self.x(s, t + 1).unwrap().clone() - self.x(s, t).unwrap().clone();
            S::near(&dt, &self.sigma_t, rel) && S::near(&(dx + self.sigma_x.clone()), &self.sigma_x, rel)
        })
    }

    /// Largest violation of the heat lattice relations
    /// `x(m+2)−2x(m+1)+x(m) = 0`, `x(n+1) = x(n)`, `t(m+1) = t(m)`,
    /// `t(n+1) − t(n) = c (x(m+1) − x(m))²`.
    pub fn heat_lattice_defect(&self, c: &S) -> S {
        let w = self.window;
        let mut worst = S::zero();
        let mut bump = |v: S| {
            if v.abs() > worst {
                worst = v.abs();
            }
        };
        for (s, t) in w.indices() {
            let x = |ds: i64, dt: i64| self.x(s + ds, t + dt).unwrap().clone();
            let tt = |ds: i64, dt: i64| self.t(s + ds, t + dt).unwrap().clone();
            if s + 2 <= w.space.1 {
                bump(x(2, 0) - int::<S>(2) * x(1, 0) + x(0, 0));
            }
            if s < w.space.1 {
                bump(tt(1, 0) - tt(0, 0));
            }
            if t < w.time.1 {
                bump(x(0, 1) - x(0, 0));
                if s < w.space.1 {
                    let dx = x(1, 0) - x(0, 0);
                    bump(tt(0, 1) - tt(0, 0) - c.clone() * dx.clone() * dx);
                }
            }
        }
        worst
    }

    /// Largest deviation from the closed form `x = σx s + x0`, `t = σt τ + t0`.
    pub fn closed_form_defect(&self) -> S {
        let mut worst = S::zero();
        for (k, (s, t)) in self.window.indices().enumerate() {
            let ex = self.sigma_x.clone() * int::<S>(s) + self.x0.clone() - self.x[k].clone();
            let et = self.sigma_t.clone() * int::<S>(t) + self.t0.clone() - self.t[k].clone();
            for e in [ex.abs(), et.abs()] {
                if e > worst {
                    worst = e;
                }
            }
        }
        worst
    }
}
