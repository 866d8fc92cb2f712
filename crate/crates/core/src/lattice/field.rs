use std::sync::Arc;

use rayon::prelude::*;

use super::{LatticeError, LatticeGrid, Window};
use crate::scalar::Scalar;

/// Values on a sub-window of a grid. Cloning is cheap for the grid part.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<S> {
    grid: Arc<LatticeGrid<S>>,
    window: Window,
    values: Vec<S>,
}

impl<S: Scalar> Field<S> {
    pub fn new(grid: Arc<LatticeGrid<S>>, window: Window, values: Vec<S>) -> Result<Self, LatticeError> {
        if window.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        if !grid.window().contains_window(&window) {
            return Err(LatticeError::OutOfWindow(window.space.0, window.time.0, grid.window()));
        }
        if values.len() != window.len() {
            return Err(LatticeError::SizeMismatch { expected: window.len(), got: values.len() });
        }
        Ok(Field { grid, window, values })
    }

    /// Field over the whole grid from a function of `(s, t, x, t_coord)`.
    pub fn from_fn<F>(grid: Arc<LatticeGrid<S>>, f: F) -> Self
    where
        F: Fn(i64, i64, &S, &S) -> S,
    {
        let window = grid.window();
        Self::from_fn_on(grid, window, f).expect("grid window is valid")
    }

    pub fn from_fn_on<F>(grid: Arc<LatticeGrid<S>>, window: Window, f: F) -> Result<Self, LatticeError>
    where
        F: Fn(i64, i64, &S, &S) -> S,
    {
        let values = window
            .indices()
            .map(|(s, t)| Ok(f(s, t, grid.x(s, t)?, grid.t(s, t)?)))
            .collect::<Result<Vec<_>, LatticeError>>()?;
        Self::new(grid, window, values)
    }

    /// Like [`Field::from_fn_on`], evaluated in parallel.
    pub fn try_from_fn_par<F, E>(grid: Arc<LatticeGrid<S>>, window: Window, f: F) -> Result<Self, E>
    where
        F: Fn(i64, i64) -> Result<S, E> + Sync + Send,
        E: Send + From<LatticeError>,
    {
        if window.is_empty() {
            return Err(LatticeError::EmptyWindow.into());
        }
        let idx: Vec<(i64, i64)> = window.indices().collect();
        let values = idx
            .par_iter()
            .map(|&(s, t)| f(s, t))
            .collect::<Result<Vec<S>, E>>()?;
        Ok(Self::new(grid, window, values)?)
    }

    pub fn grid(&self) -> &LatticeGrid<S> {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<LatticeGrid<S>> {
        &self.grid
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, s: i64, t: i64) -> Result<&S, LatticeError> {
        self.window
            .position(s, t)
            .map(|p| &self.values[p])
            .ok_or(LatticeError::OutOfWindow(s, t, self.window))
    }

    pub fn x(&self, s: i64, t: i64) -> Result<&S, LatticeError> {
        if self.window
            .contains(s, t) { self.grid.x(s, t) } else { Err(LatticeError::OutOfWindow(s, t, self.window)) }
    }

    pub fn t(&self, s: i64, t: i64) -> Result<&S, LatticeError> {
        if self.window
            .contains(s, t) { self.grid.t(s, t) } else { Err(LatticeError::OutOfWindow(s, t, self.window)) }
    }

    /// One time level as a vector ordered by space index.
    pub fn row(&self, t: i64) -> Result<Vec<S>, LatticeError> {
        (self.window.space.0..=self.window.space.1)
            .map(|s| self.get(s, t).cloned())
            .collect()
    }

    pub fn restrict(&self, window: Window) -> Result<Self, LatticeError> {
        if window.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        if !self.window.contains_window(&window) {
            return Err(LatticeError::OutOfWindow(window.space.0, window.time.0, self.window));
        }
        let values = window
            .indices()
            .map(|(s, t)| self.get(s, t).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Field::new(self.grid.clone(), window, values)
    }

    pub fn map<F: Fn(&S) -> S>(&self, f: F) -> Self {
        Field { grid: self.grid.clone(), window: self.window, values: self.values.iter().map(f).collect() }
    }

    /// `a·self + b·other` on the common window.
    pub fn combine(&self, a: &S, other: &Field<S>, b: &S) -> Result<Self, LatticeError> {
        let w = self.window.intersect(&other.window);
        if w.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        let values = w
            .indices()
            .map(|(s, t)| {
                Ok(a.clone() * self.get(s, t)?.clone() + b.clone() * other.get(s, t)?.clone())
            })
            .collect::<Result<Vec<_>, LatticeError>>()?;
        Field::new(self.grid.clone(), w, values)
    }

    pub fn max_abs(&self) -> S {
        crate::scalar::max_abs(self.values.iter())
    }

    /// Largest `|self − other|` on the common window.
    pub fn max_abs_diff(&self, other: &Field<S>) -> Result<S, LatticeError> {
        let d = self.combine(&S::one(), other, &-S::one())?;
        Ok(d.max_abs())
    }

    /// Converts every value and coordinate.
    pub fn convert<T: Scalar, F: Fn(&S) -> T>(&self, f: F) -> Result<Field<T>, LatticeError> {
        let g = &self.grid;
        let grid = LatticeGrid::from_coordinates(
            g.window(),
            g.xs().iter().map(&f).collect(),
            g.ts().iter().map(&f).collect(),
            f(g.sigma_x()),
            f(g.sigma_t()),
            g.convention(),
        )?;
        Field::new(Arc::new(grid), self.window, self.values.iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<LatticeGrid<f64>> {
        Arc::new(LatticeGrid::heat(Window::new((0, 4), (0, 2)), 1.0, 1.0, 0.0, 0.0).unwrap())
    }

    #[test]
    fn out_of_window_access_fails() {
        let f = Field::from_fn(grid(), |s, t, _, _| (s + 10 * t) as f64);
        assert_eq!(*f.get(2, 1).unwrap(), 12.0);
        assert!(f.get(5, 0).is_err());
        let r = f.restrict(Window::new((1, 2), (1, 2))).unwrap();
        assert!(r.get(0, 1).is_err());
        assert!(r.x(3, 1).is_err());
        assert_eq!(*r.get(2, 2).unwrap(), 22.0);
    }

    #[test]
    fn combine_uses_common_window() {
        let f = Field::from_fn(grid(), |s, _, _, _| s as f64);
        let g = f.restrict(Window::new((1, 3), (0, 0))).unwrap();
        let h = f.combine(&2.0, &g, &-1.0).unwrap();
        assert_eq!(h.window(), Window::new((1, 3), (0, 0)));
        assert_eq!(h.values(), &[1.0, 2.0, 3.0]);
    }
}
