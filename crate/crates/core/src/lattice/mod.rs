//! Grids, fields, shift operators and discrete derivatives.
//!
//! Storage is always (space, time). Section-specific index names are applied
//! only at the I/O boundary through [`IndexConvention`].

mod field;
mod grid;
pub mod io;
mod ops;
mod scheme;

pub use field::Field;
pub use grid::{IndexConvention, LatticeGrid};
pub use ops::{discrete_derivative, shift, Axis, DerivativeKind};
pub use scheme::{scheme_residual, Node, PartialsFn, ResidualFn, SchemeEquation, SchemeResidual};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("index ({0}, {1}) lies outside the window {2}")]
    OutOfWindow(i64, i64, Window),
    #[error("the resulting window is empty")]
    EmptyWindow,
    #[error("grid is not uniform along the {0} axis")]
    NonUniform(&'static str),
    #[error("window {window} is too small for {needed}")]
    WindowTooSmall { window: Window, needed: String },
    #[error("value count {got} does not match window size {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("invalid lattice spacing: {0}")]
    InvalidSpacing(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("malformed field data: {0}")]
    Format(String),
}

/// A relative stencil position in (space, time) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Offset {
    pub ds: i64,
    pub dt: i64,
}

impl Offset {
    pub const fn new(ds: i64, dt: i64) -> Self {
        Offset { ds, dt }
    }
}

impl std::fmt::Display for Offset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:+},{:+}]", self.ds, self.dt)
    }
}

/// Inclusive rectangular index window; `space` is m for the heat scheme and n
/// for the Toda lattice, `time` the other label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub space: (i64, i64),
    pub time: (i64, i64),
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "space [{}, {}] x time [{}, {}]",
            self.space.0, self.space.1, self.time.0, self.time.1
        )
    }
}

impl Window {
    pub const fn new(space: (i64, i64), time: (i64, i64)) -> Self {
        Window { space, time }
    }

    pub fn is_empty(&self) -> bool {
        self.space.0 > self.space.1 || self.time.0 > self.time.1
    }

    pub fn width(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.space.1 - self.space.0 + 1) as usize
        }
    }

    pub fn height(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.time.1 - self.time.0 + 1) as usize
        }
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, s: i64, t: i64) -> bool {
        (self.space.0..=self.space.1).contains(&s) && (self.time.0..=self.time.1).contains(&t)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.is_empty()
            || (self.contains(other.space.0, other.time.0) && self.contains(other.space.1, other.time.1))
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            space: (self.space.0.max(other.space.0), self.space.1.min(other.space.1)),
            time: (self.time.0.max(other.time.0), self.time.1.min(other.time.1)),
        }
    }

    /// Indices `p` such that `p + o` lies in `self`.
    pub fn translate_back(&self, o: Offset) -> Window {
        Window {
            space: (self.space.0 - o.ds, self.space.1 - o.ds),
            time: (self.time.0 - o.dt, self.time.1 - o.dt),
        }
    }

    /// Indices `p` such that `p + o` lies in `self` for every offset.
    pub fn stencil_window(&self, offsets: &[Offset]) -> Window {
        offsets
            .iter()
            .fold(*self, |w, o| w.intersect(&self.translate_back(*o)))
    }

    /// Row-major position (time-major, space fastest).
    pub fn position(&self, s: i64, t: i64) -> Option<usize> {
        if !self.contains(s, t) {
            return None;
        }
        Some((t - self.time.0) as usize * self.width() + (s - self.space.0) as usize)
    }

    /// Visits indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (s0, s1) = self.space;
        let (t0, t1) = if self.is_empty() { (1, 0) } else { self.time };
        (t0..=t1).flat_map(move |t| (s0..=s1).map(move |s| (s, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_window_shrinks() {
        let w = Window::new((0, 9), (0, 4));
        let v = w.stencil_window(&[Offset::new(0, 0), Offset::new(2, 0), Offset::new(0, 1)]);
        assert_eq!(v, Window::new((0, 7), (0, 3)));
        let v = w.stencil_window(&[Offset::new(-1, 0), Offset::new(0, -2)]);
        assert_eq!(v, Window::new((1, 9), (2, 4)));
    }

    #[test]
    fn indices_in_storage_order() {
        let w = Window::new((3, 4), (-1, 0));
        let idx: Vec<_> = w.indices().collect();
        assert_eq!(idx, vec![(3, -1), (4, -1), (3, 0), (4, 0)]);
        for (k, (s, t)) in idx.iter().enumerate() {
            assert_eq!(w.position(*s, *t), Some(k));
        }
        assert_eq!(Window::new((1, 0), (0, 0)).indices().count(), 0);
    }
}
