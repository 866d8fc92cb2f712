use std::sync::Arc;

use super::{AbState, DttlScheme, TodaError};
use crate::heat::sampler::{sample_rng, unit_draw};
use crate::lattice::{Field, IndexConvention, LatticeGrid, Window};
use crate::symmetry::{SolutionSampler, SymmetryError};

const AMPLITUDE: f64 = 0.1;

/// Toda solutions: lattice `x = σx n + x0`, `t = σt m + t0` with random
/// origin in `[−1, 1]²`, and `u` evolved in `m` from two random rows with
/// values in `[−0.1, 0.1]`. Each new row takes a random value at one end
/// and is swept in the direction that damps perturbations (rightward for
/// `α² ≤ 1`, leftward otherwise); rows lose one cell on the right every two
/// steps.
#[derive(Debug, Clone)]
pub struct DttlSampler {
    scheme: DttlScheme,
    width: usize,
    steps: usize,
    count: usize,
    seed: u64,
}

impl DttlSampler {
    /// `steps ≥ 2` rows beyond the first; the output window is
    /// `[0, width−1] × [0, steps]`.
    pub fn new(scheme: DttlScheme, width: usize, steps: usize, count: usize, seed: u64) -> Self {
        DttlSampler { scheme, width, steps: steps.max(2), count, seed }
    }

    pub fn window(&self) -> Window {
        Window::new((0, self.width as i64 - 1), (0, self.steps as i64))
    }
}

impl SolutionSampler<f64> for DttlSampler {
    fn describe(&self) -> String {
        format!("dttl: alpha = {}, sigma_x = {}, sigma_t = {}, window {}", self.scheme.alpha, self.scheme.sigma_x, self.scheme.sigma_t, self.window())
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn count(&self) -> usize {
        self.count
    }

    fn sample(&self, index: usize) -> Result<Field<f64>, SymmetryError> {
        let mut rng = sample_rng(self.seed, index);
        let x0: f64 = unit_draw(&mut rng);
        let t0: f64 = unit_draw(&mut rng);
        let a2 = self.scheme.alpha * self.scheme.alpha;
        let full = self.width + self.steps.div_ceil(2);
        let mut rows: Vec<Vec<f64>> = (0..2).map(|_| (0..full).map(|_| AMPLITUDE * unit_draw::<f64>(&mut rng)).collect()).collect();
        for m in 0..self.steps - 1 {
            let len = (rows[m].len() - 1).min(rows[m + 1].len());
            let mut next = vec![0.0; len];
            let fail = |n: usize| SymmetryError::SamplerInfeasible(format!("nonpositive exponential at n = {n}, m = {}", m + 2));
            if a2 <= 1.0 {
                next[0] = AMPLITUDE * unit_draw::<f64>(&mut rng);
                for n in 1..len {
                    let u1 = rows[m + 1][n];
                    let rhs = (rows[m][n] - u1).exp() - a2 * ((next[n - 1] - u1).exp() - (u1 - rows[m][n + 1]).exp());
                    if rhs.is_nan() || rhs <= 0.0 {
                        return Err(fail(n));
                    }
                    next[n] = u1 - rhs.ln();
                }
            } else {
                next[len - 1] = AMPLITUDE * unit_draw::<f64>(&mut rng);
                for n in (1..len).rev() {
                    let u1 = rows[m + 1][n];
                    let rhs = ((rows[m][n] - u1).exp() - (u1 - next[n]).exp()) / a2 + (u1 - rows[m][n + 1]).exp();
                    if rhs.is_nan() || rhs <= 0.0 {
                        return Err(fail(n));
                    }
                    next[n - 1] = u1 + rhs.ln();
                }
            }
            rows.push(next);
        }
        let grid = LatticeGrid::uniform(self.window(), self.scheme.sigma_x, self.scheme.sigma_t, x0, t0, IndexConvention::Toda)
            .map_err(|e| SymmetryError::SamplerInfeasible(e.to_string()))?;
        Ok(Field::from_fn(Arc::new(grid), |n, m, _, _| rows[m as usize][n as usize]))
    }
}

/// `a = 1 + amplitude·d`, `b = amplitude·d` on `[lo, lo + len − 1]` with
/// independent draws `d ∈ [−1, 1]`; deterministic in `seed`.
pub fn random_ab_state(seed: u64, m: i64, lo: i64, len: usize, amplitude: f64) -> Result<AbState<f64>, TodaError> {
    let mut rng = sample_rng(seed, 0);
    let a = (0..len).map(|_| 1.0 + amplitude * unit_draw::<f64>(&mut rng)).collect();
    let b = (0..len).map(|_| amplitude * unit_draw::<f64>(&mut rng)).collect();
    AbState::new(m, lo, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toda::dttl_residual;

    #[test]
    fn samples_solve_the_scheme() {
        let s = DttlScheme::new(1.3, 1.0, 1.0).unwrap();
        let sampler = DttlSampler::new(s, 12, 7, 4, 5);
        for i in 0..4 {
            let f = sampler.sample(i).unwrap();
            assert_eq!(f.window(), sampler.window());
            assert!(dttl_residual(&f, 1.3).unwrap().max_abs < 1e-14);
        }
        assert_eq!(sampler.sample(2).unwrap(), sampler.sample(2).unwrap());
    }

    #[test]
    fn random_states_are_reproducible() {
        let s = random_ab_state(4, 0, 2, 6, 0.1).unwrap();
        assert_eq!((s.support_lo(), s.support_hi()), (2, 7));
        assert_eq!(s, random_ab_state(4, 0, 2, 6, 0.1).unwrap());
        assert!(s.max_deviation() <= 0.2);
    }
}
