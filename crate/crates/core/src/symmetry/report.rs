use serde::{Deserialize, Serialize};

use crate::scalar::ArithmeticMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Above tolerance, but not by enough on enough samples to call it a failure.
    Inconclusive,
}

impl Verdict {
    /// Pass iff `max ≤ tol`. Fail needs at least 10% of samples above `100·tol`.
    pub fn decide(max_abs: f64, tol: f64, samples_over: usize, samples: usize) -> Verdict {
        if max_abs <= tol {
            Verdict::Pass
        } else if samples > 0 && samples_over * 10 >= samples && samples_over > 0 {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formalism {
    Point,
    Evolutionary,
    CommutingFlow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationReport {
    pub equation: String,
    pub max_abs_residual: f64,
    pub points_evaluated: usize,
    /// Largest |E| on the sampled configurations; confirms they lie on the solution set.
    pub max_scheme_residual: f64,
}

impl EquationReport {
    pub fn empty(name: &str) -> Self {
        EquationReport { equation: name.to_string(), max_abs_residual: 0.0, points_evaluated: 0, max_scheme_residual: 0.0 }
    }

    pub fn merge(mut self, other: &EquationReport) -> Self {
        self.max_abs_residual = self.max_abs_residual.max(other.max_abs_residual);
        self.max_scheme_residual = self.max_scheme_residual.max(other.max_scheme_residual);
        self.points_evaluated += other.points_evaluated;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub symmetry: String,
    pub formalism: Formalism,
    pub sampler: String,
    pub seed: u64,
    pub arithmetic_mode: ArithmeticMode,
    pub tolerance: f64,
    pub max_abs_residual: f64,
    pub samples_tested: usize,
    pub samples_over_fail_threshold: usize,
    pub per_equation: Vec<EquationReport>,
    pub verdict: Verdict,
}

impl SymmetryReport {
    /// Folds per-sample equation reports; the fold is associative.
    pub(crate) fn assemble(
        symmetry: &str,
        formalism: Formalism,
        sampler: String,
        seed: u64,
        mode: ArithmeticMode,
        tolerance: f64,
        per_sample: Vec<Vec<EquationReport>>,
    ) -> SymmetryReport {
        let samples_tested = per_sample.len();
        let samples_over_fail_threshold = per_sample
            .iter()
            .filter(|eqs| eqs.iter().any(|e| e.max_abs_residual > 100.0 * tolerance))
            .count();
        let mut per_equation: Vec<EquationReport> = Vec::new();
        for eqs in &per_sample {
            for e in eqs {
                match per_equation.iter_mut().find(|p| p.equation == e.equation) {
                    Some(p) => *p = p.clone().merge(e),
                    None => per_equation.push(e.clone()),
                }
            }
        }
        let max_abs_residual = per_equation.iter().map(|e| e.max_abs_residual).fold(0.0, f64::max);
        let verdict = Verdict::decide(max_abs_residual, tolerance, samples_over_fail_threshold, samples_tested);
        SymmetryReport {
            symmetry: symmetry.to_string(),
            formalism,
            sampler,
            seed,
            arithmetic_mode: mode,
            tolerance,
            max_abs_residual,
            samples_tested,
            samples_over_fail_threshold,
            per_equation,
            verdict,
        }
    }
}
