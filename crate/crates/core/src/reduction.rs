//! Structured output of a symmetry reduction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::lattice::Window;

/// A reduced equation as stencil labels plus named coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedEquation {
    pub description: String,
    pub stencil: Vec<String>,
    pub coefficients: BTreeMap<String, Value>,
}

impl ReducedEquation {
    pub fn new(description: impl Into<String>) -> Self {
        ReducedEquation { description: description.into(), stencil: Vec::new(), coefficients: BTreeMap::new() }
    }

    pub fn stencil<I: IntoIterator<Item = S>, S: Into<String>>(mut self, points: I) -> Self {
        self.stencil = points.into_iter().map(Into::into).collect();
        self
    }

    pub fn coefficient(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.coefficients.insert(name.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub scheme: String,
    pub symmetry: String,
    pub formalism: String,
    /// The invariance condition imposed on solutions.
    pub constraint: String,
    /// Definition of the symmetry variable, when there is one.
    pub symmetry_variable: Option<String>,
    pub reduced_equation: ReducedEquation,
    pub solution_closed_form: Option<String>,
    /// Computed quantities such as exponents, roots and exact values.
    pub values: BTreeMap<String, Value>,
    /// Largest residual of the attached closed form on `window`.
    pub residual_max: Option<f64>,
    pub window: Option<Window>,
    pub notes: Vec<String>,
}

impl ReductionResult {
    pub fn new(scheme: &str, symmetry: &str, formalism: &str, constraint: impl Into<String>, reduced: ReducedEquation) -> Self {
        ReductionResult {
            scheme: scheme.to_string(),
            symmetry: symmetry.to_string(),
            formalism: formalism.to_string(),
            constraint: constraint.into(),
            symmetry_variable: None,
            reduced_equation: reduced,
            solution_closed_form: None,
            values: BTreeMap::new(),
            residual_max: None,
            window: None,
            notes: Vec::new(),
        }
    }

    pub fn value(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.values.insert(name.to_string(), v.into());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn variable(mut self, v: impl Into<String>) -> Self {
        self.symmetry_variable = Some(v.into());
        self
    }

    pub fn closed_form(mut self, s: impl Into<String>) -> Self {
        self.solution_closed_form = Some(s.into());
        self
    }

    pub fn residual(mut self, r: f64, w: Window) -> Self {
        self.residual_max = Some(r);
        self.window = Some(w);
        self
    }
}
