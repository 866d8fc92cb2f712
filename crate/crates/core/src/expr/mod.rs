//! Expression language for candidate point fields and characteristics.
//!
//! The grammar is documented in `docs/expression-grammar.md`. Identifiers
//! `x`, `t`, `u` refer to the base node; `u[+1,0]` (and likewise `x[..]`,
//! `t[..]`) to a shifted node in (space, time) order. Any other identifier is a
//! parameter bound at evaluation time.

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::lattice::Offset;
use crate::scalar::Scalar;

pub use parser::{parse_expression, parse_point_field, PointFieldSource};

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
    pub source_text: String,
}

impl ParseError {
    pub(crate) fn new(message: impl Into<String>, span: Span, source: &str) -> Self {
        ParseError { message: message.into(), span, source_text: source.to_string() }
    }

    /// Source line with a caret marker under the offending span.
    pub fn annotated(&self) -> String {
        let start = self.span.start.min(self.source_text.len());
        let end = self.span.end.max(start + 1);
        let pad: String = self.source_text[..start].chars().map(|_| ' ').collect();
        let width = self.source_text.get(start..end.min(self.source_text.len())).map_or(1, |s| s.chars().count().max(1));
        format!("{}\n{}{}", self.source_text, pad, "^".repeat(width))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}..{}\n{}", self.message, self.span.start, self.span.end, self.annotated())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("offset {0} is not available: {1}")]
    Node(Offset, String),
    #[error("`{0}` is not representable in exact arithmetic")]
    NotExact(String),
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeVar {
    X,
    T,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(BigRational),
    Param(String, Span),
    Node(NodeVar, Offset),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Values an expression may read.
pub trait EvalContext<S> {
    fn node(&self, var: NodeVar, offset: Offset) -> Result<S, EvalError>;
    fn param(&self, name: &str) -> Option<S>;
}

impl Expr {
    pub fn eval<S: Scalar>(&self, ctx: &dyn EvalContext<S>) -> Result<S, EvalError> {
        Ok(match self {
            Expr::Number(r) => S::from_rational(r),
            Expr::Param(name, _) => ctx.param(name).ok_or_else(|| EvalError::UnknownParameter(name.clone()))?,
            Expr::Node(v, o) => ctx.node(*v, *o)?,
            Expr::Neg(e) => -e.eval(ctx)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(ctx)?, b.eval(ctx)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(EvalError::Domain("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => a.pow_scalar(&b).ok_or_else(|| EvalError::NotExact("non-integer power".into()))?,
                }
            }
            Expr::Call(f, arg) => {
                let v = arg.eval(ctx)?;
                let (name, func): (&str, fn(f64) -> f64) = match f {
                    Func::Exp => ("exp", f64::exp),
                    Func::Ln => ("ln", f64::ln),
                    Func::Sqrt => ("sqrt", f64::sqrt),
                };
                if matches!(f, Func::Ln) && v <= S::zero() {
                    return Err(EvalError::Domain(format!("ln of non-positive value {v:?}")));
                }
                if matches!(f, Func::Sqrt) && v < S::zero() {
                    return Err(EvalError::Domain(format!("sqrt of negative value {v:?}")));
                }
                v.transcendental(func).ok_or_else(|| EvalError::NotExact(name.into()))?
            }
        })
    }

    /// Every `(variable, offset)` the expression reads.
    pub fn node_refs(&self) -> BTreeSet<(NodeVar, Offset)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Node(v, o) = e {
                out.insert((*v, *o));
            }
        });
        out
    }

    /// Distinct offsets read through any variable, sorted.
    pub fn stencil(&self) -> Vec<Offset> {
        let set: BTreeSet<Offset> = self.node_refs().into_iter().map(|(_, o)| o).collect();
        set.into_iter().collect()
    }

    /// Parameter names with the span of their first occurrence.
    pub fn params(&self) -> Vec<(String, Span)> {
        let mut out: Vec<(String, Span)> = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Param(n, s) = e {
                if !out.iter().any(|(m, _)| m == n) {
                    out.push((n.clone(), *s));
                }
            }
        });
        out
    }

    /// Fails with a span-carrying error for the first parameter outside `known`.
    pub fn check_params(&self, known: &[&str], source: &str) -> Result<(), ParseError> {
        for (name, span) in self.params() {
            if !known.contains(&name.as_str()) {
                return Err(ParseError::new(
                    format!("unknown identifier `{name}` (known parameters: {})", known.join(", ")),
                    span,
                    source,
                ));
            }
        }
        Ok(())
    }

    fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        match self {
            Expr::Neg(e) | Expr::Call(_, e) => e.visit(f),
            Expr::Binary(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }
}
