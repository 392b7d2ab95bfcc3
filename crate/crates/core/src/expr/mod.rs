//! Scalar expression language: parse, evaluate, differentiate.
//!
//! Expressions are immutable trees over constants, named variables, the
//! unary functions `neg, exp, ln, sin, cos, abs, sqrt`, the binary operators
//! `+ - * / ^`, and n-ary `min`/`max`. They carry the user-supplied data of
//! a problem (`g(t)`, `f(x,t)`, boundary values `b(x)`) as well as
//! manufactured solutions `u(x)`.
//!
//! Differentiation is symbolic and closed: the derivative of any expression
//! is again a [`ScalarExpr`]. Kinked functions (`abs`, `min`, `max`)
//! differentiate to their a.e. derivative; the tie at the kink is resolved
//! by the left branch (`abs`) or the first argument attaining the extremum
//! (`min`/`max`). These derivatives are represented by an internal branch
//! node that never comes out of the parser.

mod deriv;
mod parse;

pub use parse::ParseError;

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Unary operations of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Abs,
    Sqrt,
}

/// Binary operations of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// N-ary reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Min,
    Max,
}

/// Branch selection rule for piecewise nodes produced by differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRule {
    /// `arms[k]` where `k` is the index of the smallest key (first wins ties).
    ArgMin,
    /// `arms[k]` where `k` is the index of the largest key (first wins ties).
    ArgMax,
    /// `arms[0]` where `keys[0] > 0`, otherwise `arms[1]` (left branch at the
    /// kink of `abs`).
    SignSplit,
}

/// Immutable scalar expression tree.
///
/// `Branch` is internal: it appears only in derivatives of `abs`/`min`/`max`
/// and is not part of the surface grammar, so round-trip guarantees apply to
/// parsed expressions only.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Const(f64),
    Var(String),
    Unary(UnaryOp, Box<ScalarExpr>),
    Binary(BinaryOp, Box<ScalarExpr>, Box<ScalarExpr>),
    Reduce(Reduction, Vec<ScalarExpr>),
    Branch {
        rule: BranchRule,
        keys: Vec<ScalarExpr>,
        arms: Vec<ScalarExpr>,
    },
}

/// Variable bindings for evaluation. Lookups are a linear scan, which beats
/// hashing for the handful of variables (`x1`, `x2`, `t`, ...) used here.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    pairs: &'a [(&'a str, f64)],
}

impl<'a> Bindings<'a> {
    pub fn new(pairs: &'a [(&'a str, f64)]) -> Self {
        Bindings { pairs }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.pairs
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }
}

impl<'a> From<&'a [(&'a str, f64)]> for Bindings<'a> {
    fn from(pairs: &'a [(&'a str, f64)]) -> Self {
        Bindings { pairs }
    }
}

/// Evaluation failure: an unbound variable or a domain violation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

impl ScalarExpr {
    pub fn constant(c: f64) -> Self {
        ScalarExpr::Const(c)
    }

    pub fn var(name: impl Into<String>) -> Self {
        ScalarExpr::Var(name.into())
    }

    /// Parse an expression from source text.
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parse::parse(source)
    }

    /// True when the expression is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarExpr::Const(c) if *c == 0.0)
    }

    /// Free variables, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ScalarExpr::Const(_) => {}
            ScalarExpr::Var(name) => {
                out.insert(name.clone());
            }
            ScalarExpr::Unary(_, a) => a.collect_vars(out),
            ScalarExpr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ScalarExpr::Reduce(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            ScalarExpr::Branch { keys, arms, .. } => {
                for e in keys.iter().chain(arms.iter()) {
                    e.collect_vars(out);
                }
            }
        }
    }

    /// Evaluate at the given bindings. Every free variable must be bound;
    /// domain violations (log of a non-positive number, `0^negative`, ...)
    /// are reported rather than returned as NaN.
    pub fn eval(&self, bindings: &Bindings) -> Result<f64, EvalError> {
        match self {
            ScalarExpr::Const(c) => Ok(*c),
            ScalarExpr::Var(name) => bindings
                .get(name)
                .ok_or_else(|| EvalError::Unbound(name.clone())),
            ScalarExpr::Unary(op, a) => {
                let x = a.eval(bindings)?;
                eval_unary(*op, x)
            }
            ScalarExpr::Binary(op, a, b) => {
                let x = a.eval(bindings)?;
                let y = b.eval(bindings)?;
                eval_binary(*op, x, y)
            }
            ScalarExpr::Reduce(red, args) => {
                let mut best = args[0].eval(bindings)?;
                for a in &args[1..] {
                    let v = a.eval(bindings)?;
                    best = match red {
                        Reduction::Min => {
                            if v < best {
                                v
                            } else {
                                best
                            }
                        }
                        Reduction::Max => {
                            if v > best {
                                v
                            } else {
                                best
                            }
                        }
                    };
                }
                Ok(best)
            }
            ScalarExpr::Branch { rule, keys, arms } => {
                let idx = branch_index(*rule, keys, bindings)?;
                arms[idx].eval(bindings)
            }
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> ScalarExpr {
        deriv::differentiate(self, var)
    }
}

fn branch_index(
    rule: BranchRule,
    keys: &[ScalarExpr],
    bindings: &Bindings,
) -> Result<usize, EvalError> {
    match rule {
        BranchRule::SignSplit => {
            let k = keys[0].eval(bindings)?;
            Ok(if k > 0.0 { 0 } else { 1 })
        }
        BranchRule::ArgMin | BranchRule::ArgMax => {
            let mut best_idx = 0;
            let mut best = keys[0].eval(bindings)?;
            for (i, k) in keys.iter().enumerate().skip(1) {
                let v = k.eval(bindings)?;
                let better = match rule {
                    BranchRule::ArgMin => v < best,
                    _ => v > best,
                };
                if better {
                    best = v;
                    best_idx = i;
                }
            }
            Ok(best_idx)
        }
    }
}

fn eval_unary(op: UnaryOp, x: f64) -> Result<f64, EvalError> {
    match op {
        UnaryOp::Neg => Ok(-x),
        UnaryOp::Exp => Ok(x.exp()),
        UnaryOp::Ln => {
            if x <= 0.0 {
                Err(EvalError::Domain(format!("ln of non-positive value {x}")))
            } else {
                Ok(x.ln())
            }
        }
        UnaryOp::Sin => Ok(x.sin()),
        UnaryOp::Cos => Ok(x.cos()),
        UnaryOp::Abs => Ok(x.abs()),
        UnaryOp::Sqrt => {
            if x < 0.0 {
                Err(EvalError::Domain(format!("sqrt of negative value {x}")))
            } else {
                Ok(x.sqrt())
            }
        }
    }
}

fn eval_binary(op: BinaryOp, x: f64, y: f64) -> Result<f64, EvalError> {
    match op {
        BinaryOp::Add => Ok(x + y),
        BinaryOp::Sub => Ok(x - y),
        BinaryOp::Mul => Ok(x * y),
        BinaryOp::Div => {
            if y == 0.0 {
                Err(EvalError::Domain(format!("division of {x} by zero")))
            } else {
                Ok(x / y)
            }
        }
        BinaryOp::Pow => {
            if x == 0.0 && y < 0.0 {
                Err(EvalError::Domain(format!("0^{y} with negative exponent")))
            } else if x < 0.0 && y.fract() != 0.0 {
                Err(EvalError::Domain(format!(
                    "{x}^{y} with negative base and non-integer exponent"
                )))
            } else {
                Ok(x.powf(y))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Smart constructors with constant folding. No rewriting beyond that: the
// goal is to keep derivative trees small, not to simplify.
// ---------------------------------------------------------------------------

pub(crate) fn fold_unary(op: UnaryOp, a: ScalarExpr) -> ScalarExpr {
    if let ScalarExpr::Const(c) = a {
        if let Ok(v) = eval_unary(op, c) {
            if v.is_finite() {
                return ScalarExpr::Const(v);
            }
        }
    }
    if op == UnaryOp::Neg {
        if let ScalarExpr::Unary(UnaryOp::Neg, inner) = a {
            return *inner;
        }
    }
    ScalarExpr::Unary(op, Box::new(a))
}

pub(crate) fn fold_binary(op: BinaryOp, a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    if let (ScalarExpr::Const(x), ScalarExpr::Const(y)) = (&a, &b) {
        if let Ok(v) = eval_binary(op, *x, *y) {
            if v.is_finite() {
                return ScalarExpr::Const(v);
            }
        }
    }
    match op {
        BinaryOp::Add => {
            if a.is_zero() {
                return b;
            }
            if b.is_zero() {
                return a;
            }
        }
        BinaryOp::Sub => {
            if b.is_zero() {
                return a;
            }
            if a.is_zero() {
                return fold_unary(UnaryOp::Neg, b);
            }
        }
        BinaryOp::Mul => {
            if a.is_zero() || b.is_zero() {
                return ScalarExpr::Const(0.0);
            }
            if matches!(a, ScalarExpr::Const(c) if c == 1.0) {
                return b;
            }
            if matches!(b, ScalarExpr::Const(c) if c == 1.0) {
                return a;
            }
        }
        BinaryOp::Div => {
            if a.is_zero() && !b.is_zero() {
                return ScalarExpr::Const(0.0);
            }
            if matches!(b, ScalarExpr::Const(c) if c == 1.0) {
                return a;
            }
        }
        BinaryOp::Pow => {
            if matches!(b, ScalarExpr::Const(c) if c == 1.0) {
                return a;
            }
            if matches!(b, ScalarExpr::Const(c) if c == 0.0) {
                return ScalarExpr::Const(1.0);
            }
        }
    }
    ScalarExpr::Binary(op, Box::new(a), Box::new(b))
}

// ---------------------------------------------------------------------------
// Pretty-printing. Parenthesization follows the grammar so that printing a
// parsed expression and re-parsing yields a structurally identical tree.
// ---------------------------------------------------------------------------

// Precedence contexts, loosest to tightest.
const CTX_SUM: u8 = 0; // operand of + / left of -
const CTX_TERM: u8 = 1; // right of -, operand of * / left of /
const CTX_FACTOR: u8 = 2; // right of /
const CTX_ATOM: u8 = 3; // operand of ^, argument of neg

impl ScalarExpr {
    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        match self {
            ScalarExpr::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    // Negative literals re-parse through unary minus.
                    if ctx >= CTX_TERM {
                        write!(f, "(-{})", -c)
                    } else {
                        write!(f, "-{}", -c)
                    }
                } else {
                    write!(f, "{c}")
                }
            }
            ScalarExpr::Var(name) => write!(f, "{name}"),
            ScalarExpr::Unary(UnaryOp::Neg, a) => {
                if ctx >= CTX_TERM {
                    write!(f, "(-")?;
                    a.write(f, CTX_ATOM)?;
                    write!(f, ")")
                } else {
                    write!(f, "-")?;
                    a.write(f, CTX_ATOM)
                }
            }
            ScalarExpr::Unary(op, a) => {
                let name = match op {
                    UnaryOp::Exp => "exp",
                    UnaryOp::Ln => "ln",
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Abs => "abs",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}(")?;
                a.write(f, CTX_SUM)?;
                write!(f, ")")
            }
            ScalarExpr::Binary(op, a, b) => {
                let (sym, need, lctx, rctx) = match op {
                    BinaryOp::Add => ("+", CTX_TERM, CTX_SUM, CTX_TERM),
                    BinaryOp::Sub => ("-", CTX_TERM, CTX_SUM, CTX_TERM),
                    BinaryOp::Mul => ("*", CTX_FACTOR, CTX_TERM, CTX_FACTOR),
                    BinaryOp::Div => ("/", CTX_FACTOR, CTX_TERM, CTX_FACTOR),
                    BinaryOp::Pow => ("^", CTX_ATOM, CTX_ATOM, CTX_FACTOR),
                };
                let parens = ctx >= need;
                if parens {
                    write!(f, "(")?;
                }
                a.write(f, lctx)?;
                write!(f, "{sym}")?;
                b.write(f, rctx)?;
                if parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
            ScalarExpr::Reduce(red, args) => {
                let name = match red {
                    Reduction::Min => "min",
                    Reduction::Max => "max",
                };
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.write(f, CTX_SUM)?;
                }
                write!(f, ")")
            }
            ScalarExpr::Branch { rule, keys, arms } => {
                // Debug form only; branch nodes have no surface syntax.
                let name = match rule {
                    BranchRule::ArgMin => "branch_min",
                    BranchRule::ArgMax => "branch_max",
                    BranchRule::SignSplit => "branch_sign",
                };
                write!(f, "{name}(")?;
                for (i, k) in keys.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    k.write(f, CTX_SUM)?;
                }
                write!(f, "; ")?;
                for (i, a) in arms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.write(f, CTX_SUM)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, CTX_SUM)
    }
}
