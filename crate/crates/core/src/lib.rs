//! Numerical toolkit for second-order operators of the form
//! `M(x, Du, D^2u) + g(u) N(x, Du, D^2u) + f(x, u) = 0`, where `N` is the
//! gradient term generated by the matrix derivative of `M`.
//!
//! The crate provides:
//!
//! - [`expr`]: a small scalar expression language (parse, evaluate,
//!   differentiate) used for `g`, `f`, boundary data and manufactured
//!   solutions;
//! - [`linalg`]: symmetric-matrix algebra (tensor products, k-traces and
//!   their gradients, the rank-one update identity);
//! - [`operators`]: the operator catalog (Laplace, m-Laplace, k-Hessian,
//!   infinity-Laplace, normalized infinity-Laplace) with homogeneity and
//!   rank-one-shift checkers;
//! - [`transform`]: the increasing change of variables `Phi_g` built from
//!   cumulative quadrature of `exp(G)`, `G = int g`, with its inverse and the
//!   transformed reaction term;
//! - [`verify`]: residual-level checks of the chain-rule identity and of the
//!   solution transfer `v = Phi_g(u)` on manufactured solutions, plus a
//!   grid-scale touching-test heuristic;
//! - [`solver`]: a 2D Dirichlet solver for the infinity-Laplace equation with
//!   gradient term on rectangles and discs;
//! - [`analysis`]: the existence/uniqueness/non-existence hypothesis
//!   quantities (`eta`, `H`, `zeta`, `S`, in-ball radius) and their verdicts.

pub mod analysis;
pub mod expr;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod quad;
pub mod solver;
pub mod transform;
pub mod verify;

pub use expr::{Bindings, EvalError, ParseError, ScalarExpr};
pub use linalg::{SymMatrix, Vector};
pub use operators::{Jet, OperatorKind, OperatorSpec};
pub use transform::{GSpec, TransformError, TransformTable};

