//! Symbolic differentiation.
//!
//! The derivative of any expression is again a [`ScalarExpr`]. Smooth nodes
//! follow the usual calculus rules; `abs`, `min` and `max` produce a
//! [`ScalarExpr::Branch`] node carrying the a.e. derivative of each piece
//! together with the original selection keys.

use super::{
    fold_binary, fold_unary, BinaryOp, BranchRule, Reduction, ScalarExpr, UnaryOp,
};

fn add(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    fold_binary(BinaryOp::Add, a, b)
}
fn sub(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    fold_binary(BinaryOp::Sub, a, b)
}
fn mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    fold_binary(BinaryOp::Mul, a, b)
}
fn div(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    fold_binary(BinaryOp::Div, a, b)
}
fn pow(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    fold_binary(BinaryOp::Pow, a, b)
}
fn neg(a: ScalarExpr) -> ScalarExpr {
    fold_unary(UnaryOp::Neg, a)
}

pub(super) fn differentiate(e: &ScalarExpr, var: &str) -> ScalarExpr {
    match e {
        ScalarExpr::Const(_) => ScalarExpr::Const(0.0),
        ScalarExpr::Var(name) => {
            ScalarExpr::Const(if name == var { 1.0 } else { 0.0 })
        }
        ScalarExpr::Unary(op, a) => {
            let da = differentiate(a, var);
            match op {
                UnaryOp::Neg => neg(da),
                UnaryOp::Exp => mul(fold_unary(UnaryOp::Exp, (**a).clone()), da),
                UnaryOp::Ln => div(da, (**a).clone()),
                UnaryOp::Sin => mul(fold_unary(UnaryOp::Cos, (**a).clone()), da),
                UnaryOp::Cos => neg(mul(fold_unary(UnaryOp::Sin, (**a).clone()), da)),
                UnaryOp::Sqrt => div(
                    da,
                    mul(
                        ScalarExpr::Const(2.0),
                        fold_unary(UnaryOp::Sqrt, (**a).clone()),
                    ),
                ),
                // d|a| = da where a > 0, -da otherwise (left branch at 0).
                UnaryOp::Abs => ScalarExpr::Branch {
                    rule: BranchRule::SignSplit,
                    keys: vec![(**a).clone()],
                    arms: vec![da.clone(), neg(da)],
                },
            }
        }
        ScalarExpr::Binary(op, a, b) => {
            let da = differentiate(a, var);
            let db = differentiate(b, var);
            match op {
                BinaryOp::Add => add(da, db),
                BinaryOp::Sub => sub(da, db),
                BinaryOp::Mul => add(mul(da, (**b).clone()), mul((**a).clone(), db)),
                BinaryOp::Div => {
                    if db.is_zero() {
                        div(da, (**b).clone())
                    } else {
                        div(
                            sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                            pow((**b).clone(), ScalarExpr::Const(2.0)),
                        )
                    }
                }
                BinaryOp::Pow => match (&**a, &**b) {
                    // a^c -> c a^(c-1) a'
                    (_, ScalarExpr::Const(c)) => mul(
                        mul(
                            ScalarExpr::Const(*c),
                            pow((**a).clone(), ScalarExpr::Const(c - 1.0)),
                        ),
                        da,
                    ),
                    // c^b -> c^b ln(c) b'
                    (ScalarExpr::Const(_), _) => mul(
                        mul(
                            pow((**a).clone(), (**b).clone()),
                            fold_unary(UnaryOp::Ln, (**a).clone()),
                        ),
                        db,
                    ),
                    // a^b -> a^b (b' ln a + b a' / a)
                    _ => mul(
                        pow((**a).clone(), (**b).clone()),
                        add(
                            mul(db, fold_unary(UnaryOp::Ln, (**a).clone())),
                            div(mul((**b).clone(), da), (**a).clone()),
                        ),
                    ),
                },
            }
        }
        ScalarExpr::Reduce(red, args) => {
            let rule = match red {
                Reduction::Min => BranchRule::ArgMin,
                Reduction::Max => BranchRule::ArgMax,
            };
            ScalarExpr::Branch {
                rule,
                keys: args.clone(),
                arms: args.iter().map(|a| differentiate(a, var)).collect(),
            }
        }
        ScalarExpr::Branch { rule, keys, arms } => ScalarExpr::Branch {
            rule: *rule,
            keys: keys.clone(),
            arms: arms.iter().map(|a| differentiate(a, var)).collect(),
        },
    }
}
