//! The increasing change of variables built from a sign-split reaction
//! coefficient `g`:
//!
//! ```text
//! Phi(t) = int_0^t exp(G(s)) ds,     G(s) = int_0^s g
//! ```
//!
//! `Phi` is realized as a cumulative-quadrature table on a finite working
//! interval, with evaluation anywhere in range (nearest knot plus one local
//! quadrature step), a bracketed-Newton inverse, and cubic-Hermite fast
//! paths for solver inner loops. The transformed reaction term
//! `h(x, s) = exp(k G(Phi^{-1}(s))) f(x, Phi^{-1}(s))` with
//! `k = alpha + beta + 1` is exposed through [`TransformedReaction`].
//!
//! Values outside the working interval are refused rather than
//! extrapolated: the analytic map is onto all of the real line, but a finite
//! table cannot certify anything beyond what it integrated.

use crate::expr::{Bindings, EvalError, ScalarExpr};
use crate::operators::OperatorSpec;
use crate::quad::{
    adaptive_simpson, cumulative_adaptive_simpson, eval_cumulative, CumulativeTable, QuadError,
};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("sign condition violated: g({t}) = {value} on the {side} tail")]
    SignCheck { t: f64, value: f64, side: &'static str },
    #[error("g evaluation failed at t = {t}: {source}")]
    GEval { t: f64, source: EvalError },
    #[error("expression evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("quadrature failed: {0}")]
    Quad(#[from] QuadError),
    #[error("argument {value} outside table range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("sample {index} ({value}) outside table range")]
    SampleOutOfRange { index: usize, value: f64 },
    #[error("table is not strictly increasing near t = {t}")]
    NotIncreasing { t: f64 },
    #[error("inverse iteration failed for s = {s}")]
    InverseFailed { s: f64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Reaction coefficient `g(t)` with its declared sign-change threshold
/// `s0 >= 0`: `g >= 0` on `[s0, inf)` and `g <= 0` on `(-inf, -s0]`.
///
/// The tail condition is spot-checked on a sampled grid of span `t_check`
/// past the threshold (a global analytic hypothesis cannot be proven by
/// sampling; the check catches misdeclared configurations). `t_check = 0`
/// disables the tail check for coefficients used on a finite interval only.
#[derive(Debug, Clone, PartialEq)]
pub struct GSpec {
    g: ScalarExpr,
    s0: f64,
    t_check: f64,
}

const SIGN_TOL: f64 = 1e-12;
const SIGN_SAMPLES: usize = 10_000;

impl GSpec {
    pub fn new(g: ScalarExpr, s0: f64) -> Result<Self, TransformError> {
        Self::with_tail_check(g, s0, 50.0)
    }

    pub fn with_tail_check(g: ScalarExpr, s0: f64, t_check: f64) -> Result<Self, TransformError> {
        if !(s0 >= 0.0) {
            return Err(TransformError::BadConfig(format!(
                "s0 must be nonnegative, got {s0}"
            )));
        }
        if !(t_check >= 0.0) {
            return Err(TransformError::BadConfig(format!(
                "t_check must be nonnegative, got {t_check}"
            )));
        }
        let spec = GSpec { g, s0, t_check };
        spec.check_sign()?;
        Ok(spec)
    }

    pub fn zero() -> Self {
        GSpec {
            g: ScalarExpr::Const(0.0),
            s0: 0.0,
            t_check: 0.0,
        }
    }

    pub fn expr(&self) -> &ScalarExpr {
        &self.g
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero()
    }

    pub fn eval(&self, t: f64) -> Result<f64, TransformError> {
        let pairs = [("t", t)];
        self.g
            .eval(&Bindings::new(&pairs))
            .map_err(|source| TransformError::GEval { t, source })
    }

    fn check_sign(&self) -> Result<(), TransformError> {
        if self.t_check == 0.0 {
            return Ok(());
        }
        let n = SIGN_SAMPLES;
        for i in 0..n {
            let frac = i as f64 / (n - 1) as f64;
            let t_pos = self.s0 + frac * self.t_check;
            let v = self.eval(t_pos)?;
            if v < -SIGN_TOL {
                return Err(TransformError::SignCheck {
                    t: t_pos,
                    value: v,
                    side: "positive",
                });
            }
            let t_neg = -self.s0 - frac * self.t_check;
            let v = self.eval(t_neg)?;
            if v > SIGN_TOL {
                return Err(TransformError::SignCheck {
                    t: t_neg,
                    value: v,
                    side: "negative",
                });
            }
        }
        Ok(())
    }
}

/// Numerical realization of the change of variables on `[t_min, t_max]`.
#[derive(Debug, Clone)]
pub struct TransformTable {
    g_spec: GSpec,
    t_min: f64,
    t_max: f64,
    quad_tol: f64,
    /// Cumulative table of `g` (for evaluating `G` anywhere).
    g_cum: CumulativeTable,
    /// Knots of the `Phi` pass, with per-knot data.
    knots: Vec<f64>,
    g_at: Vec<f64>,
    big_g: Vec<f64>,
    phi_vals: Vec<f64>,
    phi_prime: Vec<f64>,
    identity: bool,
}

const MIN_PANELS: usize = 128;

impl TransformTable {
    /// Build the table by cumulative adaptive Simpson quadrature: first `G`
    /// from `g`, then `Phi` from `exp(G)`.
    pub fn build(
        g_spec: GSpec,
        t_min: f64,
        t_max: f64,
        quad_tol: f64,
    ) -> Result<Self, TransformError> {
        if !(t_min < 0.0 && 0.0 < t_max) {
            return Err(TransformError::BadConfig(format!(
                "working interval must straddle 0, got [{t_min}, {t_max}]"
            )));
        }
        if !(quad_tol > 0.0) {
            return Err(TransformError::BadConfig(format!(
                "quad_tol must be positive, got {quad_tol}"
            )));
        }

        if g_spec.is_zero() {
            // g == 0 exactly: G == 0 and Phi is the identity.
            let n = MIN_PANELS + 1;
            let knots: Vec<f64> = (0..n)
                .map(|i| t_min + (t_max - t_min) * i as f64 / (n - 1) as f64)
                .collect();
            return Ok(TransformTable {
                g_spec,
                t_min,
                t_max,
                quad_tol,
                g_cum: CumulativeTable {
                    knots: knots.clone(),
                    values: vec![0.0; n],
                },
                g_at: vec![0.0; n],
                big_g: vec![0.0; n],
                phi_vals: knots.clone(),
                phi_prime: vec![1.0; n],
                knots,
                identity: true,
            });
        }

        let g_fn = |t: f64| -> Result<f64, QuadError> {
            g_spec.eval(t).map_err(|e| QuadError::Eval {
                t,
                message: e.to_string(),
            })
        };
        let g_cum = cumulative_adaptive_simpson(&g_fn, t_min, t_max, 0.0, quad_tol, MIN_PANELS)?;

        let exp_g = |s: f64| -> Result<f64, QuadError> {
            Ok(eval_cumulative(&g_cum, &g_fn, s, quad_tol)?.exp())
        };
        let phi_cum =
            cumulative_adaptive_simpson(&exp_g, t_min, t_max, 0.0, quad_tol, MIN_PANELS)?;

        let knots = phi_cum.knots.clone();
        let phi_vals = phi_cum.values.clone();
        let mut g_at = Vec::with_capacity(knots.len());
        let mut big_g = Vec::with_capacity(knots.len());
        let mut phi_prime = Vec::with_capacity(knots.len());
        for &t in &knots {
            let gv = g_spec.eval(t)?;
            let gg = eval_cumulative(&g_cum, &g_fn, t, quad_tol)?;
            g_at.push(gv);
            big_g.push(gg);
            phi_prime.push(gg.exp());
        }
        for w in phi_vals.windows(2).zip(knots.windows(2)) {
            if !(w.0[1] > w.0[0]) {
                return Err(TransformError::NotIncreasing { t: w.1[0] });
            }
        }

        Ok(TransformTable {
            g_spec,
            t_min,
            t_max,
            quad_tol,
            g_cum,
            knots,
            g_at,
            big_g,
            phi_vals,
            phi_prime,
            identity: false,
        })
    }

    pub fn g_spec(&self) -> &GSpec {
        &self.g_spec
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn phi_at_knots(&self) -> &[f64] {
        &self.phi_vals
    }

    /// Range of `Phi` over the working interval.
    pub fn s_range(&self) -> (f64, f64) {
        (self.phi_vals[0], *self.phi_vals.last().unwrap())
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    fn check_t(&self, t: f64) -> Result<(), TransformError> {
        if t < self.t_min || t > self.t_max || !t.is_finite() {
            Err(TransformError::OutOfRange {
                value: t,
                lo: self.t_min,
                hi: self.t_max,
            })
        } else {
            Ok(())
        }
    }

    fn g_fn(&self) -> impl Fn(f64) -> Result<f64, QuadError> + '_ {
        move |t: f64| {
            self.g_spec.eval(t).map_err(|e| QuadError::Eval {
                t,
                message: e.to_string(),
            })
        }
    }

    /// `G(t) = int_0^t g`, exact path (table plus local quadrature).
    pub fn g_cumulative(&self, t: f64) -> Result<f64, TransformError> {
        self.check_t(t)?;
        if self.identity {
            return Ok(0.0);
        }
        Ok(eval_cumulative(&self.g_cum, &self.g_fn(), t, self.quad_tol)?)
    }

    /// `Phi'(t) = exp(G(t))`.
    pub fn phi_prime(&self, t: f64) -> Result<f64, TransformError> {
        Ok(self.g_cumulative(t)?.exp())
    }

    /// `Phi(t)`, exact path.
    pub fn phi(&self, t: f64) -> Result<f64, TransformError> {
        self.check_t(t)?;
        if self.identity {
            return Ok(t);
        }
        let idx = nearest_idx(&self.knots, t);
        let from = self.knots[idx];
        if t == from {
            return Ok(self.phi_vals[idx]);
        }
        let g_fn = self.g_fn();
        let exp_g = |s: f64| -> Result<f64, QuadError> {
            Ok(eval_cumulative(&self.g_cum, &g_fn, s, self.quad_tol)?.exp())
        };
        Ok(self.phi_vals[idx] + adaptive_simpson(&exp_g, from, t, self.quad_tol)?)
    }

    /// Inverse of `Phi` by bracketed Newton with bisection fallback.
    pub fn phi_inv(&self, s: f64) -> Result<f64, TransformError> {
        let (lo_s, hi_s) = self.s_range();
        if s < lo_s || s > hi_s || !s.is_finite() {
            return Err(TransformError::OutOfRange {
                value: s,
                lo: lo_s,
                hi: hi_s,
            });
        }
        if self.identity {
            return Ok(s);
        }
        // Bracket between adjacent knots.
        let idx = self.phi_vals.partition_point(|&v| v < s);
        if idx == 0 {
            return Ok(self.knots[0]);
        }
        if idx >= self.knots.len() {
            return Ok(*self.knots.last().unwrap());
        }
        let mut lo = self.knots[idx - 1];
        let mut hi = self.knots[idx];
        let (mut flo, fhi) = (self.phi_vals[idx - 1] - s, self.phi_vals[idx] - s);
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        // Newton from the secant guess, guarded by the bracket; converge
        // well past the documented 1e-12 so downstream difference quotients
        // of the inverse stay clean.
        let mut t = lo + (hi - lo) * (-flo) / (fhi - flo);
        let tol = 1e-14;
        for _ in 0..80 {
            let ft = self.phi(t)? - s;
            if ft == 0.0 {
                return Ok(t);
            }
            if (ft < 0.0) == (flo < 0.0) {
                lo = t;
                flo = ft;
            } else {
                hi = t;
            }
            let dphi = self.phi_prime(t)?;
            let mut next = t - ft / dphi;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= tol * t.abs().max(1.0) {
                return Ok(next);
            }
            t = next;
        }
        Err(TransformError::InverseFailed { s })
    }

    // --- cubic-Hermite fast paths (solver inner loops) ---

    /// `G(t)` by cubic Hermite interpolation on the knot mesh (exact
    /// derivative data `G' = g` at the knots).
    pub fn g_cumulative_fast(&self, t: f64) -> Result<f64, TransformError> {
        self.check_t(t)?;
        if self.identity {
            return Ok(0.0);
        }
        Ok(hermite(&self.knots, &self.big_g, &self.g_at, t))
    }

    /// `Phi(t)` by cubic Hermite interpolation (`Phi' = exp(G)` at knots).
    pub fn phi_fast(&self, t: f64) -> Result<f64, TransformError> {
        self.check_t(t)?;
        if self.identity {
            return Ok(t);
        }
        Ok(hermite(&self.knots, &self.phi_vals, &self.phi_prime, t))
    }

    /// Inverse of the Hermite interpolant (bisection-safeguarded Newton on
    /// the local cubic).
    pub fn phi_inv_fast(&self, s: f64) -> Result<f64, TransformError> {
        let (lo_s, hi_s) = self.s_range();
        if s < lo_s || s > hi_s || !s.is_finite() {
            return Err(TransformError::OutOfRange {
                value: s,
                lo: lo_s,
                hi: hi_s,
            });
        }
        if self.identity {
            return Ok(s);
        }
        let idx = self.phi_vals.partition_point(|&v| v < s);
        if idx == 0 {
            return Ok(self.knots[0]);
        }
        if idx >= self.knots.len() {
            return Ok(*self.knots.last().unwrap());
        }
        let (t0, t1) = (self.knots[idx - 1], self.knots[idx]);
        let (y0, y1) = (self.phi_vals[idx - 1], self.phi_vals[idx]);
        let (d0, d1) = (self.phi_prime[idx - 1], self.phi_prime[idx]);
        let mut lo = t0;
        let mut hi = t1;
        let mut t = t0 + (t1 - t0) * (s - y0) / (y1 - y0);
        for _ in 0..40 {
            let (val, slope) = hermite_with_slope(t0, t1, y0, y1, d0, d1, t);
            let ft = val - s;
            if ft.abs() <= 1e-13 * (1.0 + s.abs()) {
                return Ok(t);
            }
            if ft < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = t - ft / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= f64::EPSILON * t.abs().max(1.0) {
                return Ok(next);
            }
            t = next;
        }
        Ok(t)
    }

    /// Apply `Phi` to a field of samples.
    pub fn push_solution(&self, u_values: &[f64]) -> Result<Vec<f64>, TransformError> {
        u_values
            .iter()
            .enumerate()
            .map(|(index, &u)| {
                self.phi(u).map_err(|_| TransformError::SampleOutOfRange {
                    index,
                    value: u,
                })
            })
            .collect()
    }

    /// Apply `Phi^{-1}` to a field of samples.
    pub fn pull_solution(&self, v_values: &[f64]) -> Result<Vec<f64>, TransformError> {
        v_values
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                self.phi_inv(v)
                    .map_err(|_| TransformError::SampleOutOfRange { index, value: v })
            })
            .collect()
    }

    /// CSV export: `t, G, Phi, Phi_prime` with 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "t,G,Phi,Phi_prime")?;
        for i in 0..self.knots.len() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.knots[i], self.big_g[i], self.phi_vals[i], self.phi_prime[i]
            )?;
        }
        Ok(())
    }
}

fn nearest_idx(knots: &[f64], t: f64) -> usize {
    let n = knots.len();
    let idx = knots.partition_point(|&k| k < t);
    if idx == 0 {
        0
    } else if idx >= n {
        n - 1
    } else if (t - knots[idx - 1]).abs() <= (knots[idx] - t).abs() {
        idx - 1
    } else {
        idx
    }
}

fn hermite(knots: &[f64], values: &[f64], slopes: &[f64], t: f64) -> f64 {
    let n = knots.len();
    let idx = knots.partition_point(|&k| k < t).clamp(1, n - 1);
    let (t0, t1) = (knots[idx - 1], knots[idx]);
    let (y0, y1) = (values[idx - 1], values[idx]);
    let (d0, d1) = (slopes[idx - 1], slopes[idx]);
    hermite_with_slope(t0, t1, y0, y1, d0, d1, t).0
}

/// Cubic Hermite value and slope on [t0, t1].
fn hermite_with_slope(
    t0: f64,
    t1: f64,
    y0: f64,
    y1: f64,
    d0: f64,
    d1: f64,
    t: f64,
) -> (f64, f64) {
    let h = t1 - t0;
    let u = (t - t0) / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    let val = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * u2 - 6.0 * u) / h;
    let dh10 = 3.0 * u2 - 4.0 * u + 1.0;
    let dh01 = (-6.0 * u2 + 6.0 * u) / h;
    let dh11 = 3.0 * u2 - 2.0 * u;
    let slope = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (val, slope)
}

/// The transformed reaction term
/// `h(x, s) = exp(k G(Phi^{-1}(s))) f(x, Phi^{-1}(s))`, `k = alpha+beta+1`,
/// and its negative `h0` (the right-hand side of the gradient-free Dirichlet
/// form `M(x, Dv, D^2v) = h0(x, v)`).
pub struct TransformedReaction<'a> {
    table: &'a TransformTable,
    f: &'a ScalarExpr,
    exponent: f64,
}

/// Build the reaction transform for an operator (supplies `alpha + beta + 1`).
pub fn build_h<'a>(
    table: &'a TransformTable,
    f: &'a ScalarExpr,
    op: &OperatorSpec,
) -> TransformedReaction<'a> {
    TransformedReaction {
        table,
        f,
        exponent: op.reaction_exponent(),
    }
}

pub(crate) const COORD_NAMES: [&str; 8] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"];

fn f_bindings(x: &[f64], t: f64, buf: &mut Vec<(&'static str, f64)>) {
    buf.clear();
    for (i, &xi) in x.iter().enumerate() {
        buf.push((COORD_NAMES[i], xi));
    }
    buf.push(("t", t));
}

impl TransformedReaction<'_> {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn table(&self) -> &TransformTable {
        self.table
    }

    /// `h(x, s)`, exact path.
    pub fn h(&self, x: &[f64], s: f64) -> Result<f64, TransformError> {
        let t = self.table.phi_inv(s)?;
        let factor = if self.table.is_identity() {
            1.0
        } else {
            (self.exponent * self.table.g_cumulative(t)?).exp()
        };
        let mut buf = Vec::with_capacity(x.len() + 1);
        f_bindings(x, t, &mut buf);
        Ok(factor * self.f.eval(&Bindings::new(&buf))?)
    }

    /// `h0(x, s) = -h(x, s)`.
    pub fn h0(&self, x: &[f64], s: f64) -> Result<f64, TransformError> {
        Ok(-self.h(x, s)?)
    }

    /// `h(x, s)` on the Hermite fast path.
    pub fn h_fast(&self, x: &[f64], s: f64) -> Result<f64, TransformError> {
        let t = self.table.phi_inv_fast(s)?;
        let factor = if self.table.is_identity() {
            1.0
        } else {
            (self.exponent * self.table.g_cumulative_fast(t)?).exp()
        };
        let mut buf = Vec::with_capacity(x.len() + 1);
        f_bindings(x, t, &mut buf);
        Ok(factor * self.f.eval(&Bindings::new(&buf))?)
    }

    pub fn h0_fast(&self, x: &[f64], s: f64) -> Result<f64, TransformError> {
        Ok(-self.h_fast(x, s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn paper_g() -> GSpec {
        GSpec::new(ScalarExpr::parse("2*t/(1+t^2)").unwrap(), 0.0).unwrap()
    }

    fn paper_table() -> TransformTable {
        TransformTable::build(paper_g(), -2.0, 5.0, 1e-10).unwrap()
    }

    #[test]
    fn zero_g_gives_identity() {
        let tbl = TransformTable::build(GSpec::zero(), -3.0, 8.0, 1e-10).unwrap();
        assert!(tbl.is_identity());
        assert_eq!(tbl.phi(7.0).unwrap(), 7.0);
        assert_eq!(tbl.phi_inv(7.0).unwrap(), 7.0);
        assert_eq!(tbl.g_cumulative(3.0).unwrap(), 0.0);
    }

    #[test]
    fn paper_g_closed_form() {
        // g = 2t/(1+t^2): G = ln(1+t^2), Phi = t + t^3/3.
        let tbl = paper_table();
        let phi1 = tbl.phi(1.0).unwrap();
        assert!((phi1 - 4.0 / 3.0).abs() <= 1e-10, "phi(1) = {phi1}");
        for &t in &[-1.5, -0.3, 0.7, 2.0, 4.5] {
            let want = t + t * t * t / 3.0;
            let got = tbl.phi(t).unwrap();
            assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "t={t}");
            let g_want = (1.0 + t * t).ln();
            let g_got = tbl.g_cumulative(t).unwrap();
            assert!((g_got - g_want).abs() <= 1e-10 * (1.0 + g_want.abs()));
        }
    }

    #[test]
    fn constant_g_closed_form() {
        // g == c: Phi(t) = (e^{ct} - 1)/c. The sign condition only holds on
        // the positive side, so the tail check is disabled.
        let g = GSpec::with_tail_check(ScalarExpr::parse("1").unwrap(), 0.0, 0.0).unwrap();
        let tbl = TransformTable::build(g, -2.0, 2.0, 1e-10).unwrap();
        let e = 1.0f64.exp();
        let got = tbl.phi(1.0).unwrap();
        assert!((got - (e - 1.0)).abs() <= 1e-10, "phi(1) = {got}");
    }

    #[test]
    fn phi_anchor_is_exact() {
        let tbl = paper_table();
        assert_eq!(tbl.phi(0.0).unwrap(), 0.0);
    }

    #[test]
    fn phi_inv_closed_form() {
        let tbl = paper_table();
        let t = tbl.phi_inv(4.0 / 3.0).unwrap();
        assert!((t - 1.0).abs() <= 1e-10, "phi_inv(4/3) = {t}");
    }

    #[test]
    fn round_trip_random_points() {
        let tbl = paper_table();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut max_err = 0.0f64;
        for _ in 0..1000 {
            let t = rng.gen_range(-2.0..5.0);
            let s = tbl.phi(t).unwrap();
            let back = tbl.phi_inv(s).unwrap();
            max_err = max_err.max((back - t).abs() / (1.0 + t.abs()));
        }
        assert!(max_err <= 1e-9, "round-trip error {max_err}");
    }

    #[test]
    fn out_of_range_is_refused() {
        let tbl = paper_table();
        assert!(matches!(
            tbl.phi(5.5),
            Err(TransformError::OutOfRange { .. })
        ));
        let (_, hi) = tbl.s_range();
        assert!(matches!(
            tbl.phi_inv(hi + 1.0),
            Err(TransformError::OutOfRange { .. })
        ));
    }

    #[test]
    fn strict_monotonicity_on_ordered_pairs() {
        let tbl = paper_table();
        let n = 10_000;
        let mut prev = tbl.phi(-2.0).unwrap();
        for i in 1..n {
            let t = -2.0 + 7.0 * i as f64 / (n - 1) as f64;
            let v = tbl.phi_fast(t).unwrap();
            assert!(v > prev, "monotonicity violated at t = {t}");
            prev = v;
        }
    }

    #[test]
    fn convexity_split_at_knots() {
        // Concave left of -s0, convex right of s0 (s0 = 0 here): second
        // divided differences of Phi change sign at the anchor.
        let tbl = paper_table();
        let ks = tbl.knots();
        let phis = tbl.phi_at_knots();
        for i in 1..ks.len() - 1 {
            let (t0, t1, t2) = (ks[i - 1], ks[i], ks[i + 1]);
            let (y0, y1, y2) = (phis[i - 1], phis[i], phis[i + 1]);
            let dd = ((y2 - y1) / (t2 - t1) - (y1 - y0) / (t1 - t0)) / (0.5 * (t2 - t0));
            if t2 <= 0.0 {
                assert!(dd <= 1e-8, "concavity violated at t = {t1}: dd = {dd}");
            }
            if t0 >= 0.0 {
                assert!(dd >= -1e-8, "convexity violated at t = {t1}: dd = {dd}");
            }
        }
    }

    #[test]
    fn growth_bounds_from_sign_condition() {
        let tbl = paper_table();
        let s0 = tbl.g_spec().s0();
        let g_s0 = tbl.g_cumulative(s0).unwrap();
        let g_ms0 = tbl.g_cumulative(-s0).unwrap();
        let t_max = tbl.t_max();
        let t_min = tbl.t_min();
        assert!(tbl.phi(t_max).unwrap() >= g_s0.exp() * (t_max - s0) - 1e-9);
        assert!(tbl.phi(t_min).unwrap() <= -g_ms0.exp() * (-s0 - t_min) + 1e-9);
    }

    #[test]
    fn second_derivative_identity_at_knots() {
        // Phi'' = g Phi', with Phi'' taken by central differences of
        // Phi' = exp(G).
        let tbl = paper_table();
        for (i, &t) in tbl.knots().iter().enumerate() {
            if i == 0 || i + 1 == tbl.knots().len() {
                continue;
            }
            let h = 1e-5 * t.abs().max(1.0);
            if t - h < tbl.t_min() || t + h > tbl.t_max() {
                continue;
            }
            let fd = (tbl.phi_prime(t + h).unwrap() - tbl.phi_prime(t - h).unwrap()) / (2.0 * h);
            let want = tbl.g_spec().eval(t).unwrap() * tbl.phi_prime(t).unwrap();
            assert!(
                (fd - want).abs() <= 1e-8 * (1.0 + tbl.phi_prime(t).unwrap().abs()),
                "t = {t}: fd = {fd}, g*phi' = {want}"
            );
        }
    }

    #[test]
    fn inverse_derivative_identity() {
        // (Phi^{-1})'(s) * Phi'(Phi^{-1}(s)) = 1
        let tbl = paper_table();
        let (lo, hi) = tbl.s_range();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..1000 {
            let s = rng.gen_range(lo * 0.98..hi * 0.98);
            // step balancing inverse-iteration noise against h^2 truncation
            let h = 1e-4 * s.abs().max(1.0);
            if s - h < lo || s + h > hi {
                continue;
            }
            let d_inv = (tbl.phi_inv(s + h).unwrap() - tbl.phi_inv(s - h).unwrap()) / (2.0 * h);
            let t = tbl.phi_inv(s).unwrap();
            let prod = d_inv * tbl.phi_prime(t).unwrap();
            assert!((prod - 1.0).abs() <= 1e-8, "s = {s}: product = {prod}");
        }
    }

    #[test]
    fn sign_check_rejects_bad_g() {
        // g(t) = -t is nonpositive on the right tail: violates the declared
        // split at s0 = 0.
        let err = GSpec::new(ScalarExpr::parse("-t").unwrap(), 0.0);
        assert!(matches!(err, Err(TransformError::SignCheck { .. })));
    }

    #[test]
    fn fast_paths_agree_with_exact() {
        let tbl = paper_table();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..300 {
            let t = rng.gen_range(-2.0..5.0);
            let exact = tbl.phi(t).unwrap();
            let fast = tbl.phi_fast(t).unwrap();
            assert!((exact - fast).abs() <= 1e-6 * (1.0 + exact.abs()));
            let g_exact = tbl.g_cumulative(t).unwrap();
            let g_fast = tbl.g_cumulative_fast(t).unwrap();
            assert!((g_exact - g_fast).abs() <= 1e-6 * (1.0 + g_exact.abs()));
            let s = exact;
            let inv_exact = tbl.phi_inv(s).unwrap();
            let inv_fast = tbl.phi_inv_fast(s).unwrap();
            assert!((inv_exact - inv_fast).abs() <= 1e-6 * (1.0 + inv_exact.abs()));
        }
    }

    #[test]
    fn push_pull_round_trip() {
        let tbl = paper_table();
        let zeros = vec![0.0; 16];
        assert_eq!(tbl.push_solution(&zeros).unwrap(), zeros);

        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let field: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pushed = tbl.push_solution(&field).unwrap();
        let back = tbl.pull_solution(&pushed).unwrap();
        for (a, b) in field.iter().zip(back.iter()) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }

        let one = tbl.push_solution(&[1.0]).unwrap();
        assert!((one[0] - 4.0 / 3.0).abs() <= 1e-10);
    }

    #[test]
    fn push_reports_offending_index() {
        let tbl = paper_table();
        let err = tbl.push_solution(&[0.0, 99.0]).unwrap_err();
        assert!(matches!(
            err,
            TransformError::SampleOutOfRange { index: 1, .. }
        ));
    }

    #[test]
    fn reaction_term_paper_example() {
        // With the worked f and g and the cubic reaction exponent, the
        // transformed term collapses to h(x, s) = e^s.
        let tbl = paper_table();
        let f = ScalarExpr::parse("exp(t+t^3/3)/(1+t^2)^3").unwrap();
        let op = OperatorSpec::infinity(2);
        let h = build_h(&tbl, &f, &op);
        for &s in &[0.0, 0.5, 1.0, 2.0, 4.0] {
            let got = h.h(&[0.3, 0.4], s).unwrap();
            assert!(
                (got - s.exp()).abs() <= 1e-8 * (1.0 + s.exp()),
                "s = {s}: h = {got}"
            );
            assert_eq!(h.h0(&[0.3, 0.4], s).unwrap(), -got);
        }
        assert!((h.h(&[0.0, 0.0], 0.0).unwrap() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn reaction_term_identity_and_zero_cases() {
        let id = TransformTable::build(GSpec::zero(), -2.0, 2.0, 1e-10).unwrap();
        let f = ScalarExpr::parse("sin(x1)+t^2").unwrap();
        let op = OperatorSpec::infinity(2);
        let h = build_h(&id, &f, &op);
        for &s in &[-1.0, 0.0, 0.7] {
            let pairs = [("x1", 0.3), ("t", s)];
            let want = f.eval(&Bindings::new(&pairs)).unwrap();
            assert_eq!(h.h(&[0.3, 0.0], s).unwrap(), want);
        }

        let zero_f = ScalarExpr::parse("0").unwrap();
        let tbl = paper_table();
        let h = build_h(&tbl, &zero_f, &op);
        assert_eq!(h.h(&[0.1, 0.1], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn csv_export_shape() {
        let tbl = paper_table();
        let mut out = Vec::new();
        tbl.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,G,Phi,Phi_prime");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 4);
        // every knot appears, all numeric
        assert_eq!(text.lines().count(), tbl.knots().len() + 1);
        for line in text.lines().skip(1) {
            for fieldv in line.split(',') {
                fieldv.parse::<f64>().unwrap();
            }
        }
    }
}
