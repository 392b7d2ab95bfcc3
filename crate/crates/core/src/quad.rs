//! Adaptive quadrature: recursive Simpson with Richardson correction,
//! cumulative integral tables, and composite Gauss-Legendre panels.
//!
//! Integrands return `Result` so that expression evaluation failures and
//! non-finite values surface as quadrature errors instead of NaN sums.

use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("integrand failed at t = {t}: {message}")]
    Eval { t: f64, message: String },
    #[error("adaptive refinement exhausted on [{a}, {b}]")]
    MaxDepth { a: f64, b: f64 },
}

pub type Integrand<'a> = dyn Fn(f64) -> Result<f64, QuadError> + 'a;

const MAX_DEPTH: usize = 48;

fn probe(f: &Integrand, t: f64) -> Result<f64, QuadError> {
    let v = f(t)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite { t })
    }
}

struct Leaf {
    right: f64,
    integral: f64,
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &Integrand,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    leaves: &mut Option<&mut Vec<Leaf>>,
) -> Result<f64, QuadError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = probe(f, lm)?;
    let frm = probe(f, rm)?;
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let s2 = left + right;
    if depth == 0 || (s2 - whole).abs() <= 15.0 * tol {
        if depth == 0 && (s2 - whole).abs() > 15.0 * tol.max(f64::EPSILON) {
            return Err(QuadError::MaxDepth { a, b });
        }
        let refined = s2 + (s2 - whole) / 15.0;
        if let Some(out) = leaves {
            out.push(Leaf {
                right: b,
                integral: refined,
            });
        }
        return Ok(refined);
    }
    let l = simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1, leaves)?;
    let r = simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1, leaves)?;
    Ok(l + r)
}

fn simpson_interval(
    f: &Integrand,
    a: f64,
    b: f64,
    tol: f64,
    leaves: &mut Option<&mut Vec<Leaf>>,
) -> Result<f64, QuadError> {
    let fa = probe(f, a)?;
    let fb = probe(f, b)?;
    let m = 0.5 * (a + b);
    let fm = probe(f, m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, fa, b, fb, fm, whole, tol, MAX_DEPTH, leaves)
}

/// Adaptive Simpson integral of `f` over the oriented interval `[a, b]`.
pub fn adaptive_simpson(f: &Integrand, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-adaptive_simpson(f, b, a, tol)?);
    }
    simpson_interval(f, a, b, tol, &mut None)
}

/// Cumulative integral `t -> int_anchor^t f` realized on an adaptive knot
/// mesh. The anchor is always a knot with value exactly zero.
#[derive(Debug, Clone)]
pub struct CumulativeTable {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

impl CumulativeTable {
    /// Index of the knot nearest to `t` (knots are sorted ascending).
    pub fn nearest_knot(&self, t: f64) -> usize {
        let n = self.knots.len();
        let idx = self.knots.partition_point(|&k| k < t);
        if idx == 0 {
            0
        } else if idx >= n {
            n - 1
        } else if (t - self.knots[idx - 1]).abs() <= (self.knots[idx] - t).abs() {
            idx - 1
        } else {
            idx
        }
    }
}

/// Build a cumulative table of `f` on `[a, b]` anchored at `anchor in [a, b]`.
/// Each of the `min_panels` seed panels is refined adaptively with a
/// proportional share of `tol`.
pub fn cumulative_adaptive_simpson(
    f: &Integrand,
    a: f64,
    b: f64,
    anchor: f64,
    tol: f64,
    min_panels: usize,
) -> Result<CumulativeTable, QuadError> {
    assert!(a <= anchor && anchor <= b, "anchor must lie inside [a, b]");
    let span = b - a;
    let panels = |lo: f64, hi: f64| -> usize {
        let frac = (hi - lo) / span;
        ((min_panels as f64 * frac).ceil() as usize).max(1)
    };

    // Right side: anchor -> b, accumulating forward.
    let mut knots = vec![anchor];
    let mut values = vec![0.0];
    if b > anchor {
        let n = panels(anchor, b);
        let w = (b - anchor) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let lo = anchor + i as f64 * w;
            let hi = if i + 1 == n { b } else { anchor + (i + 1) as f64 * w };
            let mut leaves = Vec::new();
            simpson_interval(f, lo, hi, tol * (hi - lo) / span, &mut Some(&mut leaves))?;
            for leaf in &leaves {
                acc += leaf.integral;
                knots.push(leaf.right);
                values.push(acc);
            }
        }
    }

    // Left side: anchor -> a, walking leaves backward so values accumulate
    // negatively away from the anchor.
    if a < anchor {
        let n = panels(a, anchor);
        let w = (anchor - a) / n as f64;
        let mut acc = 0.0;
        let mut left_knots = Vec::new();
        let mut left_values = Vec::new();
        for i in 0..n {
            let hi = anchor - i as f64 * w;
            let lo = if i + 1 == n { a } else { anchor - (i + 1) as f64 * w };
            let mut leaves = Vec::new();
            simpson_interval(f, lo, hi, tol * (hi - lo) / span, &mut Some(&mut leaves))?;
            let mut right_value = acc;
            for (j, leaf) in leaves.iter().enumerate().rev() {
                right_value -= leaf.integral;
                let left_end = if j == 0 { lo } else { leaves[j - 1].right };
                left_knots.push(left_end);
                left_values.push(right_value);
            }
            acc = right_value;
        }
        left_knots.reverse();
        left_values.reverse();
        left_knots.extend_from_slice(&knots);
        left_values.extend_from_slice(&values);
        knots = left_knots;
        values = left_values;
    }

    Ok(CumulativeTable { knots, values })
}

/// Evaluate the cumulative integral at an arbitrary `t` inside the table
/// range: value at the nearest knot plus one local adaptive correction.
pub fn eval_cumulative(
    table: &CumulativeTable,
    f: &Integrand,
    t: f64,
    tol: f64,
) -> Result<f64, QuadError> {
    let k = table.nearest_knot(t);
    let base = table.values[k];
    let from = table.knots[k];
    if t == from {
        return Ok(base);
    }
    Ok(base + adaptive_simpson(f, from, t, tol)?)
}

// ---------------------------------------------------------------------------
// Gauss-Legendre
// ---------------------------------------------------------------------------

const GL_ORDER: usize = 16;

fn gl_nodes() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| {
        // Newton iteration on P_n with the Chebyshev initial guess.
        let n = GL_ORDER;
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        for k in 0..n {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            xs[k] = x;
            ws[k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

/// Legendre polynomial P_n and derivative at x by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl_panel(f: &Integrand, a: f64, b: f64) -> Result<f64, QuadError> {
    let (xs, ws) = gl_nodes();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in xs.iter().zip(ws.iter()) {
        acc += w * probe(f, mid + half * x)?;
    }
    Ok(half * acc)
}

fn gauss_rec(
    f: &Integrand,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, QuadError> {
    let m = 0.5 * (a + b);
    let left = gl_panel(f, a, m)?;
    let right = gl_panel(f, m, b)?;
    let s = left + right;
    if (s - whole).abs() <= tol || depth == 0 {
        if depth == 0 && (s - whole).abs() > tol.max(f64::EPSILON) {
            return Err(QuadError::MaxDepth { a, b });
        }
        return Ok(s);
    }
    let l = gauss_rec(f, a, m, left, 0.5 * tol, depth - 1)?;
    let r = gauss_rec(f, m, b, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Composite Gauss-Legendre with adaptive panel bisection.
pub fn adaptive_gauss(f: &Integrand, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-adaptive_gauss(f, b, a, tol)?);
    }
    let whole = gl_panel(f, a, b)?;
    gauss_rec(f, a, b, whole, tol, 32)
}
