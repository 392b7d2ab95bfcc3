//! Hypothesis quantities for the Dirichlet problem with gradient term on
//! the infinity-Laplacian: the boundary infimum `ell`, the composed
//! infimum profile `eta`, its primitive `H`, the fourth-root-singular
//! integral `zeta`, the supremum `S`, the in-ball radius, and the verdicts
//! they feed.
//!
//! Every infimum/supremum over a non-compact set is truncated at the
//! configured `t_max` and the truncation is recorded: these quantities are
//! asymptotic and sampling can support a verdict, not certify a negative.
//! The profile keeps the raw sampled infimum with piecewise-linear
//! interpolation in between.

use crate::expr::{Bindings, EvalError, ScalarExpr};
use crate::io::fmt_g17;
use crate::quad::{adaptive_gauss, QuadError};
use crate::solver::Domain2D;
use crate::transform::{GSpec, TransformError, TransformTable};
use std::fmt::Write as _;
use std::io::{self, Write};
use thiserror::Error;

/// Reaction exponent of the infinity-Laplacian pipeline (`alpha+beta+1`).
const EXPONENT: f64 = 3.0;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("expression evaluation failed: {0}")]
    Expr(#[from] EvalError),
    #[error("transform failure: {0}")]
    Transform(#[from] TransformError),
    #[error("quadrature failed: {0}")]
    Quad(#[from] QuadError),
    #[error("f must be nonnegative: f({x:?}, {t}) = {value}")]
    NegativeF { x: Vec<f64>, t: f64, value: f64 },
    #[error("eta vanishes near t = {t}: zeta integral diverges")]
    EtaVanishes { t: f64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Standing data of the analysis pipeline.
#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub f: ScalarExpr,
    pub g_spec: GSpec,
    pub domain: Domain2D,
    pub b: ScalarExpr,
    /// Truncation bound for the asymptotic quantities (default 50).
    pub t_max: f64,
    pub quad_tol: f64,
}

/// Config plus the realized transform table and the boundary infimum.
pub struct AnalysisContext {
    pub cfg: AnalysisConfig,
    table: TransformTable,
    ell: f64,
    x_dependent: bool,
}

const BOUNDARY_SAMPLES: usize = 512;
const ETA_X_SIDE: usize = 64;
const ETA_S_SAMPLES: usize = 512;
const PROFILE_SAMPLES: usize = 2048;

impl AnalysisContext {
    pub fn new(cfg: AnalysisConfig) -> Result<Self, AnalysisError> {
        if !(cfg.t_max > 0.0) {
            return Err(AnalysisError::BadConfig(format!(
                "t_max must be positive, got {}",
                cfg.t_max
            )));
        }
        let table = TransformTable::build(
            cfg.g_spec.clone(),
            -cfg.t_max,
            cfg.t_max,
            cfg.quad_tol,
        )?;
        let x_dependent = cfg
            .f
            .free_vars()
            .iter()
            .any(|v| v != "t");
        let ell = compute_ell_inner(&cfg, &table)?;
        Ok(AnalysisContext {
            cfg,
            table,
            ell,
            x_dependent,
        })
    }

    pub fn table(&self) -> &TransformTable {
        &self.table
    }

    /// `ell = inf over the boundary of Phi(b)`.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// Upper end of the realized transformed axis, `Phi(t_max)`.
    pub fn s_frontier(&self) -> f64 {
        self.table.s_range().1
    }

    fn interior_points(&self, per_side: usize) -> Vec<(f64, f64)> {
        let (x0, y0, x1, y1) = self.cfg.domain.bounding_box();
        let mut pts = Vec::new();
        for j in 0..per_side {
            for i in 0..per_side {
                let x = x0 + (x1 - x0) * (i as f64 + 0.5) / per_side as f64;
                let y = y0 + (y1 - y0) * (j as f64 + 0.5) / per_side as f64;
                if self.cfg.domain.signed_distance(x, y) < 0.0 {
                    pts.push((x, y));
                }
            }
        }
        pts
    }

    /// Infimum over interior x of `e^{3 G(w)} f(x, w)` at `w = Phi^{-1}(s)`.
    /// Nonnegativity of `f` is enforced sample by sample; non-finite
    /// (overflowing) samples are legal and simply never attain the infimum.
    fn composed_inf_at(&self, s: f64, pts: &[(f64, f64)]) -> Result<f64, AnalysisError> {
        let w = self.table.phi_inv(s)?;
        let factor = (EXPONENT * self.table.g_cumulative(w)?).exp();
        if !self.x_dependent {
            let pairs = [("t", w)];
            let fv = self.cfg.f.eval(&Bindings::new(&pairs))?;
            if fv < -1e-12 {
                return Err(AnalysisError::NegativeF {
                    x: vec![],
                    t: w,
                    value: fv,
                });
            }
            return Ok(factor * fv);
        }
        let mut best = f64::INFINITY;
        for &(x, y) in pts {
            let pairs = [("x1", x), ("x2", y), ("t", w)];
            let fv = self.cfg.f.eval(&Bindings::new(&pairs))?;
            if fv < -1e-12 {
                return Err(AnalysisError::NegativeF {
                    x: vec![x, y],
                    t: w,
                    value: fv,
                });
            }
            let v = factor * fv;
            if v < best {
                best = v;
            }
        }
        Ok(best)
    }

    /// `eta(t)`: infimum of the composed integrand over interior points and
    /// a log-spaced tail `s in [t, Phi(t_max)]` (the left endpoint is
    /// sampled exactly).
    pub fn compute_eta(&self, t: f64) -> Result<f64, AnalysisError> {
        if t < self.ell - 1e-9 {
            return Err(AnalysisError::BadConfig(format!(
                "eta requested at t = {t} below ell = {}",
                self.ell
            )));
        }
        let frontier = self.s_frontier();
        let pts = if self.x_dependent {
            self.interior_points(ETA_X_SIDE)
        } else {
            Vec::new()
        };
        let mut best = self.composed_inf_at(t, &pts)?;
        let span = frontier - t;
        if span > 0.0 {
            let lo = (span * 1e-6).max(1e-12);
            for k in 0..ETA_S_SAMPLES {
                let frac = k as f64 / (ETA_S_SAMPLES - 1) as f64;
                let offset = lo * (span / lo).powf(frac);
                let s = (t + offset).min(frontier);
                let v = self.composed_inf_at(s, &pts)?;
                if v < best {
                    best = v;
                }
            }
        }
        Ok(best)
    }

    /// Sampled profile of `eta` on `[ell, Phi(t_max)]` with log-spaced
    /// knots accumulating at `ell`, closed under the suffix-infimum (an
    /// infimum over `[t, inf)` is non-increasing restricted to samples).
    pub fn eta_profile(&self) -> Result<EtaProfile, AnalysisError> {
        let frontier = self.s_frontier();
        let span = frontier - self.ell;
        if !(span > 0.0) {
            return Err(AnalysisError::BadConfig(
                "transform frontier does not exceed ell".into(),
            ));
        }
        let pts = if self.x_dependent {
            self.interior_points(ETA_X_SIDE)
        } else {
            Vec::new()
        };
        let mut ts = Vec::with_capacity(PROFILE_SAMPLES);
        ts.push(self.ell);
        let lo = (span * 1e-8).max(1e-12);
        for k in 0..PROFILE_SAMPLES - 1 {
            let frac = k as f64 / (PROFILE_SAMPLES - 2) as f64;
            ts.push(self.ell + lo * (span / lo).powf(frac));
        }
        ts.dedup();
        let mut q: Vec<f64> = Vec::with_capacity(ts.len());
        for &s in &ts {
            q.push(self.composed_inf_at(s.min(frontier), &pts)?);
        }
        // The composed integrand can overflow f64 long before t_max (the
        // worked example grows like e^s). Truncate the profile at the first
        // overflow; an infinite sample can never attain an infimum, so this
        // only tightens the recorded truncation frontier.
        let cut = q.iter().position(|v| !v.is_finite()).unwrap_or(q.len());
        if cut < 2 {
            return Err(AnalysisError::BadConfig(
                "composed integrand overflows immediately past ell".into(),
            ));
        }
        let ts: Vec<f64> = ts[..cut].to_vec();
        let mut values: Vec<f64> = q[..cut].to_vec();
        // suffix infimum: eta(t) = inf over s >= t
        for k in (0..values.len() - 1).rev() {
            if values[k + 1] < values[k] {
                values[k] = values[k + 1];
            }
        }
        let frontier = frontier.min(*ts.last().unwrap());
        Ok(EtaProfile {
            ell: self.ell,
            frontier,
            ts,
            values,
        })
    }

    /// `zeta(a)` through the profile.
    pub fn compute_zeta(&self, profile: &EtaProfile, a: f64) -> Result<f64, AnalysisError> {
        let h_diff = |lo: f64, hi: f64| profile.integral(lo, hi);
        let eta_a = profile.eta_at(a);
        if !(eta_a > 0.0) {
            return Err(AnalysisError::EtaVanishes { t: a });
        }
        zeta_via_substitution(&h_diff, profile.ell, a, self.cfg.quad_tol)
    }

    /// Scan `zeta` over log-spaced `a`, report the supremum and the
    /// non-existence verdict.
    pub fn nonexistence_report(&self) -> Result<NonexistenceReport, AnalysisError> {
        let profile = self.eta_profile()?;
        let eta0_ok = profile
            .ts
            .iter()
            .zip(profile.values.iter())
            .filter(|(t, _)| **t > profile.ell)
            .all(|(_, v)| *v > 0.0);
        let r = self.cfg.domain.in_ball_radius();

        let mut zeta_samples = Vec::new();
        let mut s_sup = f64::NAN;
        let mut sup_attained_interior = false;
        if eta0_ok {
            let span = profile.frontier - profile.ell;
            let lo = span * 1e-4;
            let count = 64usize;
            let mut best = f64::NEG_INFINITY;
            let mut best_idx = 0usize;
            for k in 0..count {
                let frac = k as f64 / (count - 1) as f64;
                let a = profile.ell + lo * (span / lo).powf(frac);
                let z = self.compute_zeta(&profile, a)?;
                if z > best {
                    best = z;
                    best_idx = k;
                }
                zeta_samples.push((a, z));
            }
            s_sup = best;
            sup_attained_interior = best_idx + 1 < count;
        }

        let verdict = if eta0_ok && r > s_sup / std::f64::consts::SQRT_2 {
            Verdict::NonexistenceTriggered
        } else {
            Verdict::Inconclusive
        };

        let h_values = profile.cumulative();
        Ok(NonexistenceReport {
            ell: profile.ell,
            truncation_t_max: self.cfg.t_max,
            eta_samples: profile
                .ts
                .iter()
                .copied()
                .zip(profile.values.iter().copied())
                .collect(),
            h_values,
            zeta_samples,
            s_sup,
            sup_attained_interior,
            in_ball_radius: r,
            eta0_ok,
            verdict,
        })
    }

    /// Frontier estimates of the reaction/growth ratio
    /// `r(t) = sup_x e^{3G(t)} f(x,t) / Phi(t)^3` (and the `inf_x`
    /// counterpart for `t -> -inf`). Heuristic by construction.
    pub fn fg_limit_report(&self) -> Result<FgLimitReport, AnalysisError> {
        let pts = if self.x_dependent {
            self.interior_points(32)
        } else {
            Vec::new()
        };
        let count = 64usize;
        let ratio = |t: f64, take_sup: bool| -> Result<f64, AnalysisError> {
            let big_g = self.table.g_cumulative(t)?;
            let phi = self.table.phi(t)?;
            let denom = phi * phi * phi;
            let factor = (EXPONENT * big_g).exp();
            let mut best = if take_sup {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
            if self.x_dependent {
                for &(x, y) in &pts {
                    let pairs = [("x1", x), ("x2", y), ("t", t)];
                    let fv = self.cfg.f.eval(&Bindings::new(&pairs))?;
                    let v = factor * fv;
                    if take_sup {
                        best = best.max(v);
                    } else {
                        best = best.min(v);
                    }
                }
            } else {
                let pairs = [("t", t)];
                best = factor * self.cfg.f.eval(&Bindings::new(&pairs))?;
            }
            Ok(best / denom)
        };

        let mut samples_pos = Vec::with_capacity(count);
        let mut samples_neg = Vec::with_capacity(count);
        for k in 0..count {
            let frac = k as f64 / (count - 1) as f64;
            let t = self.cfg.t_max.powf(frac); // log-spaced on [1, t_max]
            samples_pos.push((t, ratio(t, true)?));
            samples_neg.push((-t, ratio(-t, false)?));
        }
        samples_neg.reverse();

        let nu_hat = samples_pos.last().unwrap().1;
        let xi_hat = samples_neg.first().unwrap().1;
        let trend_pos = classify_trend(&samples_pos, self.cfg.t_max / 10.0, false);
        let trend_neg = classify_trend(&samples_neg, self.cfg.t_max / 10.0, true);

        let side_verdict = |frontier: f64, samples: &[(f64, f64)], neg_side: bool| {
            let last_decade: Vec<f64> = samples
                .iter()
                .filter(|(t, _)| {
                    if neg_side {
                        *t <= -self.cfg.t_max / 10.0
                    } else {
                        *t >= self.cfg.t_max / 10.0
                    }
                })
                .map(|(_, r)| *r)
                .collect();
            if !last_decade.is_empty() && last_decade.iter().all(|r| *r > 1e-6) {
                FgVerdict::Violated
            } else if frontier <= 1e-6 {
                FgVerdict::PlausiblySatisfied
            } else {
                FgVerdict::Inconclusive
            }
        };
        let vp = side_verdict(nu_hat, &samples_pos, false);
        let vn = side_verdict(xi_hat, &samples_neg, true);
        let verdict = match (vp, vn) {
            (FgVerdict::Violated, _) | (_, FgVerdict::Violated) => FgVerdict::Violated,
            (FgVerdict::PlausiblySatisfied, FgVerdict::PlausiblySatisfied) => {
                FgVerdict::PlausiblySatisfied
            }
            _ => FgVerdict::Inconclusive,
        };

        Ok(FgLimitReport {
            nu_hat,
            xi_hat,
            trend_pos,
            trend_neg,
            verdict,
            samples_pos,
            samples_neg,
        })
    }

    /// Monotonicity of `t -> f_bar(t) e^{3G(t)}`: its derivative
    /// `e^{3G} (f_bar' + 3 g f_bar)` is sampled over the working interval.
    pub fn check_uniqueness_hypothesis(
        &self,
        f_bar: &ScalarExpr,
    ) -> Result<UniquenessReport, AnalysisError> {
        let extra: Vec<String> = f_bar
            .free_vars()
            .into_iter()
            .filter(|v| v != "t")
            .collect();
        if !extra.is_empty() {
            return Err(AnalysisError::BadConfig(format!(
                "uniqueness check needs f = f(t) only; found variables {extra:?}"
            )));
        }
        let df = f_bar.differentiate("t");
        let n = 10_000usize;
        let (lo, hi) = (self.table.t_min(), self.table.t_max());
        for k in 0..n {
            let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let pairs = [("t", t)];
            let b = Bindings::new(&pairs);
            let e_term = df.eval(&b)? + EXPONENT * self.cfg.g_spec.eval(t)? * f_bar.eval(&b)?;
            let deriv = (EXPONENT * self.table.g_cumulative_fast(t)?).exp() * e_term;
            if deriv > 1e-10 {
                return Ok(UniquenessReport {
                    monotone: false,
                    witness: Some((t, deriv)),
                });
            }
        }
        Ok(UniquenessReport {
            monotone: true,
            witness: None,
        })
    }
}

fn classify_trend(samples: &[(f64, f64)], cutoff: f64, neg_side: bool) -> Trend {
    let tail: Vec<f64> = samples
        .iter()
        .filter(|(t, _)| if neg_side { *t <= -cutoff } else { *t >= cutoff })
        .map(|(_, r)| *r)
        .collect();
    if tail.len() < 2 {
        return Trend::Oscillating;
    }
    let inc = tail.windows(2).all(|w| w[1] >= w[0]);
    let dec = tail.windows(2).all(|w| w[1] <= w[0]);
    match (inc, dec) {
        (true, false) => Trend::Increasing,
        (false, true) => Trend::Decreasing,
        (true, true) => Trend::Decreasing, // constant tail
        _ => Trend::Oscillating,
    }
}

fn compute_ell_inner(
    cfg: &AnalysisConfig,
    table: &TransformTable,
) -> Result<f64, AnalysisError> {
    let value_at = |t: f64| -> Result<f64, AnalysisError> {
        let (x, y) = cfg.domain.boundary_point(t);
        let pairs = [("x1", x), ("x2", y)];
        Ok(table.phi(cfg.b.eval(&Bindings::new(&pairs))?)?)
    };
    let mut best = f64::INFINITY;
    let mut best_k = 0usize;
    for k in 0..BOUNDARY_SAMPLES {
        let v = value_at(k as f64 / BOUNDARY_SAMPLES as f64)?;
        if v < best {
            best = v;
            best_k = k;
        }
    }
    // golden-section refinement on the arc around the best sample
    let mut lo = (best_k as f64 - 1.0) / BOUNDARY_SAMPLES as f64;
    let mut hi = (best_k as f64 + 1.0) / BOUNDARY_SAMPLES as f64;
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = value_at(c)?;
    let mut fd = value_at(d)?;
    for _ in 0..60 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = value_at(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = value_at(d)?;
        }
    }
    Ok(best.min(fc).min(fd))
}

/// Sampled `eta` with piecewise-linear interpolation, cumulative integrals
/// by exact panel sums.
#[derive(Debug, Clone)]
pub struct EtaProfile {
    pub ell: f64,
    pub frontier: f64,
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
}

impl EtaProfile {
    pub fn eta_at(&self, t: f64) -> f64 {
        let n = self.ts.len();
        if t <= self.ts[0] {
            return self.values[0];
        }
        if t >= self.ts[n - 1] {
            return self.values[n - 1];
        }
        let idx = self.ts.partition_point(|&k| k < t).clamp(1, n - 1);
        let (t0, t1) = (self.ts[idx - 1], self.ts[idx]);
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    /// Exact integral of the interpolant over `[lo, hi]` (trapezoid on each
    /// panel, no cancellation for short intervals near a singular
    /// endpoint).
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut t = lo;
        let n = self.ts.len();
        let mut idx = self.ts.partition_point(|&k| k <= lo).min(n - 1);
        while t < hi {
            let next = if idx < n { self.ts[idx].min(hi) } else { hi };
            if next > t {
                acc += 0.5 * (self.eta_at(t) + self.eta_at(next)) * (next - t);
                t = next;
            }
            if idx >= n {
                break;
            }
            idx += 1;
        }
        acc
    }

    /// `H` at the profile knots: `H(t) = int_ell^t eta`.
    pub fn cumulative(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.ts.len());
        let mut acc = 0.0;
        out.push((self.ts[0], 0.0));
        for k in 1..self.ts.len() {
            acc += 0.5 * (self.values[k - 1] + self.values[k]) * (self.ts[k] - self.ts[k - 1]);
            out.push((self.ts[k], acc));
        }
        out
    }

    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "t,eta")?;
        for (t, v) in self.ts.iter().zip(self.values.iter()) {
            writeln!(w, "{},{}", fmt_g17(*t), fmt_g17(*v))?;
        }
        Ok(())
    }
}

/// `zeta(a) = int_ell^a (H(a) - H(t))^{-1/4} dt` with the endpoint
/// singularity removed by `t = a - tau^4`:
/// `zeta(a) = int_0^{(a-ell)^{1/4}} 4 tau^3 (H(a) - H(a - tau^4))^{-1/4} dtau`,
/// integrated by composite Gauss panels.
pub fn zeta_via_substitution(
    h_diff: &dyn Fn(f64, f64) -> f64,
    ell: f64,
    a: f64,
    tol: f64,
) -> Result<f64, AnalysisError> {
    if !(a > ell) {
        return Ok(0.0);
    }
    let top = (a - ell).powf(0.25);
    let integrand = |tau: f64| -> Result<f64, QuadError> {
        if tau <= 0.0 {
            return Ok(0.0);
        }
        let diff = h_diff(a - tau.powi(4), a);
        if diff <= 0.0 {
            return Err(QuadError::NonFinite { t: tau });
        }
        Ok(4.0 * tau.powi(3) * diff.powf(-0.25))
    };
    let scaled_tol = tol.max(1e-14) * top.max(1.0);
    match adaptive_gauss(&integrand, 0.0, top, scaled_tol) {
        Ok(v) => Ok(v),
        Err(QuadError::NonFinite { t }) => Err(AnalysisError::EtaVanishes { t: a - t.powi(4) }),
        Err(e) => Err(AnalysisError::Quad(e)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NonexistenceTriggered,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
    Oscillating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgVerdict {
    PlausiblySatisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct NonexistenceReport {
    pub ell: f64,
    pub truncation_t_max: f64,
    pub eta_samples: Vec<(f64, f64)>,
    pub h_values: Vec<(f64, f64)>,
    pub zeta_samples: Vec<(f64, f64)>,
    pub s_sup: f64,
    pub sup_attained_interior: bool,
    pub in_ball_radius: f64,
    pub eta0_ok: bool,
    pub verdict: Verdict,
}

impl NonexistenceReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ELL");
        let _ = writeln!(out, "ell = {}", fmt_g17(self.ell));
        let _ = writeln!(out, "truncation_t_max = {}", fmt_g17(self.truncation_t_max));
        let _ = writeln!(out, "ETA");
        let _ = writeln!(out, "samples = {}", self.eta_samples.len());
        let _ = writeln!(out, "eta0_spot_check = {}", self.eta0_ok);
        if let (Some(first), Some(last)) = (self.eta_samples.first(), self.eta_samples.last()) {
            let _ = writeln!(
                out,
                "eta({}) = {}",
                fmt_g17(first.0),
                fmt_g17(first.1)
            );
            let _ = writeln!(out, "eta({}) = {}", fmt_g17(last.0), fmt_g17(last.1));
        }
        let _ = writeln!(out, "H");
        if let Some((t, h)) = self.h_values.last() {
            let _ = writeln!(out, "H({}) = {}", fmt_g17(*t), fmt_g17(*h));
        }
        let _ = writeln!(out, "ZETA");
        let _ = writeln!(out, "samples = {}", self.zeta_samples.len());
        let _ = writeln!(out, "S");
        let _ = writeln!(out, "S = {}", fmt_g17(self.s_sup));
        let _ = writeln!(
            out,
            "sup_attained_interior = {}",
            self.sup_attained_interior
        );
        let _ = writeln!(out, "R");
        let _ = writeln!(out, "R = {}", fmt_g17(self.in_ball_radius));
        let _ = writeln!(
            out,
            "R_vs_S_over_sqrt2 = {}",
            fmt_g17(self.in_ball_radius - self.s_sup / std::f64::consts::SQRT_2)
        );
        let _ = writeln!(out, "VERDICT");
        let _ = writeln!(
            out,
            "{}",
            match self.verdict {
                Verdict::NonexistenceTriggered => "nonexistence_triggered",
                Verdict::Inconclusive => "inconclusive",
            }
        );
        out
    }

    pub fn write_zeta_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "a,zeta")?;
        for (a, z) in &self.zeta_samples {
            writeln!(w, "{},{}", fmt_g17(*a), fmt_g17(*z))?;
        }
        Ok(())
    }

    pub fn write_eta_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "t,eta")?;
        for (t, v) in &self.eta_samples {
            writeln!(w, "{},{}", fmt_g17(*t), fmt_g17(*v))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FgLimitReport {
    pub nu_hat: f64,
    pub xi_hat: f64,
    pub trend_pos: Trend,
    pub trend_neg: Trend,
    pub verdict: FgVerdict,
    pub samples_pos: Vec<(f64, f64)>,
    pub samples_neg: Vec<(f64, f64)>,
}

impl FgLimitReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nu_hat = {}", fmt_g17(self.nu_hat));
        let _ = writeln!(out, "xi_hat = {}", fmt_g17(self.xi_hat));
        let _ = writeln!(out, "trend_pos = {:?}", self.trend_pos);
        let _ = writeln!(out, "trend_neg = {:?}", self.trend_neg);
        let _ = writeln!(
            out,
            "verdict = {}",
            match self.verdict {
                FgVerdict::PlausiblySatisfied => "plausibly_satisfied",
                FgVerdict::Violated => "violated",
                FgVerdict::Inconclusive => "inconclusive",
            }
        );
        out
    }
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub monotone: bool,
    pub witness: Option<(f64, f64)>,
}

impl UniquenessReport {
    pub fn to_text(&self) -> String {
        match self.witness {
            Some((t, d)) => format!(
                "monotone = false\nwitness_t = {}\nwitness_derivative = {}\n",
                fmt_g17(t),
                fmt_g17(d)
            ),
            None => "monotone = true\n".to_string(),
        }
    }
}
