//! Residual-level verification of the transformation identities on
//! manufactured solutions.
//!
//! A manufactured solution is a closed-form `u` whose forcing is defined as
//! minus the operator applied to `u`, so `u` solves the equation by
//! construction; the checks then measure how far the transformed field
//! `v = Phi(u)` is from solving the gradient-free equation (and
//! conversely). Jets are symbolic, so the tolerances probe the algebraic
//! identities rather than discretization error.
//!
//! [`viscosity_touch_check`] is a grid-scale heuristic: quadratic touching
//! functions fitted on a 3x3 stencil stand in for the full class of smooth
//! test functions, which no finite computation can quantify over. It
//! verifies the test-function transfer mechanism, not the viscosity
//! property itself.

use crate::expr::{Bindings, EvalError, ScalarExpr};
use crate::linalg::{tensor, SymMatrix, Vector};
use crate::operators::{self, OperatorError, OperatorSpec};
use crate::transform::{GSpec, TransformError, TransformTable, COORD_NAMES};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("expression evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("operator failure: {0}")]
    Operator(#[from] OperatorError),
    #[error("transform failure: {0}")]
    Transform(#[from] TransformError),
    #[error("phi is not increasing at u = {u} (phi' = {phi_prime})")]
    PhiNotIncreasing { u: f64, phi_prime: f64 },
    #[error("stencil underdetermined at node ({i}, {j})")]
    StencilUnderdetermined { i: usize, j: usize },
}

/// A closed-form solution with symbolic gradient and Hessian.
///
/// The Hessian is symmetric by construction: the mixed partial `d2u[i][j]`
/// for `i <= j` is differentiated in the fixed order (first `x_{i+1}`, then
/// `x_{j+1}`) and mirrored.
#[derive(Debug, Clone)]
pub struct ManufacturedSolution {
    n: usize,
    u: ScalarExpr,
    du: Vec<ScalarExpr>,
    d2u: Vec<Vec<ScalarExpr>>,
}

impl ManufacturedSolution {
    pub fn new(u: ScalarExpr, n: usize) -> Self {
        let du: Vec<ScalarExpr> = (0..n).map(|i| u.differentiate(COORD_NAMES[i])).collect();
        let mut d2u = vec![vec![ScalarExpr::Const(0.0); n]; n];
        for i in 0..n {
            for j in i..n {
                let dij = du[i].differentiate(COORD_NAMES[j]);
                d2u[i][j] = dij.clone();
                d2u[j][i] = dij;
            }
        }
        ManufacturedSolution { n, u, du, d2u }
    }

    pub fn parse(source: &str, n: usize) -> Result<Self, crate::expr::ParseError> {
        Ok(Self::new(ScalarExpr::parse(source)?, n))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn expr(&self) -> &ScalarExpr {
        &self.u
    }

    fn bindings<'a>(&self, x: &'a [f64], buf: &mut Vec<(&'static str, f64)>) {
        debug_assert_eq!(x.len(), self.n);
        buf.clear();
        for (i, &xi) in x.iter().enumerate() {
            buf.push((COORD_NAMES[i], xi));
        }
    }

    pub fn value_at(&self, x: &[f64]) -> Result<f64, EvalError> {
        let mut buf = Vec::with_capacity(self.n);
        self.bindings(x, &mut buf);
        self.u.eval(&Bindings::new(&buf))
    }

    /// Symbolic jet `(x, Du(x), D^2u(x))`.
    pub fn jet_at(&self, x: &[f64]) -> Result<operators::Jet, EvalError> {
        let mut buf = Vec::with_capacity(self.n);
        self.bindings(x, &mut buf);
        let b = Bindings::new(&buf);
        let mut p = Vector::zeros(self.n);
        for i in 0..self.n {
            p.set(i, self.du[i].eval(&b)?);
        }
        let mut hess = SymMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                hess.set(i, j, self.d2u[i][j].eval(&b)?);
            }
        }
        Ok(operators::Jet::new(Vector::from(x), p, hess))
    }
}

fn normalized(residual: f64, jet: &operators::Jet, lhs: f64, rhs: f64) -> f64 {
    residual.abs() / (1.0 + jet.magnitude() + lhs.abs() + rhs.abs())
}

/// Max normalized residual of the chain-rule identity
/// `M(x, D phi(u), D^2 phi(u)) = (phi')^{a+b+1} M + (phi')^{a+b} phi'' N`
/// over the sample points, with symbolic jets on both sides.
pub fn chain_rule_check(
    op: &OperatorSpec,
    phi: &ScalarExpr,
    u: &ManufacturedSolution,
    points: &[Vec<f64>],
) -> Result<f64, VerifyError> {
    let dphi = phi.differentiate("t");
    let ddphi = dphi.differentiate("t");
    let k = op.alpha() + op.beta() as f64;
    let mut worst = 0.0f64;
    for x in points {
        let jet = u.jet_at(x)?;
        let uval = u.value_at(x)?;
        let pairs = [("t", uval)];
        let b = Bindings::new(&pairs);
        let phi1 = dphi.eval(&b)?;
        let phi2 = ddphi.eval(&b)?;
        if !(phi1 > 0.0) {
            return Err(VerifyError::PhiNotIncreasing {
                u: uval,
                phi_prime: phi1,
            });
        }
        let p_t = jet.p.scale(phi1);
        let x_t = jet
            .hessian
            .scale(phi1)
            .add(&tensor(&jet.p, &jet.p).map_err(OperatorError::from)?.scale(phi2));
        let jet_t = operators::Jet::new(jet.x.clone(), p_t, x_t);
        let lhs = operators::eval_m(op, &jet_t)?;
        let m_val = operators::eval_m(op, &jet)?;
        let n_val = operators::eval_n(op, &jet)?;
        let rhs = phi1.powf(k + 1.0) * m_val + phi1.powf(k) * phi2 * n_val;
        worst = worst.max(normalized(lhs - rhs, &jet_t, lhs, rhs));
    }
    Ok(worst)
}

/// One sample row of an invariance report.
#[derive(Debug, Clone)]
pub struct SampleResidual {
    pub x: Vec<f64>,
    pub forward: f64,
    pub backward: f64,
    pub pass: bool,
}

/// Residuals of the solution transfer between the gradient-term equation
/// (`backward`: `M + g(u) N + f = 0`) and the transformed one
/// (`forward`: `M + h = 0`), normalized per sample by `1 + jet magnitude`.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub operator: String,
    pub g: String,
    pub samples: Vec<SampleResidual>,
    pub residual_forward: f64,
    pub residual_backward: f64,
    pub tol: f64,
    pub pass: bool,
}

impl InvarianceReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "operator {}  g {}", self.operator, self.g);
        for s in &self.samples {
            let coords: Vec<String> = s.x.iter().map(|c| format!("{c:.6}")).collect();
            let _ = writeln!(
                out,
                "x=({}) forward={:.3e} backward={:.3e} pass={}",
                coords.join(", "),
                s.forward,
                s.backward,
                s.pass
            );
        }
        let _ = writeln!(
            out,
            "summary max_forward={:.3e} max_backward={:.3e} tol={:.1e} pass={}",
            self.residual_forward, self.residual_backward, self.tol, self.pass
        );
        out
    }
}

/// Default verification tolerance; m-Laplace variants use a looser one for
/// the fractional `|p|` powers.
pub fn default_tol(op: &OperatorSpec) -> f64 {
    match op.kind() {
        crate::operators::OperatorKind::MLaplace { .. } => 1e-7,
        _ => 1e-8,
    }
}

fn table_for(
    g_spec: &GSpec,
    sol: &ManufacturedSolution,
    points: &[Vec<f64>],
) -> Result<TransformTable, VerifyError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in points {
        let v = sol.value_at(x)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let t_min = (lo - 1.0).min(-1.0);
    let t_max = (hi + 1.0).max(1.0);
    Ok(TransformTable::build(g_spec.clone(), t_min, t_max, 1e-10)?)
}

/// Manufacture the x-only forcing `f(x) = -(M + g(u) N)` so `u` solves the
/// gradient-term equation by construction, push `v = Phi(u)` with symbolic
/// jets, and measure the residual of the transformed equation with
/// `h(x, s) = e^{(a+b+1) G(Phi^{-1}(s))} f(x)`.
pub fn theorem1_forward(
    op: &OperatorSpec,
    g_spec: &GSpec,
    u: &ManufacturedSolution,
    points: &[Vec<f64>],
) -> Result<InvarianceReport, VerifyError> {
    let table = table_for(g_spec, u, points)?;
    let k = op.reaction_exponent();
    let tol = default_tol(op);
    let mut samples = Vec::with_capacity(points.len());
    let mut max_f = 0.0f64;
    let mut max_b = 0.0f64;
    for x in points {
        let jet = u.jet_at(x)?;
        let uval = u.value_at(x)?;
        let m_u = operators::eval_m(op, &jet)?;
        let n_u = operators::eval_n(op, &jet)?;
        let g_u = g_spec.eval(uval)?;
        let f_val = -(m_u + g_u * n_u);

        // backward residual: zero by construction of f
        let backward = normalized(m_u + g_u * n_u + f_val, &jet, m_u, f_val);

        // transformed jet
        let v = table.phi(uval)?;
        let big_g = table.g_cumulative(uval)?;
        let phi1 = big_g.exp();
        let phi2 = g_u * phi1;
        let p_v = jet.p.scale(phi1);
        let x_v = jet
            .hessian
            .scale(phi1)
            .add(&tensor(&jet.p, &jet.p).map_err(OperatorError::from)?.scale(phi2));
        let jet_v = operators::Jet::new(jet.x.clone(), p_v, x_v);
        let m_v = operators::eval_m(op, &jet_v)?;
        // h through the full reaction formula, exercising the inverse
        let h_val = (k * table.g_cumulative(table.phi_inv(v)?)?).exp() * f_val;
        let forward = normalized(m_v + h_val, &jet_v, m_v, h_val);

        max_f = max_f.max(forward);
        max_b = max_b.max(backward);
        samples.push(SampleResidual {
            x: x.clone(),
            forward,
            backward,
            pass: forward <= tol && backward <= tol,
        });
    }
    Ok(InvarianceReport {
        operator: op.name(),
        g: g_spec.expr().to_string(),
        samples,
        residual_forward: max_f,
        residual_backward: max_b,
        tol,
        pass: max_f <= tol && max_b <= tol,
    })
}

/// The reciprocal direction: manufacture `h(x) = -M(x, Dv, D^2v)` so `v`
/// solves the transformed equation, pull `u = Phi^{-1}(v)` with symbolic
/// jets, and measure the residual of the gradient-term equation with
/// `f(x, s) = e^{-(a+b+1) G(s)} h(x)`.
pub fn theorem1_backward(
    op: &OperatorSpec,
    g_spec: &GSpec,
    v: &ManufacturedSolution,
    points: &[Vec<f64>],
) -> Result<InvarianceReport, VerifyError> {
    // The table range must cover u = Phi^{-1}(v); since |Phi(t)| >= |t| only
    // when g keeps exp(G) >= 1, size it from the inverse of the v-range.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in points {
        let val = v.value_at(x)?;
        lo = lo.min(val);
        hi = hi.max(val);
    }
    // Grow the t-interval until Phi covers the v-range.
    let mut t_min = lo.min(-1.0);
    let mut t_max = hi.max(1.0);
    let table = loop {
        let table = TransformTable::build(g_spec.clone(), t_min, t_max, 1e-10)?;
        let (s_lo, s_hi) = table.s_range();
        if s_lo <= lo && hi <= s_hi {
            break table;
        }
        t_min -= 1.0;
        t_max += 1.0;
    };

    let k = op.reaction_exponent();
    let tol = default_tol(op);
    let mut samples = Vec::with_capacity(points.len());
    let mut max_f = 0.0f64;
    let mut max_b = 0.0f64;
    for x in points {
        let jet_v = v.jet_at(x)?;
        let vval = v.value_at(x)?;
        let m_v = operators::eval_m(op, &jet_v)?;
        let h_val = -m_v;

        let forward = normalized(m_v + h_val, &jet_v, m_v, h_val);

        // pulled-back jet via the inverse chain rule
        let uval = table.phi_inv(vval)?;
        let big_g = table.g_cumulative(uval)?;
        let g_u = g_spec.eval(uval)?;
        let psi1 = (-big_g).exp();
        let psi2 = -g_u * big_g.exp() / big_g.exp().powi(3);
        let p_u = jet_v.p.scale(psi1);
        let x_u = jet_v.hessian.scale(psi1).add(
            &tensor(&jet_v.p, &jet_v.p)
                .map_err(OperatorError::from)?
                .scale(psi2),
        );
        let jet_u = operators::Jet::new(jet_v.x.clone(), p_u, x_u);
        let m_u = operators::eval_m(op, &jet_u)?;
        let n_u = operators::eval_n(op, &jet_u)?;
        let f_val = (-k * big_g).exp() * h_val;
        let backward = normalized(m_u + g_u * n_u + f_val, &jet_u, m_u, f_val);

        max_f = max_f.max(forward);
        max_b = max_b.max(backward);
        samples.push(SampleResidual {
            x: x.clone(),
            forward,
            backward,
            pass: forward <= tol && backward <= tol,
        });
    }
    Ok(InvarianceReport {
        operator: op.name(),
        g: g_spec.expr().to_string(),
        samples,
        residual_forward: max_f,
        residual_backward: max_b,
        tol,
        pass: max_f <= tol && max_b <= tol,
    })
}

/// Pointwise check of the gradient transfer `Dv = e^{G(u)} Du` with `Du`
/// measured by Richardson-extrapolated central differences of the pulled
/// back field `x -> Phi^{-1}(v(x))`. Returns the max normalized deviation.
pub fn gradient_transfer_check(
    table: &TransformTable,
    v: &ManufacturedSolution,
    points: &[Vec<f64>],
) -> Result<f64, VerifyError> {
    let n = v.dim();
    let mut worst = 0.0f64;
    for x in points {
        let jet_v = v.jet_at(x)?;
        let uval = table.phi_inv(v.value_at(x)?)?;
        let factor = table.g_cumulative(uval)?.exp();
        for i in 0..n {
            let h = 1e-3 * x[i].abs().max(1.0);
            let pull = |xi: f64| -> Result<f64, VerifyError> {
                let mut y = x.clone();
                y[i] = xi;
                Ok(table.phi_inv(v.value_at(&y)?)?)
            };
            let d_h = (pull(x[i] + h)? - pull(x[i] - h)?) / (2.0 * h);
            let d_h2 = (pull(x[i] + 0.5 * h)? - pull(x[i] - 0.5 * h)?) / h;
            let du_fd = (4.0 * d_h2 - d_h) / 3.0;
            let dev = (jet_v.p.get(i) - factor * du_fd).abs() / (1.0 + jet_v.p.get(i).abs());
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Grid-scale touching checks
// ---------------------------------------------------------------------------

/// A sampled field on a uniform 2D lattice, for touching tests.
#[derive(Debug, Clone)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: (f64, f64),
    pub values: Vec<f64>,
}

impl GridField {
    pub fn sample(
        nx: usize,
        ny: usize,
        h: f64,
        origin: (f64, f64),
        f: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let x = origin.0 + i as f64 * h;
                let y = origin.1 + j as f64 * h;
                values.push(f(x, y));
            }
        }
        GridField {
            nx,
            ny,
            h,
            origin,
            values,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + i as f64 * self.h,
            self.origin.1 + j as f64 * self.h,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TouchSide {
    /// quadratic touches the field from above (subsolution inequality `<= tol`)
    Above,
    /// from below (supersolution inequality `>= -tol`)
    Below,
}

#[derive(Debug, Clone)]
pub struct TouchReport {
    pub side: TouchSide,
    /// `M(x0, Dphi, D^2phi) + h(x0, v(x0))`
    pub primal_value: f64,
    pub primal_ok: bool,
    /// residual of the transferred inequality for the gradient-term equation
    pub transformed_value: f64,
    pub transformed_ok: bool,
    /// vertical shift that makes the quadratic touch the field on the stencil
    pub shift: f64,
}

/// Fit the quadratic matching the discrete jet at an interior node, shift it
/// to touch the field from the requested side over the 3x3 stencil, test the
/// sub/supersolution inequality for `M(x, Dw, D^2w) + h(x, w) = 0`, then
/// transfer the test function through the change of variables and re-test
/// the inequality for the gradient-term equation.
#[allow(clippy::too_many_arguments)]
pub fn viscosity_touch_check(
    op: &OperatorSpec,
    table: &TransformTable,
    field: &GridField,
    h_reaction: &dyn Fn(&[f64], f64) -> Result<f64, TransformError>,
    node: (usize, usize),
    side: TouchSide,
    tol_visc: f64,
) -> Result<TouchReport, VerifyError> {
    let (i, j) = node;
    if i == 0 || j == 0 || i + 1 >= field.nx || j + 1 >= field.ny {
        return Err(VerifyError::StencilUnderdetermined { i, j });
    }
    let h = field.h;
    let v0 = field.at(i, j);
    let vx = (field.at(i + 1, j) - field.at(i - 1, j)) / (2.0 * h);
    let vy = (field.at(i, j + 1) - field.at(i, j - 1)) / (2.0 * h);
    let vxx = (field.at(i + 1, j) - 2.0 * v0 + field.at(i - 1, j)) / (h * h);
    let vyy = (field.at(i, j + 1) - 2.0 * v0 + field.at(i, j - 1)) / (h * h);
    let vxy = (field.at(i + 1, j + 1) + field.at(i - 1, j - 1)
        - field.at(i + 1, j - 1)
        - field.at(i - 1, j + 1))
        / (4.0 * h * h);

    let (x0, y0) = field.point(i, j);
    let grad = Vector::from([vx, vy]);
    let hess = SymMatrix::from_rows(&[&[vxx, vxy], &[vxy, vyy]]);

    // Shift so the quadratic touches the sampled field on the stencil; jets
    // are shift-invariant, so only the report records it.
    let mut shift: f64 = 0.0;
    for dj in -1i64..=1 {
        for di in -1i64..=1 {
            let ii = (i as i64 + di) as usize;
            let jj = (j as i64 + dj) as usize;
            let (xs, ys) = field.point(ii, jj);
            let dx = xs - x0;
            let dy = ys - y0;
            let quad = v0 + vx * dx + vy * dy
                + 0.5 * (vxx * dx * dx + 2.0 * vxy * dx * dy + vyy * dy * dy);
            let gap = field.at(ii, jj) - quad;
            match side {
                TouchSide::Above => shift = shift.max(gap),
                TouchSide::Below => shift = shift.min(gap),
            }
        }
    }

    let jet = operators::Jet::new(Vector::from([x0, y0]), grad.clone(), hess.clone());
    let m_phi = operators::eval_m(op, &jet)?;
    let h_val = h_reaction(&[x0, y0], v0)?;
    let primal_value = m_phi + h_val;
    let primal_ok = match side {
        TouchSide::Above => primal_value <= tol_visc,
        TouchSide::Below => primal_value >= -tol_visc,
    };

    // Transfer: chi = Phi^{-1}(phi-bar), evaluated through the inverse chain
    // rule at the touching point.
    let u0 = table.phi_inv(v0)?;
    let big_g = table.g_cumulative(u0)?;
    let g_u = table.g_spec().eval(u0)?;
    let psi1 = (-big_g).exp();
    let psi2 = -g_u * psi1 * psi1;
    let p_u = grad.scale(psi1);
    let x_u = hess
        .scale(psi1)
        .add(&tensor(&grad, &grad).map_err(OperatorError::from)?.scale(psi2));
    let jet_u = operators::Jet::new(Vector::from([x0, y0]), p_u, x_u);
    let m_u = operators::eval_m(op, &jet_u)?;
    let n_u = operators::eval_n(op, &jet_u)?;
    let f_val = (-op.reaction_exponent() * big_g).exp() * h_val;
    let transformed_value = m_u + g_u * n_u + f_val;
    // The transfer scales the defect by e^{-(a+b+1)G(u0)}; scale the
    // tolerance the same way.
    let scale = (-op.reaction_exponent() * big_g).exp();
    let transformed_ok = match side {
        TouchSide::Above => transformed_value <= tol_visc * scale.max(1.0),
        TouchSide::Below => transformed_value >= -tol_visc * scale.max(1.0),
    };

    Ok(TouchReport {
        side,
        primal_value,
        primal_ok,
        transformed_value,
        transformed_ok,
        shift,
    })
}

/// Deterministic interior sample points in the box `[lo, hi]^2`.
pub fn sample_points_2d(lo: f64, hi: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| vec![rng.gen_range(lo..hi), rng.gen_range(lo..hi)])
        .collect()
}
