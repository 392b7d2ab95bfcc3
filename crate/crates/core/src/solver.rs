//! 2D Dirichlet solver for the infinity-Laplace equation with gradient
//! term on rectangles and discs.
//!
//! The gradient-term problem is transformed to `Delta_inf v = h0(x, v)`,
//! `v = Phi(b)` on the boundary, iterated to steady state by parabolic
//! relaxation `v <- v + tau (Delta_inf_h v - h0)`, and pulled back through
//! the inverse change of variables. Two discretizations are available: a
//! centered composition of finite differences (`fd-direct`) and a 16-point
//! wide-stencil scheme whose normalized increment is non-decreasing in
//! every neighbor value (`monotone`).
//!
//! The scheme is validated against exact solutions (tests); it is not a
//! proof of convergence to the viscosity solution.

use crate::expr::{Bindings, EvalError, ScalarExpr};
use crate::io::fmt_g17;
use crate::transform::{build_h, GSpec, TransformError, TransformTable};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("expression evaluation failed: {0}")]
    Expr(#[from] EvalError),
    #[error("transform failure: {0}")]
    Transform(#[from] TransformError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("field became non-finite at iteration {iter}")]
    NonFinite { iter: usize },
}

/// Rectangle or disc with analytic signed distance (negative inside).
#[derive(Debug, Clone, PartialEq)]
pub enum Domain2D {
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disc { center: (f64, f64), radius: f64 },
}

impl Domain2D {
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, SolverError> {
        if !(x1 > x0 && y1 > y0) {
            return Err(SolverError::Config(format!(
                "rectangle [{x0},{x1}]x[{y0},{y1}] has nonpositive area"
            )));
        }
        Ok(Domain2D::Rectangle { x0, y0, x1, y1 })
    }

    pub fn disc(center: (f64, f64), radius: f64) -> Result<Self, SolverError> {
        if !(radius > 0.0) {
            return Err(SolverError::Config(format!("disc radius {radius} <= 0")));
        }
        Ok(Domain2D::Disc { center, radius })
    }

    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        match self {
            Domain2D::Rectangle { x0, y0, x1, y1 } => {
                let qx = (x0 - x).max(x - x1);
                let qy = (y0 - y).max(y - y1);
                if qx <= 0.0 && qy <= 0.0 {
                    qx.max(qy)
                } else {
                    (qx.max(0.0).powi(2) + qy.max(0.0).powi(2)).sqrt()
                }
            }
            Domain2D::Disc { center, radius } => {
                ((x - center.0).powi(2) + (y - center.1).powi(2)).sqrt() - radius
            }
        }
    }

    /// Radius of the largest inscribed ball.
    pub fn in_ball_radius(&self) -> f64 {
        match self {
            Domain2D::Rectangle { x0, y0, x1, y1 } => 0.5 * (x1 - x0).min(y1 - y0),
            Domain2D::Disc { radius, .. } => *radius,
        }
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self {
            Domain2D::Rectangle { x0, y0, x1, y1 } => (*x0, *y0, *x1, *y1),
            Domain2D::Disc { center, radius } => (
                center.0 - radius,
                center.1 - radius,
                center.0 + radius,
                center.1 + radius,
            ),
        }
    }

    /// Point on the boundary at parameter `t in [0, 1)` (arc-length-like
    /// parametrization; used by boundary infimum scans).
    pub fn boundary_point(&self, t: f64) -> (f64, f64) {
        let t = t.rem_euclid(1.0);
        match self {
            Domain2D::Rectangle { x0, y0, x1, y1 } => {
                let w = x1 - x0;
                let h = y1 - y0;
                let per = 2.0 * (w + h);
                let s = t * per;
                if s < w {
                    (x0 + s, *y0)
                } else if s < w + h {
                    (*x1, y0 + (s - w))
                } else if s < 2.0 * w + h {
                    (x1 - (s - w - h), *y1)
                } else {
                    (*x0, y1 - (s - 2.0 * w - h))
                }
            }
            Domain2D::Disc { center, radius } => {
                let ang = 2.0 * std::f64::consts::PI * t;
                (center.0 + radius * ang.cos(), center.1 + radius * ang.sin())
            }
        }
    }

    /// Closest boundary point (used for first-order ghost values).
    pub fn project_to_boundary(&self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Domain2D::Rectangle { x0, y0, x1, y1 } => {
                let cx = x.clamp(*x0, *x1);
                let cy = y.clamp(*y0, *y1);
                if self.signed_distance(x, y) >= 0.0 {
                    // outside or on the boundary: clamping projects onto it
                    if cx == x && cy == y {
                        return (x, y);
                    }
                    return (cx, cy);
                }
                // inside: push to the nearest side
                let dl = x - x0;
                let dr = x1 - x;
                let db = y - y0;
                let dt = y1 - y;
                let m = dl.min(dr).min(db).min(dt);
                if m == dl {
                    (*x0, cy)
                } else if m == dr {
                    (*x1, cy)
                } else if m == db {
                    (cx, *y0)
                } else {
                    (cx, *y1)
                }
            }
            Domain2D::Disc { center, radius } => {
                let dx = x - center.0;
                let dy = y - center.1;
                let r = (dx * dx + dy * dy).sqrt();
                if r == 0.0 {
                    (center.0 + radius, center.1)
                } else {
                    (center.0 + dx / r * radius, center.1 + dy / r * radius)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    FdDirect,
    Monotone,
}

/// Full Dirichlet problem configuration.
#[derive(Debug, Clone)]
pub struct GridProblem {
    pub domain: Domain2D,
    pub h_grid: f64,
    pub b: ScalarExpr,
    pub f: ScalarExpr,
    pub g_spec: GSpec,
    pub scheme: Scheme,
    pub tol_solver: f64,
    pub max_iters: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub quad_tol: f64,
}

/// Uniform lattice covering the domain bounding box with a two-node margin
/// (wide stencils reach two cells past the interior).
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2D {
    pub fn flat(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.h, self.y0 + j as f64 * self.h)
    }
}

/// Lattice with interior classification and fixed (boundary-data) values
/// baked into every non-interior node.
#[derive(Debug, Clone)]
pub struct SolveGrid {
    pub grid: Grid2D,
    pub is_interior: Vec<bool>,
    pub interior: Vec<usize>,
}

/// Interior test: signed distance below `-h/2`.
pub fn build_grid(domain: &Domain2D, h: f64) -> Result<SolveGrid, SolverError> {
    if !(h > 0.0) {
        return Err(SolverError::Config(format!("grid spacing {h} <= 0")));
    }
    let (bx0, by0, bx1, by1) = domain.bounding_box();
    let nx_inner = ((bx1 - bx0) / h).round() as usize + 1;
    let ny_inner = ((by1 - by0) / h).round() as usize + 1;
    let grid = Grid2D {
        nx: nx_inner + 4,
        ny: ny_inner + 4,
        h,
        x0: bx0 - 2.0 * h,
        y0: by0 - 2.0 * h,
    };
    let mut is_interior = vec![false; grid.nx * grid.ny];
    let mut interior = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = grid.point(i, j);
            if domain.signed_distance(x, y) < -0.5 * h {
                is_interior[grid.flat(i, j)] = true;
                interior.push(grid.flat(i, j));
            }
        }
    }
    if interior.is_empty() {
        return Err(SolverError::Config(
            "no interior nodes: grid spacing too coarse for the domain".into(),
        ));
    }
    Ok(SolveGrid {
        grid,
        is_interior,
        interior,
    })
}

impl SolveGrid {
    /// Fill every non-interior node with boundary data evaluated at its
    /// closest boundary point (first-order ghost values).
    pub fn fixed_values(
        &self,
        domain: &Domain2D,
        b_tilde: &dyn Fn(f64, f64) -> Result<f64, SolverError>,
    ) -> Result<Vec<f64>, SolverError> {
        let mut vals = vec![0.0; self.grid.nx * self.grid.ny];
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let flat = self.grid.flat(i, j);
                if !self.is_interior[flat] {
                    let (x, y) = self.grid.point(i, j);
                    let (px, py) = domain.project_to_boundary(x, y);
                    vals[flat] = b_tilde(px, py)?;
                }
            }
        }
        Ok(vals)
    }

    /// Centered gradient magnitude squared.
    pub fn grad_sq(&self, v: &[f64], flat: usize) -> f64 {
        let nx = self.grid.nx;
        let h = self.grid.h;
        let vx = (v[flat + 1] - v[flat - 1]) / (2.0 * h);
        let vy = (v[flat + nx] - v[flat - nx]) / (2.0 * h);
        vx * vx + vy * vy
    }

    /// Normalized wide-stencil increment: the second derivative along the
    /// steepest up/down directions,
    /// `2 (s_max + s_min) / (d_max + d_min)` over 16 lattice directions.
    /// Non-decreasing in every neighbor value.
    pub fn monotone_increment(&self, v: &[f64], flat: usize) -> f64 {
        const OFFS: [(i64, i64); 16] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
            (2, 1),
            (1, 2),
            (-1, 2),
            (-2, 1),
            (-2, -1),
            (-1, -2),
            (1, -2),
            (2, -1),
        ];
        let nx = self.grid.nx as i64;
        let h = self.grid.h;
        let v0 = v[flat];
        let mut s_max = f64::NEG_INFINITY;
        let mut d_max = h;
        let mut s_min = f64::INFINITY;
        let mut d_min = h;
        for (di, dj) in OFFS {
            let idx = (flat as i64 + dj * nx + di) as usize;
            let dist = h * ((di * di + dj * dj) as f64).sqrt();
            let slope = (v[idx] - v0) / dist;
            if slope > s_max {
                s_max = slope;
                d_max = dist;
            }
            if slope < s_min {
                s_min = slope;
                d_min = dist;
            }
        }
        2.0 * (s_max + s_min) / (d_max + d_min)
    }

    /// Discrete infinity-Laplacian at an interior node.
    pub fn inf_laplacian(&self, v: &[f64], flat: usize, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::FdDirect => {
                let nx = self.grid.nx;
                let h = self.grid.h;
                let v0 = v[flat];
                let vx = (v[flat + 1] - v[flat - 1]) / (2.0 * h);
                let vy = (v[flat + nx] - v[flat - nx]) / (2.0 * h);
                let vxx = (v[flat + 1] - 2.0 * v0 + v[flat - 1]) / (h * h);
                let vyy = (v[flat + nx] - 2.0 * v0 + v[flat - nx]) / (h * h);
                let vxy = (v[flat + nx + 1] + v[flat - nx - 1]
                    - v[flat + nx - 1]
                    - v[flat - nx + 1])
                    / (4.0 * h * h);
                vxx * vx * vx + 2.0 * vxy * vx * vy + vyy * vy * vy
            }
            Scheme::Monotone => self.monotone_increment(v, flat) * self.grad_sq(v, flat),
        }
    }
}

/// Initial field for the relaxation.
pub enum Init<'a> {
    /// Smooth the boundary data by solving the 5-point Laplace equation.
    BoundaryAverage,
    /// Bilinear interpolation of a coarser solve (grid refinement cascades).
    Warm(&'a SolveResult),
}

pub struct SolveOptions<'a> {
    pub scheme: Scheme,
    pub tol_solver: f64,
    pub max_iters: usize,
    pub init: Init<'a>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub grid: Grid2D,
    pub is_interior: Vec<bool>,
    /// Full-lattice transformed field (fixed values at non-interior nodes).
    pub v_lattice: Vec<f64>,
    /// Full-lattice pulled-back field.
    pub u_lattice: Vec<f64>,
    pub residual_inf: f64,
    pub iters: usize,
    pub converged: bool,
}

impl SolveResult {
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.grid.nx;
        self.is_interior
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(move |(flat, _)| (flat % nx, flat / nx))
    }

    /// Sup-norm error of the transformed field against an exact solution.
    pub fn sup_error_v(&self, exact: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, j) in self.interior_nodes() {
            let (x, y) = self.grid.point(i, j);
            worst = worst.max((self.v_lattice[self.grid.flat(i, j)] - exact(x, y)).abs());
        }
        worst
    }

    pub fn sup_error_u(&self, exact: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, j) in self.interior_nodes() {
            let (x, y) = self.grid.point(i, j);
            worst = worst.max((self.u_lattice[self.grid.flat(i, j)] - exact(x, y)).abs());
        }
        worst
    }

    /// CSV export of interior nodes: `x,y,v,u` with 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "x,y,v,u")?;
        for (i, j) in self.interior_nodes() {
            let (x, y) = self.grid.point(i, j);
            let flat = self.grid.flat(i, j);
            writeln!(
                w,
                "{},{},{},{}",
                fmt_g17(x),
                fmt_g17(y),
                fmt_g17(self.v_lattice[flat]),
                fmt_g17(self.u_lattice[flat])
            )?;
        }
        Ok(())
    }

    /// Binary PGM (P5) heatmap of the pulled-back field over the lattice;
    /// non-interior pixels are black, scaling recorded in the header.
    pub fn write_pgm(&self, w: &mut impl Write) -> io::Result<()> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, j) in self.interior_nodes() {
            let v = self.u_lattice[self.grid.flat(i, j)];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        writeln!(w, "P5")?;
        writeln!(w, "# min={} max={}", fmt_g17(lo), fmt_g17(hi))?;
        writeln!(w, "{} {}", self.grid.nx, self.grid.ny)?;
        writeln!(w, "255")?;
        let span = hi - lo;
        let mut row = Vec::with_capacity(self.grid.nx);
        for j in (0..self.grid.ny).rev() {
            row.clear();
            for i in 0..self.grid.nx {
                let flat = self.grid.flat(i, j);
                let px = if self.is_interior[flat] && span > 0.0 {
                    (255.0 * (self.u_lattice[flat] - lo) / span).round() as u8
                } else if self.is_interior[flat] {
                    128
                } else {
                    0
                };
                row.push(px);
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

/// Jacobi sweeps for the 5-point Laplace equation, used as the smooth
/// deterministic initial field.
fn laplace_init(sg: &SolveGrid, v: &mut Vec<f64>, tol: f64) {
    let nx = sg.grid.nx;
    let h2 = sg.grid.h * sg.grid.h;
    let scale = 1.0
        + v.iter()
            .zip(sg.is_interior.iter())
            .filter(|(_, &int)| !int)
            .map(|(val, _)| val.abs())
            .fold(0.0f64, f64::max);
    // mean of fixed values as the starting interior fill
    let mut sum = 0.0;
    let mut count = 0usize;
    for (flat, &int) in sg.is_interior.iter().enumerate() {
        if !int {
            sum += v[flat];
            count += 1;
        }
    }
    let mean = if count > 0 { sum / count as f64 } else { 0.0 };
    for &flat in &sg.interior {
        v[flat] = mean;
    }
    let mut next = v.clone();
    let max_sweeps = 400_000;
    for _ in 0..max_sweeps {
        let mut worst = 0.0f64;
        for &flat in &sg.interior {
            let nb = v[flat + 1] + v[flat - 1] + v[flat + nx] + v[flat - nx];
            let resid = (nb - 4.0 * v[flat]) / h2;
            worst = worst.max(resid.abs());
            next[flat] = 0.25 * nb;
        }
        std::mem::swap(v, &mut next);
        // keep fixed nodes authoritative (swap copies them already)
        if worst <= tol * scale {
            break;
        }
    }
}

/// Solve `Delta_inf v = h0(x, v)` with fixed boundary values already baked
/// into the transformed problem, then pull back through the table.
pub fn solve_transformed(
    domain: &Domain2D,
    h_grid: f64,
    b_tilde: &dyn Fn(f64, f64) -> Result<f64, SolverError>,
    h0: &dyn Fn(f64, f64, f64) -> Result<f64, SolverError>,
    table: &TransformTable,
    opts: &SolveOptions,
) -> Result<SolveResult, SolverError> {
    let sg = build_grid(domain, h_grid)?;
    let nx = sg.grid.nx;
    let mut v = sg.fixed_values(domain, b_tilde)?;

    match &opts.init {
        Init::BoundaryAverage => {
            let tol_init = opts.tol_solver.min(1e-6);
            laplace_init(&sg, &mut v, tol_init);
        }
        Init::Warm(coarse) => {
            for &flat in &sg.interior {
                let (x, y) = sg.grid.point(flat % nx, flat / nx);
                v[flat] = bilinear(coarse, x, y);
            }
        }
    }

    let h2 = h_grid * h_grid;
    let mut residuals = vec![0.0f64; v.len()];
    let mut iters = 0usize;
    let mut converged = false;
    let mut residual_inf = f64::INFINITY;
    let mut next = v.clone();

    for iter in 0..=opts.max_iters {
        // residual pass (also the update direction)
        let mut gmax = 0.0f64;
        for &flat in &sg.interior {
            gmax = gmax.max(sg.grad_sq(&v, flat));
        }
        let tau = 0.2 * h2 / (gmax + 1e-8);

        let mut worst = 0.0f64;
        for &flat in &sg.interior {
            let (x, y) = sg.grid.point(flat % nx, flat / nx);
            let r = sg.inf_laplacian(&v, flat, opts.scheme) - h0(x, y, v[flat])?;
            residuals[flat] = r;
            worst = worst.max(r.abs());
        }
        residual_inf = worst;
        if !worst.is_finite() {
            return Err(SolverError::NonFinite { iter });
        }
        if worst <= opts.tol_solver {
            converged = true;
            break;
        }
        if iter == opts.max_iters {
            break;
        }

        for &flat in &sg.interior {
            next[flat] = v[flat] + tau * residuals[flat];
        }
        std::mem::swap(&mut v, &mut next);
        iters = iter + 1;
    }

    let mut u = v.clone();
    for (flat, val) in u.iter_mut().enumerate() {
        if sg.is_interior[flat] {
            *val = table.phi_inv(v[flat])?;
        } else {
            *val = table.phi_inv(v[flat].clamp(table.s_range().0, table.s_range().1))?;
        }
    }

    Ok(SolveResult {
        grid: sg.grid,
        is_interior: sg.is_interior,
        v_lattice: v,
        u_lattice: u,
        residual_inf,
        iters,
        converged,
    })
}

fn bilinear(coarse: &SolveResult, x: f64, y: f64) -> f64 {
    let g = &coarse.grid;
    let fx = ((x - g.x0) / g.h).clamp(0.0, (g.nx - 1) as f64 - 1e-9);
    let fy = ((y - g.y0) / g.h).clamp(0.0, (g.ny - 1) as f64 - 1e-9);
    let i = fx.floor() as usize;
    let j = fy.floor() as usize;
    let ax = fx - i as f64;
    let ay = fy - j as f64;
    let v00 = coarse.v_lattice[g.flat(i, j)];
    let v10 = coarse.v_lattice[g.flat(i + 1, j)];
    let v01 = coarse.v_lattice[g.flat(i, j + 1)];
    let v11 = coarse.v_lattice[g.flat(i + 1, j + 1)];
    v00 * (1.0 - ax) * (1.0 - ay) + v10 * ax * (1.0 - ay) + v01 * (1.0 - ax) * ay + v11 * ax * ay
}

/// Full pipeline: build the transform table, push the boundary data, build
/// the transformed reaction, solve, and pull the solution back.
pub fn solve_with_gradient_term(problem: &GridProblem) -> Result<SolveResult, SolverError> {
    solve_with_gradient_term_init(problem, Init::BoundaryAverage)
}

/// Same as [`solve_with_gradient_term`] with an explicit initial field
/// (grid-cascade refinement studies).
pub fn solve_with_gradient_term_init(
    problem: &GridProblem,
    init: Init,
) -> Result<SolveResult, SolverError> {
    let table = TransformTable::build(
        problem.g_spec.clone(),
        problem.t_min,
        problem.t_max,
        problem.quad_tol,
    )?;
    let op = crate::operators::OperatorSpec::infinity(2);
    let reaction = build_h(&table, &problem.f, &op);

    let b_expr = &problem.b;
    let b_tilde = |x: f64, y: f64| -> Result<f64, SolverError> {
        let pairs = [("x1", x), ("x2", y)];
        let t = b_expr.eval(&Bindings::new(&pairs))?;
        Ok(table.phi(t)?)
    };
    let h0 = |x: f64, y: f64, s: f64| -> Result<f64, SolverError> {
        Ok(reaction.h0_fast(&[x, y], s)?)
    };
    let opts = SolveOptions {
        scheme: problem.scheme,
        tol_solver: problem.tol_solver,
        max_iters: problem.max_iters,
        init,
    };
    solve_transformed(&problem.domain, problem.h_grid, &b_tilde, &h0, &table, &opts)
}
