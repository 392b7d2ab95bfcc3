//! Operator catalog: the symbol `M(x, p, X)`, its entrywise matrix gradient
//! in the Hessian slot, and the gradient term `N(x, p, X) = <dM/dX p, p>`,
//! together with checkers for p-homogeneity and the rank-one-shift expansion
//! `M(x, p, γX + σ p⊗p) = γ^{β+1} M + σ γ^β N`.
//!
//! Convention at `p = 0`: the matrix gradient (and hence `N`) is zero. This
//! removes the singularities of the m-Laplace (m < 4) and of the normalized
//! infinity-Laplace symbols at the origin of the gradient slot.

use crate::linalg::{self, LinalgError, SymMatrix, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("invalid operator: {0}")]
    Invalid(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The catalog entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// `M = tr(X)`
    Laplace,
    /// `M = |p|^{m-4} (|p|^2 tr X + (m-2) <Xp, p>)`, `M(x,0,X) = 0`
    MLaplace { m: f64 },
    /// `M = tr_k(X)`
    KHessian { k: usize },
    /// `M = <Xp, p>`
    InfinityLaplace,
    /// `M = <Xp, p> / |p|^2`, `M(x,0,X) = 0`
    NormalizedInfinityLaplace,
}

/// A catalog operator in ambient dimension `n` with its homogeneity
/// exponent `alpha` (in `p`) and shift exponent `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    n: usize,
    alpha: f64,
    beta: u32,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, n: usize) -> Result<Self, OperatorError> {
        if !(2..=linalg::MAX_DIM).contains(&n) {
            return Err(OperatorError::Invalid(format!(
                "dimension n={n} out of range 2..=8"
            )));
        }
        let (alpha, beta) = match kind {
            OperatorKind::Laplace => (0.0, 0),
            OperatorKind::MLaplace { m } => {
                if !(m >= 1.0) {
                    return Err(OperatorError::Invalid(format!(
                        "m-laplace requires m >= 1, got {m}"
                    )));
                }
                (m - 2.0, 0)
            }
            OperatorKind::KHessian { k } => {
                if k < 1 || k > n {
                    return Err(OperatorError::Invalid(format!(
                        "k-hessian requires 1 <= k <= n={n}, got k={k}"
                    )));
                }
                (0.0, (k - 1) as u32)
            }
            OperatorKind::InfinityLaplace => (2.0, 0),
            OperatorKind::NormalizedInfinityLaplace => (0.0, 0),
        };
        Ok(OperatorSpec {
            kind,
            n,
            alpha,
            beta,
        })
    }

    pub fn laplace(n: usize) -> Self {
        Self::new(OperatorKind::Laplace, n).unwrap()
    }

    pub fn m_laplace(m: f64, n: usize) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::MLaplace { m }, n)
    }

    pub fn k_hessian(k: usize, n: usize) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::KHessian { k }, n)
    }

    pub fn infinity(n: usize) -> Self {
        Self::new(OperatorKind::InfinityLaplace, n).unwrap()
    }

    pub fn normalized_infinity(n: usize) -> Self {
        Self::new(OperatorKind::NormalizedInfinityLaplace, n).unwrap()
    }

    /// Parse a CLI operator name: `laplace`, `m-laplace:<m>`,
    /// `k-hessian:<k>`, `infinity`, `normalized-infinity`.
    pub fn from_name(name: &str, n: usize) -> Result<Self, OperatorError> {
        if name == "laplace" {
            return Self::new(OperatorKind::Laplace, n);
        }
        if name == "infinity" {
            return Self::new(OperatorKind::InfinityLaplace, n);
        }
        if name == "normalized-infinity" {
            return Self::new(OperatorKind::NormalizedInfinityLaplace, n);
        }
        if let Some(m) = name.strip_prefix("m-laplace:") {
            let m: f64 = m
                .parse()
                .map_err(|_| OperatorError::Invalid(format!("bad m-laplace parameter `{m}`")))?;
            return Self::new(OperatorKind::MLaplace { m }, n);
        }
        if let Some(k) = name.strip_prefix("k-hessian:") {
            let k: usize = k
                .parse()
                .map_err(|_| OperatorError::Invalid(format!("bad k-hessian parameter `{k}`")))?;
            return Self::new(OperatorKind::KHessian { k }, n);
        }
        Err(OperatorError::Invalid(format!(
            "unknown operator `{name}` (expected laplace, m-laplace:<m>, k-hessian:<k>, infinity, normalized-infinity)"
        )))
    }

    pub fn name(&self) -> String {
        match self.kind {
            OperatorKind::Laplace => "laplace".into(),
            OperatorKind::MLaplace { m } => format!("m-laplace:{m}"),
            OperatorKind::KHessian { k } => format!("k-hessian:{k}"),
            OperatorKind::InfinityLaplace => "infinity".into(),
            OperatorKind::NormalizedInfinityLaplace => "normalized-infinity".into(),
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// The exponent `alpha + beta + 1` of the reaction-term transform.
    pub fn reaction_exponent(&self) -> f64 {
        self.alpha + self.beta as f64 + 1.0
    }
}

/// Evaluation point `(x, p, X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub x: Vector,
    pub p: Vector,
    pub hessian: SymMatrix,
}

impl Jet {
    pub fn new(x: Vector, p: Vector, hessian: SymMatrix) -> Self {
        Jet { x, p, hessian }
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// Magnitude used to normalize residual tolerances.
    pub fn magnitude(&self) -> f64 {
        self.p
            .as_slice()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(self.hessian.max_abs())
    }
}

fn check_dims(op: &OperatorSpec, jet: &Jet) -> Result<(), OperatorError> {
    if jet.p.dim() != op.n || jet.hessian.dim() != op.n || jet.x.dim() != op.n {
        return Err(OperatorError::Invalid(format!(
            "jet dimension mismatch: operator n={}, jet p={}, X={}",
            op.n,
            jet.p.dim(),
            jet.hessian.dim()
        )));
    }
    Ok(())
}

/// Closed-form value of `M(x, p, X)`.
pub fn eval_m(op: &OperatorSpec, jet: &Jet) -> Result<f64, OperatorError> {
    check_dims(op, jet)?;
    let p = &jet.p;
    let x = &jet.hessian;
    Ok(match op.kind {
        OperatorKind::Laplace => x.trace(),
        OperatorKind::MLaplace { m } => {
            if p.is_zero() {
                0.0
            } else {
                let norm = p.norm();
                norm.powf(m - 4.0) * (norm * norm * x.trace() + (m - 2.0) * x.quad_form(p))
            }
        }
        OperatorKind::KHessian { k } => linalg::ktrace(x, k)?,
        OperatorKind::InfinityLaplace => x.quad_form(p),
        OperatorKind::NormalizedInfinityLaplace => {
            if p.is_zero() {
                0.0
            } else {
                x.quad_form(p) / p.norm_sq()
            }
        }
    })
}

/// Closed-form matrix gradient of `M` in the Hessian slot; the zero matrix
/// at `p = 0` for every operator.
pub fn grad_m(op: &OperatorSpec, jet: &Jet) -> Result<SymMatrix, OperatorError> {
    check_dims(op, jet)?;
    let p = &jet.p;
    if p.is_zero() {
        return Ok(SymMatrix::zeros(op.n));
    }
    Ok(match op.kind {
        OperatorKind::Laplace => SymMatrix::identity(op.n),
        OperatorKind::MLaplace { m } => {
            let norm = p.norm();
            let pp = linalg::tensor(p, p)?;
            SymMatrix::identity(op.n)
                .scale(norm * norm)
                .add(&pp.scale(m - 2.0))
                .scale(norm.powf(m - 4.0))
        }
        OperatorKind::KHessian { k } => linalg::ktrace_gradient(&jet.hessian, k)?,
        OperatorKind::InfinityLaplace => linalg::tensor(p, p)?,
        OperatorKind::NormalizedInfinityLaplace => linalg::tensor(p, p)?.scale(1.0 / p.norm_sq()),
    })
}

/// Entrywise central differences of `eval_m` with single-entry perturbation
/// of a general square matrix; the zero matrix at `p = 0` by convention.
pub fn grad_m_numeric(op: &OperatorSpec, jet: &Jet, step: f64) -> Result<SymMatrix, OperatorError> {
    check_dims(op, jet)?;
    if jet.p.is_zero() {
        return Ok(SymMatrix::zeros(op.n));
    }
    let mut out = SymMatrix::zeros(op.n);
    for i in 0..op.n {
        for j in 0..op.n {
            let mut plus = jet.clone();
            plus.hessian.perturb_entry(i, j, step);
            let mut minus = jet.clone();
            minus.hessian.perturb_entry(i, j, -step);
            let fd = (eval_m(op, &plus)? - eval_m(op, &minus)?) / (2.0 * step);
            out.set(i, j, fd);
        }
    }
    Ok(out)
}

/// Default finite-difference step for [`grad_m_numeric`].
pub fn default_fd_step(jet: &Jet) -> f64 {
    1e-5 * jet.hessian.max_abs().max(1.0)
}

/// The gradient term `N(x, p, X)`, closed form where the catalog provides
/// one; zero at `p = 0`.
pub fn eval_n(op: &OperatorSpec, jet: &Jet) -> Result<f64, OperatorError> {
    check_dims(op, jet)?;
    let p = &jet.p;
    if p.is_zero() {
        return Ok(0.0);
    }
    Ok(match op.kind {
        OperatorKind::Laplace => p.norm_sq(),
        OperatorKind::MLaplace { m } => (m - 1.0) * p.norm().powf(m),
        OperatorKind::KHessian { k } => linalg::ktrace_gradient(&jet.hessian, k)?.quad_form(p),
        OperatorKind::InfinityLaplace => {
            let s = p.norm_sq();
            s * s
        }
        OperatorKind::NormalizedInfinityLaplace => p.norm_sq(),
    })
}

/// Outcome of a randomized hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub samples: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn random_jet(rng: &mut ChaCha8Rng, n: usize) -> Jet {
    let x = Vector::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
    // |p| >= 0.1 keeps negative p-homogeneity exponents well conditioned.
    let p = loop {
        let p = Vector::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
        if p.norm() >= 0.1 {
            break p;
        }
    };
    let mut hess = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-2.0..2.0);
            hess.set(i, j, v);
            hess.set(j, i, v);
        }
    }
    Jet::new(x, p, hess)
}

fn random_scalar_away_from_zero(rng: &mut ChaCha8Rng) -> f64 {
    let mag = rng.gen_range(0.1..3.0);
    if rng.gen() {
        mag
    } else {
        -mag
    }
}

/// Check `M(x, λp, X) = |λ|^α M(x, p, X)` on random jets.
pub fn check_h1(
    op: &OperatorSpec,
    samples: usize,
    seed: u64,
) -> Result<CheckReport, OperatorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tolerance = 1e-9;
    let mut max_rel = 0.0f64;
    for _ in 0..samples {
        let jet = random_jet(&mut rng, op.n);
        let lambda = random_scalar_away_from_zero(&mut rng);
        let base = eval_m(op, &jet)?;
        let scaled = Jet::new(jet.x.clone(), jet.p.scale(lambda), jet.hessian.clone());
        let lhs = eval_m(op, &scaled)?;
        let rhs = lambda.abs().powf(op.alpha) * base;
        let rel = (lhs - rhs).abs() / (1.0 + base.abs());
        max_rel = max_rel.max(rel);
    }
    Ok(CheckReport {
        samples,
        max_rel_error: max_rel,
        tolerance,
        pass: max_rel <= tolerance,
    })
}

/// Check `M(x, p, γX + σ p⊗p) = γ^{β+1} M + σ γ^β N` on random jets.
pub fn check_h2(
    op: &OperatorSpec,
    samples: usize,
    seed: u64,
) -> Result<CheckReport, OperatorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tolerance = 1e-9; // closed-form N for every catalog entry
    let mut max_rel = 0.0f64;
    for _ in 0..samples {
        let jet = random_jet(&mut rng, op.n);
        let gamma = random_scalar_away_from_zero(&mut rng);
        let sigma = rng.gen_range(-3.0..3.0);
        let m_val = eval_m(op, &jet)?;
        let n_val = eval_n(op, &jet)?;
        let pp = linalg::tensor(&jet.p, &jet.p)?;
        let shifted = Jet::new(
            jet.x.clone(),
            jet.p.clone(),
            jet.hessian.scale(gamma).add(&pp.scale(sigma)),
        );
        let lhs = eval_m(op, &shifted)?;
        let rhs = gamma.powi(op.beta as i32 + 1) * m_val + sigma * gamma.powi(op.beta as i32) * n_val;
        let rel = (lhs - rhs).abs() / (1.0 + m_val.abs() + n_val.abs());
        max_rel = max_rel.max(rel);
    }
    Ok(CheckReport {
        samples,
        max_rel_error: max_rel,
        tolerance,
        pass: max_rel <= tolerance,
    })
}

/// Cross-check `eval_n` against the quadratic form of the finite-difference
/// matrix gradient on random jets.
pub fn check_n_cross(
    op: &OperatorSpec,
    samples: usize,
    seed: u64,
) -> Result<CheckReport, OperatorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tolerance = 1e-5;
    let mut max_rel = 0.0f64;
    for _ in 0..samples {
        let jet = random_jet(&mut rng, op.n);
        let n_closed = eval_n(op, &jet)?;
        let n_numeric = grad_m_numeric(op, &jet, default_fd_step(&jet))?.quad_form(&jet.p);
        let rel = (n_closed - n_numeric).abs() / (1.0 + n_closed.abs());
        max_rel = max_rel.max(rel);
    }
    Ok(CheckReport {
        samples,
        max_rel_error: max_rel,
        tolerance,
        pass: max_rel <= tolerance,
    })
}

/// The five standard catalog entries in dimension `n` (with `m = 3`,
/// `k = 2` parameters), used by verification sweeps.
pub fn standard_catalog(n: usize) -> Vec<OperatorSpec> {
    vec![
        OperatorSpec::laplace(n),
        OperatorSpec::m_laplace(3.0, n).unwrap(),
        OperatorSpec::k_hessian(2, n).unwrap(),
        OperatorSpec::infinity(n),
        OperatorSpec::normalized_infinity(n),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet2(p: [f64; 2], rows: [[f64; 2]; 2]) -> Jet {
        Jet::new(
            Vector::zeros(2),
            Vector::from(p),
            SymMatrix::from_rows(&[&rows[0], &rows[1]]),
        )
    }

    #[test]
    fn eval_m_examples() {
        let inf = OperatorSpec::infinity(2);
        let j = jet2([1.0, 0.0], [[2.0, 0.0], [0.0, 5.0]]);
        assert_eq!(eval_m(&inf, &j).unwrap(), 2.0);

        let lap = OperatorSpec::laplace(3);
        let j3 = Jet::new(
            Vector::zeros(3),
            Vector::from([1.0, 0.0, 0.0]),
            SymMatrix::diag(&[1.0, 2.0, 3.0]),
        );
        assert_eq!(eval_m(&lap, &j3).unwrap(), 6.0);

        let kh = OperatorSpec::k_hessian(2, 3).unwrap();
        assert_eq!(eval_m(&kh, &j3).unwrap(), 11.0);
    }

    #[test]
    fn m_laplace_two_collapses_to_laplace() {
        let m2 = OperatorSpec::m_laplace(2.0, 3).unwrap();
        let lap = OperatorSpec::laplace(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let j = random_jet(&mut rng, 3);
            let a = eval_m(&m2, &j).unwrap();
            let b = eval_m(&lap, &j).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn grad_m_examples() {
        let inf = OperatorSpec::infinity(2);
        let j = jet2([1.0, 2.0], [[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(
            grad_m(&inf, &j).unwrap(),
            SymMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]])
        );

        // p = 0 gives the zero matrix for every operator.
        let zero_p = Jet::new(
            Vector::zeros(3),
            Vector::zeros(3),
            SymMatrix::diag(&[1.0, -2.0, 0.5]),
        );
        for op in standard_catalog(3) {
            assert_eq!(grad_m(&op, &zero_p).unwrap(), SymMatrix::zeros(3));
            assert_eq!(eval_n(&op, &zero_p).unwrap(), 0.0);
        }

        let m2 = OperatorSpec::m_laplace(2.0, 2).unwrap();
        let j = jet2([0.6, -0.8], [[1.0, 0.0], [0.0, 1.0]]);
        let g = grad_m(&m2, &j).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((g.get(i, k) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grad_m_numeric_matches_closed_forms() {
        let inf = OperatorSpec::infinity(2);
        let j = jet2([1.0, 1.0], [[0.3, -0.1], [-0.1, 0.9]]);
        let fd = grad_m_numeric(&inf, &j, 1e-5).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!((fd.get(i, k) - 1.0).abs() <= 1e-8);
            }
        }

        let lap = OperatorSpec::laplace(2);
        let fd = grad_m_numeric(&lap, &j, 1e-5).unwrap();
        let id = SymMatrix::identity(2);
        for i in 0..2 {
            for k in 0..2 {
                assert!((fd.get(i, k) - id.get(i, k)).abs() <= 1e-9);
            }
        }

        let kh = OperatorSpec::k_hessian(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let j = random_jet(&mut rng, 3);
        let fd = grad_m_numeric(&kh, &j, default_fd_step(&j)).unwrap();
        let exact = linalg::ktrace_gradient(&j.hessian, 2).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert!((fd.get(i, k) - exact.get(i, k)).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn eval_n_examples() {
        let lap = OperatorSpec::laplace(2);
        let j = jet2([1.0, 2.0], [[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(eval_n(&lap, &j).unwrap(), 5.0);

        let m3 = OperatorSpec::m_laplace(3.0, 2).unwrap();
        let j = jet2([0.0, 3.0], [[1.0, 0.0], [0.0, 1.0]]);
        assert!((eval_n(&m3, &j).unwrap() - 54.0).abs() < 1e-12);

        let inf = OperatorSpec::infinity(2);
        let j = jet2([1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(eval_n(&inf, &j).unwrap(), 4.0);

        // 1-Laplace admits no invariant gradient term: N = 0 identically.
        let m1 = OperatorSpec::m_laplace(1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let j = random_jet(&mut rng, 2);
            assert_eq!(eval_n(&m1, &j).unwrap(), 0.0);
        }
    }

    #[test]
    fn h1_examples() {
        let lap = OperatorSpec::laplace(2);
        let r = check_h1(&lap, 200, 1).unwrap();
        assert!(r.pass && r.max_rel_error < 1e-12);

        // Hand case: infinity with lambda = 2.
        let inf = OperatorSpec::infinity(2);
        let j = jet2([1.0, 0.0], [[1.0, 0.0], [0.0, 0.0]]);
        let scaled = Jet::new(j.x.clone(), j.p.scale(2.0), j.hessian.clone());
        assert_eq!(eval_m(&inf, &scaled).unwrap(), 4.0);
        assert_eq!(eval_m(&inf, &j).unwrap(), 1.0);

        let m3 = OperatorSpec::m_laplace(3.0, 2).unwrap();
        let r = check_h1(&m3, 1000, 2).unwrap();
        assert!(r.pass, "max_rel_error = {}", r.max_rel_error);
        assert!(r.max_rel_error <= 1e-10);
    }

    #[test]
    fn h2_examples() {
        let lap = OperatorSpec::laplace(3);
        let r = check_h2(&lap, 200, 3).unwrap();
        assert!(r.pass && r.max_rel_error < 1e-12);

        let kh = OperatorSpec::k_hessian(2, 3).unwrap();
        let r = check_h2(&kh, 500, 4).unwrap();
        assert!(r.pass, "max_rel_error = {}", r.max_rel_error);

        // Hand case: infinity, gamma=2, sigma=1, p=(1,0), X=0.
        let inf = OperatorSpec::infinity(2);
        let j = jet2([1.0, 0.0], [[0.0, 0.0], [0.0, 0.0]]);
        let pp = linalg::tensor(&j.p, &j.p).unwrap();
        let shifted = Jet::new(j.x.clone(), j.p.clone(), j.hessian.scale(2.0).add(&pp));
        let lhs = eval_m(&inf, &shifted).unwrap();
        let rhs = 2.0 * eval_m(&inf, &j).unwrap() + eval_n(&inf, &j).unwrap();
        assert_eq!(lhs, 1.0);
        assert_eq!(rhs, 1.0);
    }

    #[test]
    fn hypothesis_checks_pass_for_whole_catalog() {
        for op in standard_catalog(2)
            .into_iter()
            .chain(standard_catalog(3))
            .chain([OperatorSpec::m_laplace(1.0, 2).unwrap()])
            .chain([OperatorSpec::m_laplace(1.5, 2).unwrap()])
            .chain([OperatorSpec::k_hessian(3, 3).unwrap()])
        {
            let h1 = check_h1(&op, 300, 11).unwrap();
            assert!(h1.pass, "{} h1: {}", op.name(), h1.max_rel_error);
            let h2 = check_h2(&op, 300, 12).unwrap();
            assert!(h2.pass, "{} h2: {}", op.name(), h2.max_rel_error);
        }
    }

    #[test]
    fn n_cross_check_against_numeric_gradient() {
        for op in standard_catalog(2) {
            let r = check_n_cross(&op, 300, 13).unwrap();
            assert!(r.pass, "{}: {}", op.name(), r.max_rel_error);
        }
    }

    #[test]
    fn k_hessian_one_agrees_with_laplace() {
        let k1 = OperatorSpec::k_hessian(1, 3).unwrap();
        let lap = OperatorSpec::laplace(3);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let j = random_jet(&mut rng, 3);
            let a = eval_m(&k1, &j).unwrap();
            let b = eval_m(&lap, &j).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            let na = eval_n(&k1, &j).unwrap();
            let nb = eval_n(&lap, &j).unwrap();
            assert!((na - nb).abs() <= 1e-12 * (1.0 + nb.abs()));
        }
    }

    #[test]
    fn name_parsing() {
        assert_eq!(
            OperatorSpec::from_name("m-laplace:3", 2).unwrap(),
            OperatorSpec::m_laplace(3.0, 2).unwrap()
        );
        assert!(OperatorSpec::from_name("k-hessian:9", 3).is_err());
        assert!(OperatorSpec::from_name("mystery", 2).is_err());
        assert!(OperatorSpec::m_laplace(0.5, 2).is_err());
    }
}
