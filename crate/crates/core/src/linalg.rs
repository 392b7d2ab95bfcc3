//! Symmetric-matrix algebra for the operator catalog: tensor products,
//! k-traces (sums of principal minors), their entrywise gradients, and the
//! rank-one update identity `tr_k(X ± p⊗p) = tr_k(X) ± <S*_k(X)p, p>`.
//!
//! Matrices are stored as full square arrays. Symmetry is a convention of
//! the constructors, not an enforced representation: single-entry
//! perturbations of a general square matrix are exactly what the entrywise
//! derivative definition requires.

use thiserror::Error;

pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("k out of range: k={k}, n={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("unsupported dimension n={0} (must be 2..=8)")]
    UnsupportedDimension(usize),
}

/// Dense n-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    comps: Vec<f64>,
}

impl Vector {
    pub fn new(comps: Vec<f64>) -> Self {
        Vector { comps }
    }

    pub fn zeros(n: usize) -> Self {
        Vector {
            comps: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub fn get(&self, i: usize) -> f64 {
        self.comps[i]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        self.comps[i] = v;
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector {
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }
}

impl From<&[f64]> for Vector {
    fn from(s: &[f64]) -> Self {
        Vector { comps: s.to_vec() }
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(s: [f64; N]) -> Self {
        Vector { comps: s.to_vec() }
    }
}

/// Square matrix in row-major full storage. Symmetric by construction for
/// the catalog values; general squares appear only as finite-difference
/// perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] = v;
    }

    /// Add `v` to the single entry (i, j). Deliberately does not touch the
    /// mirror entry.
    pub fn perturb_entry(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.n + j] += v;
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.n, v.dim());
        let mut out = Vector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.get(i, j) * v.get(j);
            }
            out.set(i, acc);
        }
        out
    }

    /// Quadratic form `<X q, q>`.
    pub fn quad_form(&self, q: &Vector) -> f64 {
        self.mul_vec(q).dot(q)
    }
}

/// Tensor product `p ⊗ q` with entries `(i, j) -> q_i * p_j`; symmetric when
/// `p = q`.
pub fn tensor(p: &Vector, q: &Vector) -> Result<SymMatrix, LinalgError> {
    if p.dim() != q.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "tensor of {}-vector with {}-vector",
            p.dim(),
            q.dim()
        )));
    }
    let n = p.dim();
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, q.get(i) * p.get(j));
        }
    }
    Ok(m)
}

/// Determinant of the k x k submatrix of `x` picked by `rows` x `cols`,
/// by Gaussian elimination with partial pivoting.
fn subdet(x: &SymMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    debug_assert_eq!(cols.len(), k);
    match k {
        0 => return 1.0,
        1 => return x.get(rows[0], cols[0]),
        2 => {
            return x.get(rows[0], cols[0]) * x.get(rows[1], cols[1])
                - x.get(rows[0], cols[1]) * x.get(rows[1], cols[0])
        }
        _ => {}
    }
    let mut a = vec![0.0f64; k * k];
    for (ai, &ri) in rows.iter().enumerate() {
        for (aj, &cj) in cols.iter().enumerate() {
            a[ai * k + aj] = x.get(ri, cj);
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in (col + 1)..k {
            if a[r * k + col].abs() > a[piv * k + col].abs() {
                piv = r;
            }
        }
        if a[piv * k + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..k {
                a.swap(col * k + j, piv * k + j);
            }
            det = -det;
        }
        let d = a[col * k + col];
        det *= d;
        for r in (col + 1)..k {
            let factor = a[r * k + col] / d;
            for j in col..k {
                a[r * k + j] -= factor * a[col * k + j];
            }
        }
    }
    det
}

/// Iterate over all k-element index subsets of 0..n in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_k(x: &SymMatrix, k: usize) -> Result<(), LinalgError> {
    let n = x.dim();
    if !(2..=MAX_DIM).contains(&n) {
        return Err(LinalgError::UnsupportedDimension(n));
    }
    if k < 1 || k > n {
        return Err(LinalgError::KOutOfRange { k, n });
    }
    Ok(())
}

/// k-trace: the sum of all k x k principal minors. `k = 1` is the trace,
/// `k = n` the determinant.
pub fn ktrace(x: &SymMatrix, k: usize) -> Result<f64, LinalgError> {
    check_k(x, k)?;
    let mut sum = 0.0;
    for_each_subset(x.dim(), k, |s| {
        sum += subdet(x, s, s);
    });
    Ok(sum)
}

/// Entrywise gradient `S*_k(X)` of the k-trace, each entry treated as an
/// independent variable of a general square matrix. For a principal subset
/// `S` containing positions `a, b`, the contribution to entry
/// `(S[a], S[b])` is the cofactor of `(a, b)` inside the submatrix.
pub fn ktrace_gradient(x: &SymMatrix, k: usize) -> Result<SymMatrix, LinalgError> {
    check_k(x, k)?;
    let n = x.dim();
    let mut grad = SymMatrix::zeros(n);
    for_each_subset(n, k, |s| {
        for a in 0..k {
            for b in 0..k {
                let rows: Vec<usize> = (0..k).filter(|&r| r != a).map(|r| s[r]).collect();
                let cols: Vec<usize> = (0..k).filter(|&c| c != b).map(|c| s[c]).collect();
                let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                let cof = sign * subdet(x, &rows, &cols);
                grad.perturb_entry(s[a], s[b], cof);
            }
        }
    });
    Ok(grad)
}

/// Residual of the rank-one update identity, both signs:
/// `|tr_k(X+pp) - tr_k(X) - <S*_k(X)p,p>| + |tr_k(X-pp) - tr_k(X) + <S*_k(X)p,p>|`.
pub fn rank_one_update_check(x: &SymMatrix, p: &Vector, k: usize) -> Result<f64, LinalgError> {
    if p.dim() != x.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}-vector against {}x{} matrix",
            p.dim(),
            x.dim(),
            x.dim()
        )));
    }
    let pp = tensor(p, p)?;
    let base = ktrace(x, k)?;
    let quad = ktrace_gradient(x, k)?.quad_form(p);
    let plus = ktrace(&x.add(&pp), k)?;
    let minus = ktrace(&x.add(&pp.scale(-1.0)), k)?;
    Ok((plus - base - quad).abs() + (minus - base + quad).abs())
}
