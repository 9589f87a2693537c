//! Small dense linear-algebra helpers shared by the Lie-algebra and solver
//! layers: numerical nullspaces, subspace arithmetic and inertia counts.
//!
//! Subspaces are always carried as matrices with orthonormal columns.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Singular values below `NULLSPACE_RTOL * sigma_max` count as zero.
pub const NULLSPACE_RTOL: f64 = 1e-10;
/// Residual allowed when testing that one subspace lies inside another.
pub const INCLUSION_TOL: f64 = 1e-9;
/// Eigenvalues below `SIGNATURE_RTOL * max|eig|` count as zero.
pub const SIGNATURE_RTOL: f64 = 1e-8;

fn padded_svd(a: &DMatrix<f64>) -> nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let (m, n) = a.shape();
    if m >= n {
        a.clone().svd(true, true)
    } else {
        let mut sq = DMatrix::zeros(n, n);
        sq.view_mut((0, 0), (m, n)).copy_from(a);
        sq.svd(true, true)
    }
}

/// Orthonormal basis (as columns) of the nullspace of `a`.
pub fn nullspace(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = padded_svd(a);
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.max();
    let cut = rtol * smax;
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= cut)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    from_columns(n, &cols)
}

/// Orthonormal basis of the column space of `a`.
pub fn column_space(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return DMatrix::zeros(m, 0);
    }
    // Column space of A is the orthogonal complement of ker(A^T).
    let left_null = nullspace(&a.transpose(), rtol);
    if a.amax() == 0.0 {
        return DMatrix::zeros(m, 0);
    }
    orthogonal_complement(&left_null, m)
}

/// Numerical rank with the nullspace tolerance convention.
pub fn rank(a: &DMatrix<f64>, rtol: f64) -> usize {
    let (m, n) = a.shape();
    if m == 0 || n == 0 || a.amax() == 0.0 {
        return 0;
    }
    n - nullspace(a, rtol).ncols()
}

/// Basis of `{w in span(within) : w orthogonal to span(sub)}`.
pub fn complement_within(sub: &DMatrix<f64>, within: &DMatrix<f64>) -> DMatrix<f64> {
    let n = within.nrows();
    if within.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    if sub.ncols() == 0 {
        return within.clone();
    }
    let coupling = within.transpose() * sub; // j x k
    let coeffs = nullspace(&coupling.transpose(), 1e-9);
    if coeffs.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    within * coeffs
}

pub fn orthogonal_complement(sub: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    complement_within(sub, &DMatrix::identity(n, n))
}

/// Largest residual of a column of `small` after projection onto `big`
/// (orthonormal columns). Returns the index of the worst column too.
pub fn inclusion_residual(big: &DMatrix<f64>, small: &DMatrix<f64>) -> (f64, Option<usize>) {
    let mut worst = (0.0, None);
    for (j, col) in small.column_iter().enumerate() {
        let proj = if big.ncols() == 0 {
            DVector::zeros(col.nrows())
        } else {
            big * (big.transpose() * col)
        };
        let r = (col - proj).norm();
        if worst.1.is_none() || r > worst.0 {
            worst = (r, Some(j));
        }
    }
    worst
}

pub fn from_columns(nrows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nrows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Inertia of a symmetric form: counts of negative, zero and positive
/// eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Signature {
    pub fn is_nonsingular(&self) -> bool {
        self.zero == 0
    }

    pub fn is_positive_definite(&self) -> bool {
        self.zero == 0 && self.negative == 0 && self.positive > 0
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.negative, self.zero, self.positive)
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.negative, self.zero, self.positive)
    }
}

/// Eigenvalues and inertia of a symmetric matrix. The matrix is
/// symmetrized first.
pub fn symmetric_signature(a: &DMatrix<f64>, rtol: f64) -> (Signature, Vec<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Signature { negative: 0, zero: 0, positive: 0 }, vec![]);
    }
    let sym = (a + a.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    let scale = eig.iter().fold(0.0_f64, |acc, e| acc.max(e.abs()));
    let cut = rtol * scale;
    let mut sig = Signature { negative: 0, zero: 0, positive: 0 };
    for &e in &eig {
        if scale == 0.0 || e.abs() <= cut {
            sig.zero += 1;
        } else if e < 0.0 {
            sig.negative += 1;
        } else {
            sig.positive += 1;
        }
    }
    (sig, eig)
}
