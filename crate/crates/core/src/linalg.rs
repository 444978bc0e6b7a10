//! Thin wrappers over nalgebra's symmetric/Hermitian eigensolvers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted non-increasing.
/// Column `k` of the returned matrix is the eigenvector of eigenvalue `k`.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let h = hermitize(m);
    let eig = SymmetricEigen::try_new(h, EIG_EPS, EIG_MAX_ITER).ok_or(Error::Eigensolver)?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let h = hermitize(m);
    let eig = SymmetricEigen::try_new(h, EIG_EPS, EIG_MAX_ITER).ok_or(Error::Eigensolver)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Real symmetric eigen-decomposition, eigenvalues sorted non-decreasing.
pub(crate) fn symmetric_eigen(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let s = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(s, EIG_EPS, EIG_MAX_ITER).ok_or(Error::Eigensolver)?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// `f(M)` for a real symmetric positive definite `M` through its spectral decomposition.
pub(crate) fn symmetric_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let (values, vectors) = symmetric_eigen(m)?;
    let n = values.len();
    let mut scaled = vectors.clone();
    for (j, v) in values.iter().enumerate() {
        let fv = f(*v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    let out = &scaled * vectors.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

pub(crate) fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn symmetric_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}
