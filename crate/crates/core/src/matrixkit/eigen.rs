//! Symmetric eigendecomposition by cyclic Jacobi rotations, and the PSD
//! tests built on it.

use super::Matrix;
use crate::error::{Error, Result};

/// Default relative tolerance for every PSD decision in the crate.
pub const PSD_TOL: f64 = 1e-9;

/// Symmetry slack accepted on input before symmetrizing.
pub const SYMMETRY_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Spectral decomposition `M = V·diag(λ)·Vᵀ`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let v = &self.eigenvectors;
        (0..v.rows()).map(|i| v[(i, k)]).collect()
    }

    /// `V·diag(f(λ))·Vᵀ`, symmetrized.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.map_spectrum(|l| l)
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// The input must be symmetric within `1e-9·(1+‖M‖_F)`; it is symmetrized
/// before rotating. Sweeps stop once the off-diagonal Frobenius mass drops
/// below `1e-12·‖M‖_F`.
pub fn sym_eigen(m: &Matrix) -> Result<SymEigen> {
    let mut a = m.symmetric_within(SYMMETRY_TOL)?;
    let n = a.rows();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NumericalFailure(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&k| a[(k, k)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(SymEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

// One rotation zeroing a[p][q]; applies A ← JᵀAJ and V ← VJ.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

pub fn min_eigenvalue(m: &Matrix) -> Result<f64> {
    Ok(sym_eigen(m)?.min())
}

pub fn max_eigenvalue(m: &Matrix) -> Result<f64> {
    Ok(sym_eigen(m)?.max())
}

/// Minimum eigenvalue admitted as "non-negative" for `m`: `-tol·(1+‖M‖_F)`.
pub fn psd_floor(m: &Matrix, tol: f64) -> f64 {
    -tol * (1.0 + m.frobenius_norm())
}

/// True iff the smallest eigenvalue is at least `-tol·(1+‖M‖_F)`.
pub fn is_psd(m: &Matrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(m)? >= psd_floor(m, tol))
}

/// Same predicate as [`is_psd`], decided by attempting a Cholesky
/// factorization of `M + tol·(1+‖M‖_F)·I` instead of an eigensolve. Only
/// matrices on the tolerance boundary itself can be classified differently.
pub fn is_psd_cholesky(m: &Matrix, tol: f64) -> bool {
    assert!(m.is_square(), "PSD test needs a square matrix");
    let n = m.rows();
    let shift = -psd_floor(m, tol);
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m[(j, j)] + shift;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = 0.5 * (m[(i, j)] + m[(j, i)]);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    true
}

/// Symmetric PSD square root. Eigenvalues that are negative but within
/// tolerance are clamped to zero.
pub fn sym_sqrt(m: &Matrix) -> Result<Matrix> {
    let eig = sym_eigen(m)?;
    if eig.min() < psd_floor(m, PSD_TOL) {
        return Err(Error::invalid(format!(
            "square root of a matrix with eigenvalue {:e}",
            eig.min()
        )));
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Inverse of a symmetric positive definite matrix through its spectrum.
pub fn sym_inverse(m: &Matrix) -> Result<Matrix> {
    let eig = sym_eigen(m)?;
    if eig.min() <= 0.0 {
        return Err(Error::invalid(format!(
            "matrix is not positive definite (min eigenvalue {:e})",
            eig.min()
        )));
    }
    Ok(eig.map_spectrum(|l| 1.0 / l))
}
