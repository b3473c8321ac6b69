//! Discrete Lyapunov equation `AᵀPA − P = −Q` by Kronecker vectorization.

use super::eigen::{sym_eigen, PSD_TOL, SYMMETRY_TOL};
use super::Matrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LyapunovSolution {
    pub p: Matrix,
    /// Largest eigenvalue of `p`.
    pub sigma_max: f64,
    pub min_eigenvalue: f64,
    /// ‖AᵀPA − P + Q‖_F.
    pub residual: f64,
}

/// Solves `AᵀPA − P = −Q` for symmetric `P` and requires `P ≻ 0`.
///
/// With row-major vectorization, `vec(AᵀPA) = (Aᵀ ⊗ Aᵀ)·vec(P)`, so the
/// equation is the dense `m²×m²` system `(Aᵀ⊗Aᵀ − I)·vec(P) = −vec(Q)`.
/// A singular system or an indefinite `P` means `x ↦ Ax` is not
/// asymptotically stable and is reported as [`Error::UnstableSystem`].
pub fn solve_discrete_lyapunov(a: &Matrix, q: &Matrix) -> Result<LyapunovSolution> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "Lyapunov solve needs a square A, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let m = a.rows();
    if q.rows() != m || q.cols() != m {
        return Err(Error::invalid(format!(
            "Q must be {m}x{m}, got {}x{}",
            q.rows(),
            q.cols()
        )));
    }
    let q = q.symmetric_within(SYMMETRY_TOL)?;
    let q_eig = sym_eigen(&q)?;
    if q_eig.min() <= PSD_TOL * (1.0 + q.frobenius_norm()) {
        return Err(Error::invalid(format!(
            "Q must be positive definite (min eigenvalue {:e})",
            q_eig.min()
        )));
    }

    let at = a.transpose();
    let mut system = at.kron(&at);
    for k in 0..m * m {
        system[(k, k)] -= 1.0;
    }
    let rhs: Vec<f64> = q.as_slice().iter().map(|v| -v).collect();
    let vec_p = lu_solve(system, rhs).ok_or_else(|| {
        Error::UnstableSystem(
            "Lyapunov system is singular (A has eigenvalue pairs with product 1)".into(),
        )
    })?;
    let p = Matrix::new(m, m, vec_p)
        .map_err(|_| Error::UnstableSystem("Lyapunov solution is not finite".into()))?
        .symmetrize();

    let atpa = &(&at * &p) * a;
    let residual = (&(&atpa - &p) + &q).frobenius_norm();
    let eig = sym_eigen(&p)?;
    let floor = PSD_TOL * (1.0 + p.frobenius_norm());
    if eig.min() <= floor {
        return Err(Error::UnstableSystem(format!(
            "Lyapunov solution is not positive definite (min eigenvalue {:e})",
            eig.min()
        )));
    }
    Ok(LyapunovSolution {
        sigma_max: eig.max(),
        min_eigenvalue: eig.min(),
        p,
        residual,
    })
}

// Gaussian elimination with partial pivoting. None when a pivot vanishes
// relative to the matrix scale.
fn lu_solve(mut a: Matrix, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.rows();
    let scale = a.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = f64::EPSILON * n as f64 * scale;
    for col in 0..n {
        let (piv, pval) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pval <= tiny {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            b.swap(col, piv);
        }
        let d = a[(col, col)];
        for r in (col + 1)..n {
            let f = a[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[(r, j)] -= f * a[(col, j)];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| a[(i, j)] * x[j]).sum();
        x[i] = (b[i] - s) / a[(i, i)];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_two_by_two() {
        // AᵀPA = p11·e22, so P − p11·e22 = I gives P = diag(1, 2).
        let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let sol = solve_discrete_lyapunov(&a, &Matrix::identity(2)).unwrap();
        assert!(sol.p.max_abs_diff(&Matrix::from_diag(&[1.0, 2.0])) < 1e-14);
        assert!((sol.sigma_max - 2.0).abs() < 1e-14);
        assert!(sol.residual < 1e-14);
    }

    #[test]
    fn zero_dynamics_returns_q() {
        let a = Matrix::zeros(1, 1);
        let q = Matrix::from_diag(&[1.0]);
        let sol = solve_discrete_lyapunov(&a, &q).unwrap();
        assert_eq!(sol.p, q);
    }

    #[test]
    fn scalar_unstable() {
        // p·(a² − 1) = −1 has p < 0 for |a| > 1.
        let a = Matrix::from_diag(&[1.1]);
        let err = solve_discrete_lyapunov(&a, &Matrix::identity(1)).unwrap_err();
        assert!(matches!(err, Error::UnstableSystem(_)));
    }

    #[test]
    fn marginal_is_singular() {
        let a = Matrix::from_diag(&[1.0]);
        let err = solve_discrete_lyapunov(&a, &Matrix::identity(1)).unwrap_err();
        assert!(matches!(err, Error::UnstableSystem(_)));
    }

    #[test]
    fn rejects_indefinite_q() {
        let a = Matrix::zeros(2, 2);
        let q = Matrix::from_diag(&[1.0, 0.0]);
        assert!(matches!(
            solve_discrete_lyapunov(&a, &q),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn oscillator_outside_unit_circle() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [-1.05, 0.0]]).unwrap();
        assert!(matches!(
            solve_discrete_lyapunov(&a, &Matrix::identity(2)),
            Err(Error::UnstableSystem(_))
        ));
    }
}
