//! Dense symmetric linear algebra: the matrix carrier, Jacobi
//! eigendecomposition, PSD tests and the discrete Lyapunov solver.

mod eigen;
mod lyapunov;
mod matrix;

pub use eigen::{
    is_psd, is_psd_cholesky, max_eigenvalue, min_eigenvalue, psd_floor, sym_eigen, sym_inverse, sym_sqrt, SymEigen,
    PSD_TOL, SYMMETRY_TOL,
};
pub use lyapunov::{solve_discrete_lyapunov, LyapunovSolution};
pub use matrix::Matrix;
