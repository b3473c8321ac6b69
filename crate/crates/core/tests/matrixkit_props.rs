mod common;

use common::*;
use ellipcert::matrixkit::{
    is_psd, is_psd_cholesky, min_eigenvalue, solve_discrete_lyapunov, sym_eigen, sym_sqrt,
    Matrix, PSD_TOL,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn symmetric(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-10.0f64..10.0, n * n)
        .prop_map(move |d| Matrix::new(n, n, d).unwrap().symmetrize())
}

fn any_symmetric() -> impl Strategy<Value = Matrix> {
    (1usize..=8).prop_flat_map(symmetric)
}

proptest! {
    #[test]
    fn eigen_reconstructs(m in any_symmetric()) {
        let e = sym_eigen(&m).unwrap();
        let tol = 1e-9 * (1.0 + m.frobenius_norm());
        prop_assert!(e.reconstruct().max_abs_diff(&m) <= tol);
        let vtv = &e.eigenvectors.transpose() * &e.eigenvectors;
        prop_assert!(vtv.max_abs_diff(&Matrix::identity(m.rows())) <= 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn psd_agrees_with_spectrum(m in any_symmetric()) {
        let min = min_eigenvalue(&m).unwrap();
        let floor = -PSD_TOL * (1.0 + m.frobenius_norm());
        prop_assert_eq!(is_psd(&m, PSD_TOL).unwrap(), min >= floor);
    }

    #[test]
    fn cholesky_route_agrees_off_boundary(m in any_symmetric(), shift in -3.0f64..3.0) {
        let m = &m + &Matrix::identity(m.rows()).scale(shift);
        let min = min_eigenvalue(&m).unwrap();
        let floor = -PSD_TOL * (1.0 + m.frobenius_norm());
        prop_assume!((min - floor).abs() > 1e-8 * (1.0 + m.frobenius_norm()));
        prop_assert_eq!(is_psd_cholesky(&m, PSD_TOL), is_psd(&m, PSD_TOL).unwrap());
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_pd(&mut rng, n, 0.0);
        let s = sym_sqrt(&m).unwrap();
        prop_assert!(is_psd(&s, PSD_TOL).unwrap());
        prop_assert!((&s * &s).max_abs_diff(&m) <= 1e-9 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn lyapunov_residual_small(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_stable(&mut rng, n);
        let q = random_pd(&mut rng, n, 0.5);
        let sol = solve_discrete_lyapunov(&a, &q).unwrap();
        let residual = (&(&(&(&a.transpose() * &sol.p) * &a) - &sol.p) + &q).frobenius_norm();
        prop_assert!(residual <= 1e-8 * (1.0 + q.frobenius_norm()));
        prop_assert!((sol.residual - residual).abs() <= 1e-12 * (1.0 + residual));
        prop_assert!(sol.p.asymmetry() == 0.0);
        prop_assert!((sol.sigma_max - sym_eigen(&sol.p).unwrap().max()).abs() <= 1e-12 * sol.sigma_max);
    }
}

#[test]
fn lyapunov_matches_series_oracle() {
    // P = Σ (Aᵀ)^k Q A^k for a stable A
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 1..=4 {
        let a = random_stable(&mut rng, n);
        let q = Matrix::identity(n);
        let mut term = q.clone();
        let mut series = q.clone();
        for _ in 0..400 {
            term = &(&a.transpose() * &term) * &a;
            series = &series + &term;
        }
        let sol = solve_discrete_lyapunov(&a, &q).unwrap();
        assert!(sol.p.max_abs_diff(&series) < 1e-10 * series.frobenius_norm());
    }
}
