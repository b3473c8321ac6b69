#![allow(dead_code)]

use ellipcert::Matrix;
use rand::Rng;

pub fn reference_a() -> Matrix {
    Matrix::from_rows(&[[0.0, 1.0], [-0.1, -0.2]]).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> Matrix {
    random_matrix(rng, n, n).symmetrize().scale(2.0)
}

/// `B·Bᵀ + shift·I` for a random `B`.
pub fn random_pd(rng: &mut impl Rng, n: usize, shift: f64) -> Matrix {
    let b = random_matrix(rng, n, n);
    &(&b * &b.transpose()) + &Matrix::identity(n).scale(shift)
}

/// Largest singular value by power iteration on AᵀA.
pub fn spectral_norm(a: &Matrix) -> f64 {
    let ata = &a.transpose() * a;
    let mut v = vec![1.0; a.cols()];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w = ata.mul_vec(&v).unwrap();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda.sqrt()
}

/// Random matrix rescaled to spectral norm in [0.3, 0.9].
pub fn random_stable(rng: &mut impl Rng, n: usize) -> Matrix {
    let a = random_matrix(rng, n, n);
    let target = rng.gen_range(0.3..0.9);
    a.scale(target / spectral_norm(&a))
}

/// `[[0, I], [0, A]]` in the `(y, x)` layout.
pub fn net_loop_map(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        for j in 0..n {
            m[(n + i, n + j)] = a[(i, j)];
        }
    }
    m
}
