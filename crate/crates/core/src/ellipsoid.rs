//! Centered ellipsoids in R-representation.
//!
//! `E_R = { z : [[R, z], [zᵀ, 1]] ⪰ 0 }` for symmetric PSD `R`. A singular
//! `R` is a bounded, flat ellipsoid; no inverse of `R` is ever formed.

use crate::error::{Error, Result};
use crate::matrixkit::{is_psd, is_psd_cholesky, max_eigenvalue, min_eigenvalue, sym_eigen, sym_sqrt, Matrix};
use crate::matrixkit::{PSD_TOL, SYMMETRY_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    r: Matrix,
}

impl Ellipsoid {
    /// Validates symmetry and semidefiniteness of `r`; stores `(R+Rᵀ)/2`
    /// with small negative eigenvalues clamped to zero.
    pub fn new(r: Matrix) -> Result<Self> {
        let r = r.symmetric_within(SYMMETRY_TOL)?;
        let eig = sym_eigen(&r)?;
        let floor = crate::matrixkit::psd_floor(&r, PSD_TOL);
        if eig.min() < floor {
            return Err(Error::invalid(format!(
                "ellipsoid matrix is indefinite (min eigenvalue {:e})",
                eig.min()
            )));
        }
        let r = if eig.min() < 0.0 {
            eig.map_spectrum(|l| l.max(0.0))
        } else {
            r
        };
        Ok(Ellipsoid { r })
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        Ellipsoid {
            r: Matrix::identity(dim).scale(radius * radius),
        }
    }

    pub fn dim(&self) -> usize {
        self.r.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.r
    }

    pub fn into_matrix(self) -> Matrix {
        self.r
    }

    pub fn member(&self, z: &[f64], tol: f64) -> Result<bool> {
        member_of(&self.r, z, tol)
    }

    /// `E_{T·R·Tᵀ}`, the image of `self` under `z ↦ T·z`.
    pub fn image(&self, t: &Matrix) -> Result<Ellipsoid> {
        if t.cols() != self.dim() {
            return Err(Error::invalid(format!(
                "map with {} columns applied to a {}-dimensional ellipsoid",
                t.cols(),
                self.dim()
            )));
        }
        // congruence of a PSD matrix stays PSD; no re-validation
        Ok(Ellipsoid {
            r: t.congruence(&self.r)?,
        })
    }

    /// `inner ⊆ self`, decided as `self.R − inner.R ⪰ 0` within `tol`.
    pub fn contains(&self, inner: &Ellipsoid, tol: f64) -> Result<bool> {
        let diff = self.difference(inner)?;
        is_psd(&diff, tol)
    }

    /// Smallest eigenvalue of `self.R − inner.R`; non-negative when
    /// containment holds.
    pub fn containment_margin(&self, inner: &Ellipsoid) -> Result<f64> {
        min_eigenvalue(&self.difference(inner)?)
    }

    fn difference(&self, inner: &Ellipsoid) -> Result<Matrix> {
        if self.dim() != inner.dim() {
            return Err(Error::invalid(format!(
                "containment between dimensions {} and {}",
                self.dim(),
                inner.dim()
            )));
        }
        Ok(&self.r - &inner.r)
    }

    /// Exact `max |z_i|` over the ellipsoid: `sqrt(R_ii)`.
    pub fn variable_bound(&self, i: usize) -> Result<f64> {
        if i >= self.dim() {
            return Err(Error::invalid(format!(
                "coordinate {i} outside dimension {}",
                self.dim()
            )));
        }
        Ok(self.r[(i, i)].max(0.0).sqrt())
    }

    /// `R^{1/2}·u`; lies on the boundary when `u` is a unit vector and
    /// `R` is non-singular along it.
    pub fn boundary_point(&self, u: &[f64]) -> Result<Vec<f64>> {
        sym_sqrt(&self.r)?.mul_vec(u)
    }
}

/// Membership through the bordered matrix. Works for any symmetric `r`, so
/// claimed certificate matrices can be tested before they are validated.
///
/// The PSD decision uses the Cholesky route; membership is evaluated
/// millions of times by the soundness oracle.
pub fn member_of(r: &Matrix, z: &[f64], tol: f64) -> Result<bool> {
    let d = r.rows();
    if !r.is_square() || z.len() != d {
        return Err(Error::invalid(format!(
            "point of length {} tested against a {}x{} ellipsoid",
            z.len(),
            r.rows(),
            r.cols()
        )));
    }
    let mut b = Matrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            b[(i, j)] = r[(i, j)];
        }
        b[(i, d)] = z[i];
        b[(d, i)] = z[i];
    }
    b[(d, d)] = 1.0;
    Ok(is_psd_cholesky(&b, tol))
}

/// Radius of the smallest centered ball containing every ellipsoid.
pub fn bounding_ball(ellipsoids: &[Ellipsoid]) -> Result<f64> {
    let first = ellipsoids
        .first()
        .ok_or_else(|| Error::invalid("bounding ball of an empty list"))?;
    let mut radius = 0.0f64;
    for e in ellipsoids {
        if e.dim() != first.dim() {
            return Err(Error::invalid(format!(
                "bounding ball over mixed dimensions {} and {}",
                first.dim(),
                e.dim()
            )));
        }
        radius = radius.max(max_eigenvalue(&e.r)?.max(0.0).sqrt());
    }
    Ok(radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ell(rows: &[&[f64]]) -> Ellipsoid {
        Ellipsoid::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn construction() {
        let disk = Ellipsoid::new(Matrix::identity(2)).unwrap();
        assert_eq!(disk.dim(), 2);
        let seg = Ellipsoid::new(Matrix::from_diag(&[1.0, 0.0])).unwrap();
        assert!(seg.member(&[1.0, 0.0], PSD_TOL).unwrap());
        assert!(!seg.member(&[0.0, 0.1], PSD_TOL).unwrap());
        ell(&[&[2.0, 1.0], &[1.0, 2.0]]);

        assert!(Ellipsoid::new(Matrix::from_diag(&[1.0, -0.5])).is_err());
        assert!(Ellipsoid::new(Matrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap()).is_err());
    }

    #[test]
    fn clamps_tiny_negative_spectrum() {
        let e = Ellipsoid::new(Matrix::from_diag(&[1.0, -1e-13])).unwrap();
        assert!(min_eigenvalue(e.matrix()).unwrap() >= 0.0);
    }

    #[test]
    fn membership_boundary() {
        let disk = Ellipsoid::ball(2, 1.0);
        assert!(disk.member(&[0.0, 0.0], PSD_TOL).unwrap());
        assert!(disk.member(&[1.0, 0.0], PSD_TOL).unwrap());
        assert!(!disk.member(&[1.01, 0.0], PSD_TOL).unwrap());
        assert!(disk.member(&[1.0], PSD_TOL).is_err());
    }

    #[test]
    fn degenerate_membership_witness() {
        // bordered [[1,0,0],[0,0,0.1],[0,0.1,1]]: the lower 2x2 block has
        // determinant −0.01, so one eigenvalue is negative
        let b = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 0.1], [0.0, 0.1, 1.0]]).unwrap();
        assert!(min_eigenvalue(&b).unwrap() < -1e-3);
        let seg = Ellipsoid::new(Matrix::from_diag(&[1.0, 0.0])).unwrap();
        assert!(!seg.member(&[0.0, 0.1], PSD_TOL).unwrap());
    }

    #[test]
    fn images() {
        let disk = Ellipsoid::ball(2, 1.0);
        assert_eq!(disk.image(&Matrix::identity(2)).unwrap(), disk);
        let stretched = disk.image(&Matrix::from_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(stretched.matrix(), &Matrix::from_diag(&[4.0, 1.0]));
        let proj = Matrix::from_rows(&[[1.0, 0.0]]).unwrap();
        let seg = disk.image(&proj).unwrap();
        assert_eq!(seg.matrix(), &Matrix::from_diag(&[1.0]));
        assert!(disk.image(&Matrix::identity(3)).is_err());
    }

    #[test]
    fn containment() {
        let e = ell(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!(e.contains(&e, PSD_TOL).unwrap());
        let big = Ellipsoid::new(Matrix::identity(2).scale(2.0)).unwrap();
        let small = Ellipsoid::ball(2, 1.0);
        assert!(big.contains(&small, PSD_TOL).unwrap());
        assert!(!small.contains(&big, PSD_TOL).unwrap());
        assert!((big.containment_margin(&small).unwrap() - 1.0).abs() < 1e-15);
        assert!(big.contains(&Ellipsoid::ball(3, 1.0), PSD_TOL).is_err());
    }

    #[test]
    fn variable_bounds() {
        let unit = Ellipsoid::ball(3, 1.0);
        for i in 0..3 {
            assert_eq!(unit.variable_bound(i).unwrap(), 1.0);
        }
        let d = Ellipsoid::new(Matrix::from_diag(&[4.0, 0.25])).unwrap();
        assert_eq!(d.variable_bound(0).unwrap(), 2.0);
        assert_eq!(d.variable_bound(1).unwrap(), 0.5);
        assert!(d.variable_bound(2).is_err());
    }

    #[test]
    fn variable_bound_matches_boundary_sampling() {
        // maximize z_0 over R^{1/2}·(cos t, sin t)
        let e = ell(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let mut best = [0.0f64; 2];
        for k in 0..20_000 {
            let t = k as f64 * std::f64::consts::TAU / 20_000.0;
            let z = e.boundary_point(&[t.cos(), t.sin()]).unwrap();
            best[0] = best[0].max(z[0].abs());
            best[1] = best[1].max(z[1].abs());
        }
        for (i, b) in best.iter().enumerate() {
            assert!((b - 2f64.sqrt()).abs() < 1e-6);
            assert!((e.variable_bound(i).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn bounding_balls() {
        assert_eq!(bounding_ball(&[Ellipsoid::ball(2, 1.0)]).unwrap(), 1.0);
        let list = [
            Ellipsoid::new(Matrix::from_diag(&[4.0, 1.0])).unwrap(),
            Ellipsoid::new(Matrix::from_diag(&[1.0, 9.0])).unwrap(),
        ];
        assert!((bounding_ball(&list).unwrap() - 3.0).abs() < 1e-15);
        assert!(bounding_ball(&[]).is_err());
        assert!(bounding_ball(&[Ellipsoid::ball(2, 1.0), Ellipsoid::ball(3, 1.0)]).is_err());
    }
}
