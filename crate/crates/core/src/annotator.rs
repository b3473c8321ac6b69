//! Certificate construction.
//!
//! The loop head carries `R_init = α·P⁻¹` where `P` solves the discrete
//! Lyapunov equation of the net loop map `A₁`. Each instruction image
//! `T·R·Tᵀ` is the post-invariant of that instruction; the loop closes when
//! the last invariant is contained in `R_init`.

use serde::{Deserialize, Serialize};

use crate::ellipsoid::Ellipsoid;
use crate::error::{Error, Result};
use crate::matrixkit::{
    is_psd, solve_discrete_lyapunov, sym_inverse, LyapunovSolution, Matrix,
    PSD_TOL, SYMMETRY_TOL,
};
use crate::program::{instruction_matrix, loop_matrix, Program};

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatorOptions {
    /// Lyapunov weight; identity of size `2n` when `None`.
    pub q: Option<Matrix>,
    /// Multiplies `α`; 1 is the least scale covering the initial ball.
    pub safety_factor: f64,
    pub tol: f64,
}

impl Default for AnnotatorOptions {
    fn default() -> Self {
        AnnotatorOptions {
            q: None,
            safety_factor: 2.0,
            tol: PSD_TOL,
        }
    }
}

impl AnnotatorOptions {
    pub fn weight(&self, dim: usize) -> Result<Matrix> {
        let q = match &self.q {
            Some(q) => q.clone(),
            None => return Ok(Matrix::identity(dim)),
        };
        if q.rows() != dim || q.cols() != dim {
            return Err(Error::invalid(format!(
                "Q must be {dim}x{dim}, got {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.safety_factor.is_finite() && self.safety_factor >= 1.0) {
            return Err(Error::invalid(format!(
                "safety factor must be finite and at least 1, got {}",
                self.safety_factor
            )));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::invalid(format!("tolerance must be non-negative, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Loop-head invariant and the quantities it was scaled from.
#[derive(Clone, Debug)]
pub struct LoopHead {
    pub r_init: Ellipsoid,
    pub alpha: f64,
    pub sigma_max: f64,
    pub lyapunov: LyapunovSolution,
}

/// `R_init = α·P⁻¹` with `α = safety·ρ²·σ_max(P)`.
///
/// `ball_radius_sq` is `ρ²` for the ball `E_{ρ²I}` that must fit inside
/// `R_init`; it is `n` for the unit box. Because `P ⪯ σ_max·I`, the
/// smallest eigenvalue of `R_init` is `safety·ρ²`.
pub fn compute_rinit(
    a1: &Matrix,
    ball_radius_sq: f64,
    opts: &AnnotatorOptions,
) -> Result<LoopHead> {
    opts.validate()?;
    if !(ball_radius_sq.is_finite() && ball_radius_sq >= 0.0) {
        return Err(Error::invalid(format!(
            "ball radius squared must be non-negative, got {ball_radius_sq}"
        )));
    }
    let q = opts.weight(a1.rows())?;
    let lyapunov = solve_discrete_lyapunov(a1, &q)?;
    let sigma_max = lyapunov.sigma_max;
    let alpha = opts.safety_factor * ball_radius_sq * sigma_max;
    let r_init = Ellipsoid::new(sym_inverse(&lyapunov.p)?.scale(alpha))?;
    Ok(LoopHead {
        r_init,
        alpha,
        sigma_max,
        lyapunov,
    })
}

/// Post-invariant of every instruction, starting from `r_init`.
pub fn propagate(p: &Program, r_init: &Ellipsoid) -> Result<Vec<(String, Ellipsoid)>> {
    if r_init.dim() != 2 * p.n() {
        return Err(Error::invalid(format!(
            "loop-head invariant has dimension {}, program state has {}",
            r_init.dim(),
            2 * p.n()
        )));
    }
    let mut current = r_init.clone();
    let mut out = Vec::with_capacity(p.body().len());
    for (k, instr) in p.body().iter().enumerate() {
        current = current.image(&instruction_matrix(instr, p.n())?)?;
        out.push((p.point_label(k), current.clone()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPoint {
    pub label: String,
    pub r: Matrix,
}

/// Invariant matrices for every program point of one loop iteration.
///
/// Matrices are stored as claimed, so certificates read from disk can be
/// refuted by the checker even when a claim is not a valid ellipsoid.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub n: usize,
    pub a: Matrix,
    pub q: Matrix,
    pub safety_factor: f64,
    pub tol: f64,
    pub alpha: f64,
    pub sigma_max: f64,
    pub r_init: Matrix,
    pub points: Vec<InvariantPoint>,
    pub closure_ok: bool,
    /// Smallest eigenvalue of `R_init − V_nn`.
    pub closure_margin: f64,
    pub init_box_ok: bool,
}

impl Certificate {
    /// Final invariant of the loop body; `R_init` for an empty body.
    pub fn v_nn(&self) -> &Matrix {
        self.points.last().map(|p| &p.r).unwrap_or(&self.r_init)
    }

    pub fn certified(&self) -> bool {
        self.closure_ok && self.init_box_ok
    }

    /// Loop-head invariant followed by every point invariant.
    pub fn ellipsoids(&self) -> Result<Vec<Ellipsoid>> {
        std::iter::once(&self.r_init)
            .chain(self.points.iter().map(|p| &p.r))
            .map(|r| Ellipsoid::new(r.clone()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = CertificateDoc {
            n: self.n,
            a: self.a.to_rows(),
            options: OptionsDoc {
                q: self.q.to_rows(),
                safety_factor: self.safety_factor,
                tol: self.tol,
            },
            alpha: self.alpha,
            sigma_max: self.sigma_max,
            r_init: self.r_init.to_rows(),
            points: self
                .points
                .iter()
                .map(|p| PointDoc {
                    label: p.label.clone(),
                    r: p.r.to_rows(),
                })
                .collect(),
            closure_ok: self.closure_ok,
            closure_margin: self.closure_margin,
            init_box_ok: self.init_box_ok,
        };
        serde_json::to_string_pretty(&doc).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CertificateDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        doc.into_certificate()
    }
}

/// Builds the full certificate for `p`. A failed closure or box check is
/// recorded in the certificate, not returned as an error.
pub fn annotate(p: &Program, opts: &AnnotatorOptions) -> Result<Certificate> {
    let a1 = loop_matrix(p);
    let ball = p.init_box().squared_radius();
    let head = compute_rinit(&a1, ball, opts)?;
    let chain = propagate(p, &head.r_init)?;

    let v_nn = chain.last().map(|(_, e)| e).unwrap_or(&head.r_init);
    let closure_ok = head.r_init.contains(v_nn, opts.tol)?;
    let closure_margin = head.r_init.containment_margin(v_nn)?;
    let dim = 2 * p.n();
    let init_box_ok = is_psd(&(head.r_init.matrix() - &Matrix::identity(dim).scale(ball)), opts.tol)?;

    Ok(Certificate {
        n: p.n(),
        a: p.a().clone(),
        q: opts.weight(dim)?,
        safety_factor: opts.safety_factor,
        tol: opts.tol,
        alpha: head.alpha,
        sigma_max: head.sigma_max,
        r_init: head.r_init.matrix().clone(),
        points: chain
            .into_iter()
            .map(|(label, e)| InvariantPoint {
                label,
                r: e.into_matrix(),
            })
            .collect(),
        closure_ok,
        closure_margin,
        init_box_ok,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    options: OptionsDoc,
    alpha: f64,
    sigma_max: f64,
    r_init: Vec<Vec<f64>>,
    points: Vec<PointDoc>,
    closure_ok: bool,
    closure_margin: f64,
    init_box_ok: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsDoc {
    #[serde(rename = "Q")]
    q: Vec<Vec<f64>>,
    safety_factor: f64,
    tol: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    label: String,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
}

fn square_matrix(rows: &[Vec<f64>], dim: usize, at: &str) -> Result<Matrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::parse(at, format!("expected a {dim}x{dim} matrix")));
    }
    Matrix::from_rows(rows).map_err(|e| Error::parse(at, e.to_string()))
}

fn symmetric_matrix(rows: &[Vec<f64>], dim: usize, at: &str) -> Result<Matrix> {
    square_matrix(rows, dim, at)?
        .symmetric_within(SYMMETRY_TOL)
        .map_err(|e| Error::parse(at, e.to_string()))
}

impl CertificateDoc {
    fn into_certificate(self) -> Result<Certificate> {
        let n = self.n;
        if n == 0 {
            return Err(Error::parse("n", "dimension must be at least 1"));
        }
        let dim = 2 * n;
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                Ok(InvariantPoint {
                    label: p.label.clone(),
                    r: symmetric_matrix(&p.r, dim, &format!("points[{k}].R"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            n,
            a: square_matrix(&self.a, n, "A")?,
            q: symmetric_matrix(&self.options.q, dim, "options.Q")?,
            safety_factor: self.options.safety_factor,
            tol: self.options.tol,
            alpha: self.alpha,
            sigma_max: self.sigma_max,
            r_init: symmetric_matrix(&self.r_init, dim, "r_init")?,
            points,
            closure_ok: self.closure_ok,
            closure_margin: self.closure_margin,
            init_box_ok: self.init_box_ok,
        })
    }
}
