//! Instruction-by-instruction certificate verification.
//!
//! Each obligation is a PSD test on a difference of claimed matrices. The
//! checker never solves a Lyapunov equation, never recomputes `R_init`, and
//! reads the system only through the MAC coefficients of the program body.

use std::fmt;

use crate::annotator::Certificate;
use crate::error::{Error, Result};
use crate::matrixkit::{min_eigenvalue, psd_floor, Matrix};
use crate::program::{instruction_matrix, Instruction, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    StepContainment,
    Closure,
    InitBox,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::StepContainment => "step-containment",
            FailureKind::Closure => "closure",
            FailureKind::InitBox => "init-box",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub label: String,
    /// Index into the certificate's points; `None` for the loop head.
    pub point: Option<usize>,
    pub kind: FailureKind,
    /// Smallest eigenvalue of the obligation matrix.
    pub witness: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub certified: bool,
    pub failures: Vec<Failure>,
}

/// Outcome of one PSD obligation `D ⪰ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Obligation {
    pub holds: bool,
    pub min_eigenvalue: f64,
}

fn discharge(d: &Matrix, tol: f64) -> Result<Obligation> {
    let min = min_eigenvalue(d)?;
    Ok(Obligation {
        holds: min >= psd_floor(d, tol),
        min_eigenvalue: min,
    })
}

/// `post ⪰ T·pre·Tᵀ` for the instruction's matrix `T`.
pub fn check_step(
    pre: &Matrix,
    instr: &Instruction,
    post: &Matrix,
    n: usize,
    tol: f64,
) -> Result<Obligation> {
    let dim = 2 * n;
    for (name, m) in [("pre", pre), ("post", post)] {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::invalid(format!(
                "{name}-invariant is {}x{}, expected {dim}x{dim}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let t = instruction_matrix(instr, n)?;
    discharge(&(post - &t.congruence(pre)?), tol)
}

pub fn check_certificate(p: &Program, cert: &Certificate, tol: f64) -> Result<Verdict> {
    let n = p.n();
    let dim = 2 * n;
    if cert.points.len() != p.body().len() {
        return Err(Error::invalid(format!(
            "certificate has {} points for a body of {} instructions",
            cert.points.len(),
            p.body().len()
        )));
    }
    if cert.r_init.rows() != dim || cert.r_init.cols() != dim {
        return Err(Error::invalid(format!(
            "loop-head invariant is {}x{}, expected {dim}x{dim}",
            cert.r_init.rows(),
            cert.r_init.cols()
        )));
    }

    let mut failures = Vec::new();

    let ball = Matrix::identity(dim).scale(p.init_box().squared_radius());
    let head = discharge(&(&cert.r_init - &ball), tol)?;
    if !head.holds {
        failures.push(Failure {
            label: "r_init".into(),
            point: None,
            kind: FailureKind::InitBox,
            witness: head.min_eigenvalue,
        });
    }

    let mut pre = &cert.r_init;
    for (k, (instr, point)) in p.body().iter().zip(&cert.points).enumerate() {
        let step = check_step(pre, instr, &point.r, n, tol)?;
        if !step.holds {
            failures.push(Failure {
                label: point.label.clone(),
                point: Some(k),
                kind: FailureKind::StepContainment,
                witness: step.min_eigenvalue,
            });
        }
        pre = &point.r;
    }

    let closure = discharge(&(&cert.r_init - pre), tol)?;
    if !closure.holds {
        failures.push(Failure {
            label: cert
                .points
                .last()
                .map(|pt| pt.label.clone())
                .unwrap_or_else(|| "r_init".into()),
            point: cert.points.len().checked_sub(1),
            kind: FailureKind::Closure,
            witness: closure.min_eigenvalue,
        });
    }

    Ok(Verdict {
        certified: failures.is_empty(),
        failures,
    })
}
