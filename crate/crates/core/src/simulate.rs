//! Concrete execution of programs and a Monte Carlo soundness oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::annotator::Certificate;
use crate::ellipsoid::member_of;
use crate::error::{Error, Result};
use crate::matrixkit::Matrix;
use crate::program::Program;

/// Membership slack used by the oracle; looser than the checker's.
pub const ORACLE_TOL: f64 = 1e-7;

/// Joint states `(y, x)`: the initial state, then one state after every
/// instruction of every cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub body_len: usize,
    pub states: Vec<Vec<f64>>,
}

impl Trace {
    pub fn initial(&self) -> &[f64] {
        &self.states[0]
    }

    /// State after instruction `k` (0-based) of cycle `c` (0-based).
    pub fn after(&self, cycle: usize, k: usize) -> &[f64] {
        &self.states[1 + cycle * self.body_len + k]
    }

    /// Loop-head state before cycle `c`; `c` may equal the cycle count.
    pub fn loop_head(&self, cycle: usize) -> &[f64] {
        if cycle == 0 {
            self.initial()
        } else {
            self.after(cycle - 1, self.body_len - 1)
        }
    }
}

/// Runs `cycles` iterations by executing each assignment directly.
pub fn run(p: &Program, x0: &[f64], cycles: usize) -> Result<Trace> {
    if !p.init_box().contains(x0) {
        return Err(Error::invalid(format!(
            "initial state {x0:?} lies outside the init box {:?}",
            p.init_box().bounds()
        )));
    }
    let n = p.n();
    let mut state = vec![0.0; 2 * n];
    state[n..].copy_from_slice(x0);
    let mut states = Vec::with_capacity(1 + cycles * p.body().len());
    states.push(state.clone());
    for _ in 0..cycles {
        for instr in p.body() {
            instr.execute(&mut state);
            states.push(state.clone());
        }
    }
    Ok(Trace {
        body_len: p.body().len(),
        states,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub trial: usize,
    pub cycle: usize,
    /// Program point label; `r_init` for the loop head.
    pub label: String,
    pub point: Option<usize>,
    pub state: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SoundnessReport {
    pub trials: usize,
    pub cycles: usize,
    pub membership_checks: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
    /// Largest |state_i| seen over every checked state, per joint coordinate.
    pub max_abs: Vec<f64>,
}

/// Box corners first, then points on each face along the axes, then
/// uniform samples; `trials` caps the total.
pub fn initial_states(p: &Program, trials: usize, seed: u64) -> Vec<Vec<f64>> {
    let bounds = p.init_box().bounds();
    let n = bounds.len();
    let mut out = Vec::with_capacity(trials);
    if n < 20 {
        for mask in 0u64..(1u64 << n) {
            if out.len() == trials {
                return out;
            }
            out.push(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { -bounds[i] } else { bounds[i] })
                    .collect(),
            );
        }
    }
    for i in 0..n {
        for sign in [1.0, -1.0] {
            if out.len() == trials {
                return out;
            }
            let mut x = vec![0.0; n];
            x[i] = sign * bounds[i];
            out.push(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < trials {
        out.push(
            bounds
                .iter()
                .map(|&b| if b == 0.0 { 0.0 } else { rng.gen_range(-b..=b) })
                .collect(),
        );
    }
    out
}

/// Executes every sampled initial state and tests membership of the state
/// in the claimed invariant at every program point of every cycle.
///
/// Trials run in parallel; results merge in trial order, so the report is
/// a function of the seed alone.
pub fn monte_carlo_soundness(
    p: &Program,
    cert: &Certificate,
    trials: usize,
    cycles: usize,
    seed: u64,
) -> Result<SoundnessReport> {
    if cert.points.len() != p.body().len() || cert.n != p.n() {
        return Err(Error::invalid(format!(
            "certificate for n={} with {} points does not match program n={} with {} instructions",
            cert.n,
            cert.points.len(),
            p.n(),
            p.body().len()
        )));
    }
    let n = p.n();
    let per_trial = initial_states(p, trials, seed)
        .into_par_iter()
        .enumerate()
        .map(|(trial, x0)| trial_report(p, cert, trial, &x0, cycles))
        .collect::<Vec<_>>();

    let mut report = SoundnessReport {
        trials,
        cycles,
        membership_checks: 0,
        violations: 0,
        first_violation: None,
        max_abs: vec![0.0; 2 * n],
    };
    for t in per_trial {
        let t = t?;
        report.membership_checks += t.membership_checks;
        report.violations += t.violations;
        if report.first_violation.is_none() {
            report.first_violation = t.first_violation;
        }
        for (m, v) in report.max_abs.iter_mut().zip(&t.max_abs) {
            *m = m.max(*v);
        }
    }
    Ok(report)
}

fn trial_report(
    p: &Program,
    cert: &Certificate,
    trial: usize,
    x0: &[f64],
    cycles: usize,
) -> Result<SoundnessReport> {
    let n = p.n();
    let mut report = SoundnessReport {
        trials: 1,
        cycles,
        membership_checks: 0,
        violations: 0,
        first_violation: None,
        max_abs: vec![0.0; 2 * n],
    };
    let mut check = |cycle: usize, point: Option<usize>, r: &Matrix, state: &[f64]| -> Result<()> {
        report.membership_checks += 1;
        for (m, v) in report.max_abs.iter_mut().zip(state) {
            *m = m.max(v.abs());
        }
        if !member_of(r, state, ORACLE_TOL)? {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(Violation {
                    trial,
                    cycle,
                    label: point
                        .map(|k| cert.points[k].label.clone())
                        .unwrap_or_else(|| "r_init".into()),
                    point,
                    state: state.to_vec(),
                });
            }
        }
        Ok(())
    };

    let mut state = vec![0.0; 2 * n];
    state[n..].copy_from_slice(x0);
    for cycle in 0..cycles {
        check(cycle, None, &cert.r_init, &state)?;
        for (k, instr) in p.body().iter().enumerate() {
            instr.execute(&mut state);
            check(cycle, Some(k), &cert.points[k].r, &state)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::{annotate, AnnotatorOptions};
    use crate::program::{canonical_program, InitBox};

    fn reference_program() -> Program {
        let a = Matrix::from_rows(&[[0.0, 1.0], [-0.1, -0.2]]).unwrap();
        canonical_program(&a, InitBox::unit(2)).unwrap()
    }

    #[test]
    fn scalar_iteration() {
        let p = canonical_program(&Matrix::from_diag(&[0.5]), InitBox::unit(1)).unwrap();
        let t = run(&p, &[1.0], 2).unwrap();
        assert_eq!(t.states.len(), 1 + 2 * 3);
        assert_eq!(t.loop_head(1), &[1.0, 0.5]);
        assert_eq!(t.loop_head(2), &[0.5, 0.25]);
    }

    #[test]
    fn reference_one_cycle() {
        let t = run(&reference_program(), &[1.0, 1.0], 1).unwrap();
        let head = t.loop_head(1);
        assert_eq!(&head[..2], &[1.0, 1.0]);
        assert!((head[2] - 1.0).abs() < 1e-15);
        assert!((head[3] + 0.3).abs() < 1e-15);
    }

    #[test]
    fn origin_is_fixed() {
        let t = run(&reference_program(), &[0.0, 0.0], 5).unwrap();
        assert!(t.states.iter().all(|s| s.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn rejects_out_of_box_start() {
        assert!(run(&reference_program(), &[1.5, 0.0], 1).is_err());
        assert!(run(&reference_program(), &[0.0], 1).is_err());
    }

    #[test]
    fn sampling_starts_with_corners() {
        let p = reference_program();
        let xs = initial_states(&p, 10, 1);
        assert_eq!(xs.len(), 10);
        assert_eq!(&xs[..4], &[vec![1.0, 1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![-1.0, -1.0]]);
        assert_eq!(xs[4], vec![1.0, 0.0]);
        assert!(xs.iter().all(|x| p.init_box().contains(x)));
        assert_eq!(initial_states(&p, 50, 7), initial_states(&p, 50, 7));
    }

    #[test]
    fn empty_run() {
        let p = reference_program();
        let cert = annotate(&p, &AnnotatorOptions::default()).unwrap();
        let r = monte_carlo_soundness(&p, &cert, 0, 10, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.membership_checks, 0);
        assert!(r.first_violation.is_none());
    }

    #[test]
    fn finds_shrunk_invariant() {
        let p = reference_program();
        let mut cert = annotate(&p, &AnnotatorOptions::default()).unwrap();
        let k = 5;
        let delta = 1e-3 * (1.0 + cert.points[k].r.frobenius_norm());
        cert.points[k].r = &cert.points[k].r - &Matrix::identity(4).scale(delta);
        let r = monte_carlo_soundness(&p, &cert, 200, 3, 11).unwrap();
        assert!(r.violations > 0);
        assert_eq!(r.first_violation.unwrap().point, Some(k));
    }
}
