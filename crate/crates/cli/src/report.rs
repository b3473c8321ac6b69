use std::fmt::Write;

use ellipcert::annotator::Certificate;
use ellipcert::checker::Verdict;
use ellipcert::matrixkit::{max_eigenvalue, min_eigenvalue};
use ellipcert::program::Program;
use ellipcert::simulate::SoundnessReport;
use serde_json::json;

use crate::Bounds;

pub fn variable_names(n: usize) -> Vec<String> {
    (1..=n)
        .map(|i| format!("y{i}"))
        .chain((1..=n).map(|i| format!("x{i}")))
        .collect()
}

fn g(v: f64) -> String {
    format!("{v:.5e}")
}

pub fn annotate_text(cert: &Certificate) -> String {
    let mut s = String::new();
    let verdict = if cert.certified() { "CERTIFIED" } else { "REFUTED" };
    writeln!(s, "{verdict}").unwrap();
    writeln!(s, "  alpha          {}", g(cert.alpha)).unwrap();
    writeln!(s, "  sigma_max      {}", g(cert.sigma_max)).unwrap();
    writeln!(s, "  closure margin {}  ({})", g(cert.closure_margin), ok(cert.closure_ok)).unwrap();
    writeln!(s, "  init box       {}", ok(cert.init_box_ok)).unwrap();
    writeln!(s, "  r_init:").unwrap();
    for line in cert.r_init.to_string().lines() {
        writeln!(s, "    {line}").unwrap();
    }
    writeln!(s, "  {:<14} {:>13} {:>13} {:>13}", "point", "trace", "lambda_min", "lambda_max").unwrap();
    for p in &cert.points {
        let tr: f64 = p.r.diagonal().iter().sum();
        let lo = min_eigenvalue(&p.r).unwrap_or(f64::NAN);
        let hi = max_eigenvalue(&p.r).unwrap_or(f64::NAN);
        writeln!(s, "  {:<14} {:>13} {:>13} {:>13}", p.label, g(tr), g(lo), g(hi)).unwrap();
    }
    s.trim_end().to_string()
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

pub fn annotate_json(cert: &Certificate) -> String {
    json!({
        "certified": cert.certified(),
        "alpha": cert.alpha,
        "sigma_max": cert.sigma_max,
        "closure_ok": cert.closure_ok,
        "closure_margin": cert.closure_margin,
        "init_box_ok": cert.init_box_ok,
        "points": cert.points.iter().map(|p| p.label.clone()).collect::<Vec<_>>(),
    })
    .to_string()
}

pub fn verdict_text(program: &Program, v: &Verdict) -> String {
    let mut s = String::new();
    if v.certified {
        write!(
            s,
            "CERTIFIED: init box, {} steps and loop closure verified",
            program.body().len()
        )
        .unwrap();
        return s;
    }
    writeln!(s, "REFUTED: {} failed obligation(s)", v.failures.len()).unwrap();
    for f in &v.failures {
        let instr = f
            .point
            .filter(|_| f.kind == ellipcert::checker::FailureKind::StepContainment)
            .map(|k| format!("  [{}]", program.body()[k]))
            .unwrap_or_default();
        writeln!(s, "  {:<16} {:<17} witness {}{instr}", f.label, f.kind.to_string(), g(f.witness)).unwrap();
    }
    s.trim_end().to_string()
}

pub fn verdict_json(v: &Verdict) -> String {
    json!({
        "certified": v.certified,
        "failures": v.failures.iter().map(|f| json!({
            "label": f.label,
            "point": f.point,
            "kind": f.kind.to_string(),
            "witness": f.witness,
        })).collect::<Vec<_>>(),
    })
    .to_string()
}

pub fn bounds_text(b: &Bounds) -> String {
    let mut s = String::new();
    for (name, v) in b.names.iter().zip(&b.per_variable) {
        writeln!(s, "|{name}| <= {}", g(*v)).unwrap();
    }
    write!(s, "bounding ball radius {}", g(b.ball_radius)).unwrap();
    s
}

pub fn bounds_json(b: &Bounds) -> String {
    json!({
        "variables": b.names.iter().zip(&b.per_variable)
            .map(|(n, v)| json!({"name": n, "bound": v}))
            .collect::<Vec<_>>(),
        "ball_radius": b.ball_radius,
    })
    .to_string()
}

pub fn soundness_text(r: &SoundnessReport) -> String {
    let mut s = String::new();
    write!(
        s,
        "{} trials x {} cycles: {} membership checks, {} violation(s)",
        r.trials, r.cycles, r.membership_checks, r.violations
    )
    .unwrap();
    if let Some(w) = &r.first_violation {
        let state: Vec<String> = w.state.iter().map(|v| g(*v)).collect();
        write!(
            s,
            "\nfirst violation: trial {} cycle {} at {}\n  state [{}]",
            w.trial,
            w.cycle,
            w.label,
            state.join(", ")
        )
        .unwrap();
    }
    s
}

pub fn soundness_json(r: &SoundnessReport) -> String {
    json!({
        "trials": r.trials,
        "cycles": r.cycles,
        "membership_checks": r.membership_checks,
        "violations": r.violations,
        "first_violation": r.first_violation.as_ref().map(|w| json!({
            "trial": w.trial,
            "cycle": w.cycle,
            "label": w.label,
            "point": w.point,
            "state": w.state,
        })),
        "max_abs": r.max_abs,
    })
    .to_string()
}
