#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use ellipcert::Matrix;
use rand::Rng;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn ellipcert<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_ellipcert"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    pub fn write_matrix(&self, name: &str, m: &Matrix) -> PathBuf {
        self.write(name, &serde_json::to_string(&m.to_rows()).unwrap())
    }

    pub fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.path(name)).unwrap()
    }

    /// gen + annotate; returns the annotate exit code.
    pub fn certify(&self, a: &Matrix, extra: &[&str]) -> Output {
        let a_file = self.write_matrix("A.json", a);
        let gen = ellipcert(&[
            "gen".as_ref(),
            "--input".as_ref(),
            a_file.as_os_str(),
            "--output".as_ref(),
            self.path("prog.json").as_os_str(),
        ]);
        assert_eq!(gen.code, 0, "gen failed: {}", gen.stderr);
        let mut args = vec![
            "annotate".to_string(),
            "--input".into(),
            p(&self.path("prog.json")),
            "--output".into(),
            p(&self.path("cert.json")),
        ];
        args.extend(extra.iter().map(|s| s.to_string()));
        ellipcert(&args)
    }
}

pub fn p(path: &Path) -> String {
    path.to_str().unwrap().to_string()
}

pub fn reference_a() -> Matrix {
    Matrix::from_rows(&[[0.0, 1.0], [-0.1, -0.2]]).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    Matrix::new(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn spectral_norm(a: &Matrix) -> f64 {
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

/// Random matrix rescaled by power iteration to spectral norm in [0.3, 0.9].
pub fn random_stable(rng: &mut impl Rng, n: usize) -> Matrix {
    let a = random_matrix(rng, n);
    let target = rng.gen_range(0.3..0.9);
    a.scale(target / spectral_norm(&a))
}

pub fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("bad json ({e}): {text}"))
}
