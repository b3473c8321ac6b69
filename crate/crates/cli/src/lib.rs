//! Command-line front end: `gen`, `annotate`, `check`, `bounds`, `simulate`.
//!
//! Exit codes: 0 certified, 1 refuted, 2 operational error (bad input,
//! I/O, unstable system).

mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ellipcert::annotator::{annotate, AnnotatorOptions, Certificate};
use ellipcert::checker::check_certificate;
use ellipcert::ellipsoid::bounding_ball;
use ellipcert::matrixkit::{Matrix, PSD_TOL};
use ellipcert::program::{canonical_program, InitBox, Program};
use ellipcert::simulate::monte_carlo_soundness;

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ellipcert", version, about = "Ellipsoidal invariant certifier for linear control loops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the canonical program for a state matrix.
    Gen(GenArgs),
    /// Annotate a program with ellipsoidal invariants.
    Annotate(AnnotateArgs),
    /// Independently check a certificate against its program.
    Check(CheckArgs),
    /// Report per-variable bounds and the bounding ball of a certificate.
    Bounds(BoundsArgs),
    /// Run the program from sampled initial states and test every invariant.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// JSON file holding the state matrix as an array of rows.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated bounds on |x_i|; defaults to all ones.
    #[arg(long, value_delimiter = ',')]
    pub init_box: Option<Vec<f64>>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnnotateArgs {
    /// Program file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub safety_factor: f64,
    #[arg(long, default_value_t = PSD_TOL)]
    pub tol: f64,
    /// JSON file with a symmetric positive definite Lyapunov weight (2n x 2n).
    #[arg(long)]
    pub q: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Program file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub certificate: PathBuf,
    #[arg(long, default_value_t = PSD_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Certificate file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Program file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub certificate: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 50)]
    pub cycles: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Operational failure carrying its message; always exit code 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_CERTIFIED };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Gen(a) => cmd_gen(&a),
        Command::Annotate(a) => cmd_annotate(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_matrix(path: &Path) -> Result<Matrix, Failure> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure(format!("{}: expected an array of rows: {e}", path.display())))?;
    Matrix::from_rows(&rows).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_program(path: &Path) -> Result<Program, Failure> {
    Program::from_json(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_certificate(path: &Path) -> Result<Certificate, Failure> {
    Certificate::from_json(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Failure(format!("--tol must be finite and non-negative, got {tol}")))
    }
}

pub fn cmd_gen(args: &GenArgs) -> CmdResult {
    let a = read_matrix(&args.input)?;
    if !a.is_square() {
        return Err(Failure(format!(
            "state matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let init_box = match &args.init_box {
        Some(b) => InitBox::new(b.clone())?,
        None => InitBox::unit(a.rows()),
    };
    let program = canonical_program(&a, init_box)?;
    emit(args.output.as_deref(), &program.to_json())?;
    if args.output.is_some() {
        println!("wrote {} instructions for n = {}", program.body().len(), program.n());
    }
    Ok(EXIT_CERTIFIED)
}

pub fn cmd_annotate(args: &AnnotateArgs) -> CmdResult {
    check_tol(args.tol)?;
    let program = read_program(&args.input)?;
    let q = args.q.as_deref().map(read_matrix).transpose()?;
    let opts = AnnotatorOptions {
        q,
        safety_factor: args.safety_factor,
        tol: args.tol,
    };
    let cert = annotate(&program, &opts)?;
    let report = match args.format {
        Format::Text => report::annotate_text(&cert),
        Format::Json => report::annotate_json(&cert),
    };
    match &args.output {
        Some(path) => {
            emit(Some(path), &cert.to_json())?;
            println!("{report}");
        }
        None => {
            println!("{}", cert.to_json());
            eprintln!("{report}");
        }
    }
    Ok(if cert.certified() { EXIT_CERTIFIED } else { EXIT_REFUTED })
}

pub fn cmd_check(args: &CheckArgs) -> CmdResult {
    check_tol(args.tol)?;
    let program = read_program(&args.input)?;
    let cert = read_certificate(&args.certificate)?;
    if cert.n != program.n() {
        return Err(Failure(format!(
            "certificate is for n = {}, program has n = {}",
            cert.n,
            program.n()
        )));
    }
    let verdict = check_certificate(&program, &cert, args.tol)?;
    let out = match args.format {
        Format::Text => report::verdict_text(&program, &verdict),
        Format::Json => report::verdict_json(&verdict),
    };
    println!("{out}");
    Ok(if verdict.certified { EXIT_CERTIFIED } else { EXIT_REFUTED })
}

/// Per-variable bound over every invariant, and the global ball radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub names: Vec<String>,
    pub per_variable: Vec<f64>,
    pub ball_radius: f64,
}

pub fn certificate_bounds(cert: &Certificate) -> Result<Bounds, Failure> {
    let ellipsoids = cert.ellipsoids()?;
    let dim = 2 * cert.n;
    let mut per_variable = vec![0.0f64; dim];
    for e in &ellipsoids {
        for (i, b) in per_variable.iter_mut().enumerate() {
            *b = b.max(e.variable_bound(i)?);
        }
    }
    Ok(Bounds {
        names: report::variable_names(cert.n),
        per_variable,
        ball_radius: bounding_ball(&ellipsoids)?,
    })
}

pub fn cmd_bounds(args: &BoundsArgs) -> CmdResult {
    let cert = read_certificate(&args.input)?;
    let bounds = certificate_bounds(&cert)?;
    let out = match args.format {
        Format::Text => report::bounds_text(&bounds),
        Format::Json => report::bounds_json(&bounds),
    };
    println!("{out}");
    Ok(EXIT_CERTIFIED)
}

pub fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let program = read_program(&args.input)?;
    let cert = read_certificate(&args.certificate)?;
    let r = monte_carlo_soundness(&program, &cert, args.trials, args.cycles, args.seed)?;
    let out = match args.format {
        Format::Text => report::soundness_text(&r),
        Format::Json => report::soundness_json(&r),
    };
    println!("{out}");
    Ok(if r.violations == 0 { EXIT_CERTIFIED } else { EXIT_REFUTED })
}
