//! Straight-line loop bodies over the joint state `(y₁..yₙ, x₁..xₙ)`.
//!
//! One outer-loop iteration is fully unrolled. Every instruction is a
//! linear map of the joint state, so its semantics is a `2n×2n` matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrixkit::Matrix;

/// Indices are 1-based, as in the program text.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Instruction {
    /// `y[i] := x[i]`
    CopyToY(usize),
    /// `x[i] := 0`
    ResetX(usize),
    /// `x[i] := x[i] + a·y[j]`
    Mac(usize, usize, f64),
}

impl Instruction {
    fn indices(&self) -> (usize, Option<usize>) {
        match *self {
            Instruction::CopyToY(i) | Instruction::ResetX(i) => (i, None),
            Instruction::Mac(i, j, _) => (i, Some(j)),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let (i, j) = self.indices();
        let in_range = |k: usize| (1..=n).contains(&k);
        if !in_range(i) || j.is_some_and(|j| !in_range(j)) {
            return Err(Error::invalid(format!(
                "instruction {self} has an index outside 1..={n}"
            )));
        }
        if let Instruction::Mac(_, _, a) = self {
            if !a.is_finite() {
                return Err(Error::invalid(format!("instruction {self} has a non-finite coefficient")));
            }
        }
        Ok(())
    }

    /// Runs the assignment on a joint state laid out as `(y, x)`.
    pub fn execute(&self, state: &mut [f64]) {
        let n = state.len() / 2;
        match *self {
            Instruction::CopyToY(i) => state[i - 1] = state[n + i - 1],
            Instruction::ResetX(i) => state[n + i - 1] = 0.0,
            Instruction::Mac(i, j, a) => state[n + i - 1] += a * state[j - 1],
        }
    }

    /// Short stable tag, e.g. `copy(1)` or `mac(2,1)`.
    pub fn mnemonic(&self) -> String {
        match *self {
            Instruction::CopyToY(i) => format!("copy({i})"),
            Instruction::ResetX(i) => format!("reset({i})"),
            Instruction::Mac(i, j, _) => format!("mac({i},{j})"),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Instruction::CopyToY(i) => write!(f, "y[{i}] := x[{i}]"),
            Instruction::ResetX(i) => write!(f, "x[{i}] := 0"),
            Instruction::Mac(i, j, a) => write!(f, "x[{i}] := x[{i}] + {a}*y[{j}]"),
        }
    }
}

/// Initial condition: `|x_i| ≤ bound_i` and `y = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitBox {
    bounds: Vec<f64>,
}

impl InitBox {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if let Some(k) = bounds.iter().position(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::invalid(format!(
                "init box bound {} for x[{}] must be finite and non-negative",
                bounds[k],
                k + 1
            )));
        }
        Ok(InitBox { bounds })
    }

    /// `|x_i| ≤ 1` for every coordinate.
    pub fn unit(n: usize) -> Self {
        InitBox {
            bounds: vec![1.0; n],
        }
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Squared radius of the smallest centered ball holding the box.
    pub fn squared_radius(&self) -> f64 {
        self.bounds.iter().map(|b| b * b).sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len() && x.iter().zip(&self.bounds).all(|(v, b)| v.abs() <= *b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    n: usize,
    a: Matrix,
    init_box: InitBox,
    body: Vec<Instruction>,
}

impl Program {
    pub fn new(a: Matrix, init_box: InitBox, body: Vec<Instruction>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid(format!(
                "state matrix must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if init_box.len() != n {
            return Err(Error::invalid(format!(
                "init box has {} bounds for dimension {n}",
                init_box.len()
            )));
        }
        for instr in &body {
            instr.validate(n)?;
        }
        Ok(Program {
            n,
            a,
            init_box,
            body,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn init_box(&self) -> &InitBox {
        &self.init_box
    }

    pub fn body(&self) -> &[Instruction] {
        &self.body
    }

    /// Label of the program point after instruction `k` (0-based).
    pub fn point_label(&self, k: usize) -> String {
        format!("{}:{}", k + 1, self.body[k].mnemonic())
    }

    pub fn to_json(&self) -> String {
        let doc = ProgramDoc {
            n: self.n,
            a: self.a.to_rows(),
            init_box: self.init_box.bounds.clone(),
            body: self.body.iter().map(InstrDoc::from).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("program serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProgramDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        doc.into_program()
    }
}

/// Copies and resets for every coordinate, then every MAC in row-major
/// order: `S₁ P₁ … Sₙ Pₙ T₁₁ T₁₂ … Tₙₙ`.
pub fn canonical_program(a: &Matrix, init_box: InitBox) -> Result<Program> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "state matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut body = Vec::with_capacity(2 * n + n * n);
    for i in 1..=n {
        body.push(Instruction::CopyToY(i));
        body.push(Instruction::ResetX(i));
    }
    for i in 1..=n {
        for j in 1..=n {
            body.push(Instruction::Mac(i, j, a[(i - 1, j - 1)]));
        }
    }
    Program::new(a.clone(), init_box, body)
}

/// The `2n×2n` matrix of `instr` in the `(y, x)` layout.
pub fn instruction_matrix(instr: &Instruction, n: usize) -> Result<Matrix> {
    instr.validate(n)?;
    let mut t = Matrix::identity(2 * n);
    match *instr {
        Instruction::CopyToY(i) => {
            t[(i - 1, i - 1)] = 0.0;
            t[(i - 1, n + i - 1)] = 1.0;
        }
        Instruction::ResetX(i) => t[(n + i - 1, n + i - 1)] = 0.0,
        Instruction::Mac(i, j, a) => t[(n + i - 1, j - 1)] = a,
    }
    Ok(t)
}

/// Product of the body's instruction matrices, last instruction leftmost.
pub fn loop_matrix(p: &Program) -> Matrix {
    p.body.iter().fold(Matrix::identity(2 * p.n), |acc, instr| {
        let t = instruction_matrix(instr, p.n).expect("validated at construction");
        &t * &acc
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramDoc {
    n: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    init_box: Vec<f64>,
    body: Vec<InstrDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstrDoc {
    op: String,
    i: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    a: Option<f64>,
}

impl From<&Instruction> for InstrDoc {
    fn from(instr: &Instruction) -> Self {
        let (op, i, j, a) = match *instr {
            Instruction::CopyToY(i) => ("copy", i, None, None),
            Instruction::ResetX(i) => ("reset", i, None, None),
            Instruction::Mac(i, j, a) => ("mac", i, Some(j), Some(a)),
        };
        InstrDoc {
            op: op.into(),
            i,
            j,
            a,
        }
    }
}

impl InstrDoc {
    fn into_instruction(self, n: usize, at: &str) -> Result<Instruction> {
        let instr = match (self.op.as_str(), self.j, self.a) {
            ("copy", None, None) => Instruction::CopyToY(self.i),
            ("reset", None, None) => Instruction::ResetX(self.i),
            ("mac", Some(j), Some(a)) => Instruction::Mac(self.i, j, a),
            ("copy" | "reset", _, _) => {
                return Err(Error::parse(at, format!("op \"{}\" takes only field i", self.op)))
            }
            ("mac", _, _) => return Err(Error::parse(at, "op \"mac\" needs fields i, j and a")),
            (other, _, _) => {
                return Err(Error::parse(
                    at,
                    format!("unknown op \"{other}\" (expected copy, reset or mac)"),
                ))
            }
        };
        instr.validate(n).map_err(|e| Error::parse(at, e.to_string()))?;
        Ok(instr)
    }
}

impl ProgramDoc {
    fn into_program(self) -> Result<Program> {
        let n = self.n;
        if n == 0 {
            return Err(Error::parse("n", "dimension must be at least 1"));
        }
        if self.a.len() != n || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::parse("A", format!("expected {n} rows of {n} entries")));
        }
        let a = Matrix::from_rows(&self.a).map_err(|e| Error::parse("A", e.to_string()))?;
        if self.init_box.len() != n {
            return Err(Error::parse(
                "init_box",
                format!("expected {n} bounds, got {}", self.init_box.len()),
            ));
        }
        let init_box =
            InitBox::new(self.init_box).map_err(|e| Error::parse("init_box", e.to_string()))?;
        let body = self
            .body
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.into_instruction(n, &format!("body[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        Program::new(a, init_box, body)
    }
}
