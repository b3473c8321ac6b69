//! Ellipsoidal invariant certificates for linear control-software loops.
//!
//! A control loop `x ← A·x` written as a straight-line program of copy,
//! reset, and multiply-accumulate instructions is annotated with one
//! centered ellipsoid per program point. The [`annotator`] builds the
//! annotation from a Lyapunov solution of the net loop map, the
//! [`checker`] re-verifies it instruction by instruction with PSD tests
//! alone, and [`simulate`] runs the program concretely as an empirical
//! oracle.

pub mod annotator;
pub mod checker;
pub mod ellipsoid;
pub mod error;
pub mod matrixkit;
pub mod program;
pub mod simulate;

pub use annotator::{annotate, AnnotatorOptions, Certificate};
pub use checker::{check_certificate, Verdict};
pub use ellipsoid::Ellipsoid;
pub use error::{Error, Result};
pub use matrixkit::Matrix;
pub use program::{canonical_program, InitBox, Instruction, Program};
