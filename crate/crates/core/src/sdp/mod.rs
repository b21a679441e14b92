//! Small dense semidefinite feasibility core.
//!
//! Problems are affine matrix pencils in at most 16 scalar variables with
//! blocks of size at most 6. Solutions are always re-verified with an
//! independent Jacobi eigensolver before being reported feasible.

mod eigen;
mod matrix;
mod problem;
mod solver;

use thiserror::Error;

pub use eigen::{max_eigenvalue, min_eigenvalue, sym_eigen, sym_eigenvalues, SymEigen, MAX_DIM};
pub use matrix::{embed, SymMatrix};
pub use problem::{LinearInequality, MatrixPencil, SdpProblem, Sense, MAX_VARS};
pub use solver::{
    accepts, solve, solve_with, verify, worst_direction, InfeasibleReason, SdpSolution, SolverOptions, Status,
    LINEAR_TOL, MARGIN_FLOOR, PSD_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("block dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("{n} variables requested, supported range is 1..={max}")]
    TooManyVariables { n: usize, max: usize },
    #[error("variable index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("problem has no matrix pencils")]
    NoPencils,
    #[error("variable bounds must satisfy lo < hi")]
    EmptyBounds,
}
