//! Pieces shared by the three certificate families: the 2×2 Lyapunov
//! variable embedded in an SDP, the level bisection used for η, and the
//! outcome of a sampling replay.

use crate::linalg::SymMat2;
use crate::sdp::{solve_with, SdpProblem, SdpSolution, SolverOptions, SymMatrix};

/// Basis of the three free entries `(p11, p12, p22)` of a symmetric 2×2
/// matrix.
pub(crate) fn sym2_basis(k: usize) -> [[f64; 2]; 2] {
    match k {
        0 => [[1.0, 0.0], [0.0, 0.0]],
        1 => [[0.0, 1.0], [1.0, 0.0]],
        2 => [[0.0, 0.0], [0.0, 1.0]],
        _ => unreachable!("symmetric 2x2 matrices have three entries"),
    }
}

/// `P` as a 2×2 [`SymMatrix`] basis element.
pub(crate) fn sym2_basis_matrix(k: usize) -> SymMatrix {
    let e = sym2_basis(k);
    SymMatrix::from_fn(2, |i, j| e[i][j])
}

pub(crate) fn sym2_from(x: &[f64]) -> SymMat2 {
    SymMat2::new(x[0], x[1], x[2])
}

pub(crate) fn sym2_to_matrix(p: &SymMat2) -> SymMatrix {
    SymMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => p.a,
        (1, 1) => p.c,
        _ => p.b,
    })
}

/// Feasibility oracle for a one-parameter family of SDPs whose feasible set
/// shrinks as the level moves away from `feasible` toward `infeasible`.
/// Returns the last feasible level and its solution.
pub(crate) fn bisect_level(
    mut feasible: (f64, SdpSolution),
    mut infeasible: f64,
    steps: usize,
    rel_tol: f64,
    mut build: impl FnMut(f64) -> SdpProblem,
) -> (f64, SdpSolution) {
    let opts = SolverOptions::default();
    for _ in 0..steps {
        if (infeasible - feasible.0).abs() <= rel_tol * feasible.0.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (feasible.0 + infeasible);
        let problem = build(mid);
        let r = solve_with(&problem, &opts, Some(&feasible.1.x));
        match r {
            Ok(sol) if sol.is_feasible() => feasible = (mid, sol),
            _ => infeasible = mid,
        }
    }
    feasible
}

/// Outcome of checking a certificate's conclusion on sampled states
/// against the true nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayReport {
    pub samples: usize,
    pub failures: usize,
    /// Largest value of the checked quantity (should be negative, or
    /// non-positive for inclusion checks).
    pub worst: f64,
}

impl ReplayReport {
    pub(crate) fn new() -> Self {
        Self {
            samples: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    pub(crate) fn record(&mut self, value: f64, ok: bool) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
        }
        self.worst = self.worst.max(value);
    }

    pub fn passed(&self) -> bool {
        self.samples > 0 && self.failures == 0
    }
}
