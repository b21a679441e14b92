//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! This is the verification primitive: every certificate accepted anywhere
//! in the crate is re-checked through these eigenvalues, never through the
//! barrier solver's own factorizations.

use super::{SdpError, SymMatrix};

pub const MAX_DIM: usize = 6;

const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order together with unit eigenvectors
/// (`vectors[k]` belongs to `values[k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Sorted eigenvalues of a symmetric matrix of dimension at most 6.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>, SdpError> {
    Ok(sym_eigen(m)?.values)
}

pub fn sym_eigen(m: &SymMatrix) -> Result<SymEigen, SdpError> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(SdpError::DimensionTooLarge { dim: n, max: MAX_DIM });
    }
    let mut a: Vec<Vec<f64>> = m.rows();
    let scale = m.frobenius_norm();
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[i][j] - a[j][i]).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(SdpError::NotSymmetric { row: i, col: j });
            }
        }
    }
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let tol = OFF_DIAGONAL_TOL * scale;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    Ok(SymEigen {
        values: order.iter().map(|&i| a[i][i]).collect(),
        vectors: order
            .iter()
            .map(|&i| v.iter().map(|row| row[i]).collect())
            .collect(),
    })
}

pub fn max_eigenvalue(m: &SymMatrix) -> Result<f64, SdpError> {
    Ok(*sym_eigenvalues(m)?.last().unwrap_or(&0.0))
}

pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64, SdpError> {
    Ok(*sym_eigenvalues(m)?.first().unwrap_or(&0.0))
}
