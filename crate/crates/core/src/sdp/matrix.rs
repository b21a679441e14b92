use super::SdpError;

/// Dense symmetric matrix stored as a full row-major square.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds from `f(i, j)`, evaluated on the upper triangle and mirrored.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrised `(M + Mᵀ)/2` of a square row-major array.
    pub fn symmetrized(rows: &[Vec<f64>]) -> Result<Self, SdpError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(SdpError::NotSquare);
        }
        Ok(Self::from_fn(dim, |i, j| 0.5 * (rows[i][j] + rows[j][i])))
    }

    /// Exact constructor: rejects inputs that are not symmetric to a tight
    /// relative tolerance.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SdpError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(SdpError::NotSquare);
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
            .max(1.0);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (rows[i][j] - rows[j][i]).abs() > 1e-12 * scale {
                    return Err(SdpError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Self::symmetrized(rows)
    }

    /// Outer product `u uᵀ`.
    pub fn outer(u: &[f64]) -> Self {
        Self::from_fn(u.len(), |i, j| u[i] * u[j])
    }

    /// Symmetric part of `u vᵀ + v uᵀ`.
    pub fn sym_outer(u: &[f64], v: &[f64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j] + v[i] * u[j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn add_scaled(&mut self, s: f64, other: &SymMatrix) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn mat_vec(&self, u: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * u[j]).sum())
            .collect()
    }

    pub fn quad_form(&self, u: &[f64]) -> f64 {
        self.mat_vec(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// `[[a, bᵀ], [b, c]]`-style block embedding: places `block` at offset
/// `(r0, r0)` inside a zero matrix of size `dim`.
pub fn embed(dim: usize, r0: usize, block: &SymMatrix) -> SymMatrix {
    let mut out = SymMatrix::zeros(dim);
    for i in 0..block.dim() {
        for j in i..block.dim() {
            out.set(r0 + i, r0 + j, block.get(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetry() {
        let rows = vec![vec![1.0, 2.0], vec![2.5, 1.0]];
        assert!(matches!(
            SymMatrix::from_rows(&rows),
            Err(SdpError::NotSymmetric { row: 0, col: 1 })
        ));
        let sym = SymMatrix::symmetrized(&rows).unwrap();
        assert_eq!(sym.get(0, 1), 2.25);
        assert_eq!(sym.get(1, 0), 2.25);
    }

    #[test]
    fn quad_form_of_outer_product() {
        let u = [1.0, -2.0, 0.5];
        let m = SymMatrix::outer(&u);
        let v = [0.3, 0.1, -1.0];
        let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!((m.quad_form(&v) - dot * dot).abs() < 1e-15);
    }
}
