use super::{SdpError, SymMatrix, MAX_DIM};

pub const MAX_VARS: usize = 16;

/// Which side of zero a pencil must land on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `M(x) ≺ 0`, enforced with a verified margin.
    NegativeDefinite,
    /// `M(x) ⪰ 0`.
    PositiveSemidefinite,
}

/// Affine symmetric-matrix function `M(x) = M₀ + Σ xᵢ Mᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPencil {
    pub constant: SymMatrix,
    pub bases: Vec<(usize, SymMatrix)>,
    pub sense: Sense,
}

impl MatrixPencil {
    pub fn new(constant: SymMatrix, sense: Sense) -> Self {
        Self {
            constant,
            bases: Vec::new(),
            sense,
        }
    }

    pub fn negative_definite(constant: SymMatrix) -> Self {
        Self::new(constant, Sense::NegativeDefinite)
    }

    pub fn positive_semidefinite(constant: SymMatrix) -> Self {
        Self::new(constant, Sense::PositiveSemidefinite)
    }

    pub fn dim(&self) -> usize {
        self.constant.dim()
    }

    /// Adds `x[var] · basis`; repeated indices accumulate. Zero bases are
    /// dropped.
    pub fn with_term(mut self, var: usize, basis: SymMatrix) -> Self {
        self.add_term(var, basis);
        self
    }

    pub fn add_term(&mut self, var: usize, basis: SymMatrix) {
        assert_eq!(basis.dim(), self.dim(), "basis dimension mismatch");
        if basis.is_zero() {
            return;
        }
        if let Some((_, b)) = self.bases.iter_mut().find(|(v, _)| *v == var) {
            b.add_scaled(1.0, &basis);
        } else {
            self.bases.push((var, basis));
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> SymMatrix {
        let mut m = self.constant.clone();
        for (var, basis) in &self.bases {
            m.add_scaled(x[*var], basis);
        }
        m
    }

    /// Norm of the stacked coefficients `[M₀, M₁, …]`; fixed per pencil.
    pub fn coefficient_norm(&self) -> f64 {
        let mut sq = self.constant.frobenius_norm().powi(2);
        for (_, b) in &self.bases {
            sq += b.frobenius_norm().powi(2);
        }
        sq.sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            constant: self.constant.scaled(s),
            bases: self.bases.iter().map(|(v, b)| (*v, b.scaled(s))).collect(),
            sense: self.sense,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.bases.is_empty()
    }
}

/// `coeffsᵀ x ≥ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl LinearInequality {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() - self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub n_vars: usize,
    pub pencils: Vec<MatrixPencil>,
    pub linear_inequalities: Vec<LinearInequality>,
    /// Linear functional to minimise, if any.
    pub objective: Option<Vec<f64>>,
    pub var_bounds: Option<Vec<(f64, f64)>>,
}

impl SdpProblem {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            pencils: Vec::new(),
            linear_inequalities: Vec::new(),
            objective: None,
            var_bounds: None,
        }
    }

    pub fn pencil(mut self, p: MatrixPencil) -> Self {
        self.pencils.push(p);
        self
    }

    pub fn push_pencil(&mut self, p: MatrixPencil) -> usize {
        self.pencils.push(p);
        self.pencils.len() - 1
    }

    /// `coeffsᵀ x ≥ bound`.
    pub fn at_least(mut self, coeffs: Vec<f64>, bound: f64) -> Self {
        self.push_at_least(coeffs, bound);
        self
    }

    pub fn push_at_least(&mut self, coeffs: Vec<f64>, bound: f64) {
        self.linear_inequalities.push(LinearInequality { coeffs, bound });
    }

    /// `x[var] ≥ bound`.
    pub fn var_at_least(self, var: usize, bound: f64) -> Self {
        let mut c = vec![0.0; self.n_vars];
        c[var] = 1.0;
        self.at_least(c, bound)
    }

    pub fn minimize(mut self, objective: Vec<f64>) -> Self {
        self.objective = Some(objective);
        self
    }

    pub fn bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.var_bounds = Some(bounds);
        self
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.n_vars == 0 || self.n_vars > MAX_VARS {
            return Err(SdpError::TooManyVariables {
                n: self.n_vars,
                max: MAX_VARS,
            });
        }
        if self.pencils.is_empty() {
            return Err(SdpError::NoPencils);
        }
        for p in &self.pencils {
            if p.dim() == 0 || p.dim() > MAX_DIM {
                return Err(SdpError::DimensionTooLarge {
                    dim: p.dim(),
                    max: MAX_DIM,
                });
            }
            for (var, b) in &p.bases {
                if *var >= self.n_vars {
                    return Err(SdpError::IndexOutOfRange {
                        index: *var,
                        n_vars: self.n_vars,
                    });
                }
                if b.dim() != p.dim() {
                    return Err(SdpError::NotSquare);
                }
            }
        }
        for li in &self.linear_inequalities {
            if li.coeffs.len() != self.n_vars {
                return Err(SdpError::LengthMismatch {
                    expected: self.n_vars,
                    got: li.coeffs.len(),
                });
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.n_vars {
                return Err(SdpError::LengthMismatch {
                    expected: self.n_vars,
                    got: obj.len(),
                });
            }
        }
        if let Some(b) = &self.var_bounds {
            if b.len() != self.n_vars {
                return Err(SdpError::LengthMismatch {
                    expected: self.n_vars,
                    got: b.len(),
                });
            }
            if b.iter().any(|(lo, hi)| !(lo < hi)) {
                return Err(SdpError::EmptyBounds);
            }
        }
        Ok(())
    }

    /// Same problem with every pencil multiplied by `s`.
    pub fn scaled_pencils(&self, s: f64) -> Self {
        Self {
            pencils: self.pencils.iter().map(|p| p.scaled(s)).collect(),
            ..self.clone()
        }
    }
}
