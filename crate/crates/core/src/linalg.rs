//! Fixed-size 2×2 value types used by the plant model and the certificates.
//!
//! Everything here is dense, row-major and `Copy`. Larger blocks (the LMI
//! pencils) live in [`crate::sdp`].

use std::ops::{Add, Mul, Neg, Sub};

/// Column vector in the error plane, `(eps1, eps2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2(pub [f64; 2]);

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self([x, y])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn dot(&self, other: &Vec2) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2([-self.0[0], -self.0[1]])
    }
}

/// General real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        Vec2([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// Eigenvalues as complex pairs `(re, im)` from the characteristic
    /// polynomial `s² − tr·s + det`.
    pub fn eigenvalues(&self) -> [(f64, f64); 2] {
        let tr = self.trace();
        let det = self.det();
        let disc = tr * tr / 4.0 - det;
        if disc >= 0.0 {
            let r = disc.sqrt();
            [(tr / 2.0 - r, 0.0), (tr / 2.0 + r, 0.0)]
        } else {
            let i = (-disc).sqrt();
            [(tr / 2.0, -i), (tr / 2.0, i)]
        }
    }

    pub fn max_real_eigenvalue(&self) -> f64 {
        let [a, b] = self.eigenvalues();
        a.0.max(b.0)
    }

    /// Strict Hurwitz test for a 2×2 matrix: trace < 0 and det > 0.
    pub fn is_hurwitz(&self) -> bool {
        self.trace() < 0.0 && self.det() > 0.0
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

/// Symmetric 2×2 matrix `[[a, b], [b, c]]`.
///
/// Carries the Lyapunov matrices of the certificates and the shape of the
/// ellipses `{ε : εᵀ P ε ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymMat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SymMat2 {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 1.0)
    }

    pub fn scaled_identity(s: f64) -> Self {
        Self::new(s, 0.0, s)
    }

    pub fn as_mat2(&self) -> Mat2 {
        Mat2::new(self.a, self.b, self.b, self.c)
    }

    pub fn quad(&self, v: &Vec2) -> f64 {
        let [x, y] = v.0;
        self.a * x * x + 2.0 * self.b * x * y + self.c * y * y
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        self.as_mat2().apply(v)
    }

    /// Eigenvalues in ascending order, closed form.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a + self.c);
        let half = 0.5 * (self.a - self.c);
        let r = half.hypot(self.b);
        [mean - r, mean + r]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[1]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.a * self.c - self.b * self.b > 0.0
    }

    /// `k`-th of `n` points on the boundary `{p : pᵀ P p = 1}`, parametrised
    /// through the Cholesky factor `P = L Lᵀ`. Requires `P ≻ 0`.
    pub fn ellipse_point(&self, angle: f64) -> Vec2 {
        // L = [[l11, 0], [l21, l22]], p = L⁻ᵀ (cos, sin)
        let l11 = self.a.sqrt();
        let l21 = self.b / l11;
        let l22 = (self.c - l21 * l21).sqrt();
        let (s, c) = angle.sin_cos();
        let y = s / l22;
        let x = (c - l21 * y) / l11;
        Vec2::new(x, y)
    }

    /// `n` equally spaced (in angle) boundary points of the ellipse.
    pub fn ellipse_boundary(&self, n: usize) -> Vec<Vec2> {
        (0..n)
            .map(|i| self.ellipse_point(std::f64::consts::TAU * i as f64 / n as f64))
            .collect()
    }

    /// Largest semi-axis `1/sqrt(λ_min)` of `{εᵀ P ε ≤ 1}`.
    pub fn major_semi_axis(&self) -> f64 {
        1.0 / self.min_eigenvalue().sqrt()
    }

    /// Smallest semi-axis `1/sqrt(λ_max)`.
    pub fn minor_semi_axis(&self) -> f64 {
        1.0 / self.max_eigenvalue().sqrt()
    }
}

impl Sub for SymMat2 {
    type Output = SymMat2;
    fn sub(self, rhs: SymMat2) -> SymMat2 {
        SymMat2::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c)
    }
}

impl Add for SymMat2 {
    type Output = SymMat2;
    fn add(self, rhs: SymMat2) -> SymMat2 {
        SymMat2::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_table_matrix() {
        let a = Mat2::new(-1.0, -2.0, 1.0, 0.0);
        let [l1, l2] = a.eigenvalues();
        assert!((l1.0 + 0.5).abs() < 1e-15 && (l2.0 + 0.5).abs() < 1e-15);
        assert!((l2.1 - 7f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(a.is_hurwitz());
    }

    #[test]
    fn ellipse_points_lie_on_boundary() {
        let p = SymMat2::new(2.0, 0.7, 0.5);
        for pt in p.ellipse_boundary(64) {
            assert!((p.quad(&pt) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn semi_axes() {
        let p = SymMat2::new(4.0, 0.0, 0.25);
        assert!((p.major_semi_axis() - 2.0).abs() < 1e-15);
        assert!((p.minor_semi_axis() - 0.5).abs() < 1e-15);
    }
}
