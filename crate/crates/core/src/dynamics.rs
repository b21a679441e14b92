//! State-space and error-coordinate models of the forced mass–spring system.
//!
//! Physical state `(v, z)` with `z = x + ℓ₀ − v_ref t`, error state
//! `ε = (v − v_ref, z − z_∞)`, and `ε̇ ∈ A ε + B φ(ε₁)`.

use crate::error::{Error, Result};
use crate::friction::{Interval, PhysicalParams};
use crate::linalg::{Mat2, Vec2};

/// `A`, `B`, `C` of the error dynamics and the linearisation `A0 = A + BΓC`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemMatrices {
    pub a: Mat2,
    pub b: Vec2,
    /// Output row `C = [1 0]`.
    pub c: Vec2,
    pub a0: Mat2,
    /// Slope Γ used to build `a0`.
    pub gamma: f64,
}

impl SystemMatrices {
    pub fn new(p: &PhysicalParams, v_ref: f64) -> Self {
        let a = error_matrix(p);
        let b = Vec2::new(-1.0 / p.m, 0.0);
        let c = Vec2::new(1.0, 0.0);
        let gamma = p.gamma(v_ref);
        // B Γ C only touches the (0, 0) entry.
        let mut a0 = a;
        a0.0[0][0] += b.x() * gamma * c.x();
        Self { a, b, c, a0, gamma }
    }

    /// Scalar `C B`.
    pub fn cb(&self) -> f64 {
        self.c.dot(&self.b)
    }
}

/// Error-dynamics matrix `A = [[−k_v/m, −k/m], [1, 0]]`; independent of `v_ref`.
pub fn error_matrix(p: &PhysicalParams) -> Mat2 {
    Mat2::new(-p.k_v / p.m, -p.k / p.m, 1.0, 0.0)
}

/// The unique equilibrium of the physical system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub v_inf: f64,
    pub z_inf: f64,
}

pub fn equilibrium(p: &PhysicalParams, v_ref: f64) -> Result<Equilibrium> {
    if !(v_ref > 0.0) {
        return Err(Error::Domain {
            name: "v_ref",
            value: v_ref,
            reason: "reference speed must be strictly positive",
        });
    }
    let f = p.f_nl(v_ref)? + p.k_v * v_ref;
    Ok(Equilibrium {
        v_inf: v_ref,
        z_inf: -f / p.k,
    })
}

/// Error coordinates `ε = (ε₁, ε₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorState {
    pub eps1: f64,
    pub eps2: f64,
}

impl ErrorState {
    pub fn new(eps1: f64, eps2: f64) -> Self {
        Self { eps1, eps2 }
    }

    pub fn from_physical(eq: &Equilibrium, v: f64, z: f64) -> Self {
        Self::new(v - eq.v_inf, z - eq.z_inf)
    }

    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(self.eps1, self.eps2)
    }

    pub fn norm(&self) -> f64 {
        self.eps1.hypot(self.eps2)
    }
}

/// Right-hand side of a differential inclusion in the plane where only the
/// first component can be set-valued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rhs {
    Single(Vec2),
    /// First component ranges over an interval, second is exact.
    Set { first: Interval, second: f64 },
}

impl Rhs {
    pub fn first(&self) -> Interval {
        match *self {
            Rhs::Single(v) => Interval::point(v.x()),
            Rhs::Set { first, .. } => first,
        }
    }

    pub fn second(&self) -> f64 {
        match *self {
            Rhs::Single(v) => v.y(),
            Rhs::Set { second, .. } => second,
        }
    }

    pub fn is_set_valued(&self) -> bool {
        matches!(self, Rhs::Set { .. })
    }
}

/// `ε̇ ∈ A ε + B φ(ε₁)`, set-valued exactly when `ε₁ = −v_ref`.
pub fn error_rhs(p: &PhysicalParams, v_ref: f64, state: ErrorState) -> Result<Rhs> {
    let a = error_matrix(p);
    let lin = a.apply(&state.as_vec());
    let f_ref = p.f_nl(v_ref)?;
    let friction = p.f_nl_set(state.eps1 + v_ref).shift(-f_ref);
    // B = [-1/m, 0]ᵀ
    let first = friction.scale(-1.0 / p.m).shift(lin.x());
    Ok(if first.is_point() {
        Rhs::Single(Vec2::new(first.lo, lin.y()))
    } else {
        Rhs::Set {
            first,
            second: lin.y(),
        }
    })
}

/// Right-hand side of the physical model in `(v, z)` coordinates.
pub fn state_rhs(p: &PhysicalParams, v_ref: f64, v: f64, z: f64) -> Rhs {
    let force = p.friction_force(v).shift(p.k * z);
    let first = force.scale(-1.0 / p.m);
    let second = v - v_ref;
    if first.is_point() {
        Rhs::Single(Vec2::new(first.lo, second))
    } else {
        Rhs::Set { first, second }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: PhysicalParams = PhysicalParams::table1();

    #[test]
    fn matrices_for_reference_parameters() {
        let sm = SystemMatrices::new(&P, 1.0);
        assert_eq!(sm.a, Mat2::new(-1.0, -2.0, 1.0, 0.0));
        assert_eq!(sm.b, Vec2::new(-1.0, 0.0));
        assert!((sm.a0.0[0][0] - 0.9258).abs() < 1e-4);
        assert_eq!(sm.a0.0[0][0], -(P.k_v + P.gamma(1.0)) / P.m);
        assert_eq!(sm.cb(), -1.0 / P.m);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let eq = equilibrium(&P, 1.0).unwrap();
        assert_eq!(eq.v_inf, 1.0);
        assert_eq!(eq.z_inf, -(P.f_nl(1.0).unwrap() + 1.0) / 2.0);
        match state_rhs(&P, 1.0, eq.v_inf, eq.z_inf) {
            Rhs::Single(d) => assert!(d.norm() < 1e-12),
            Rhs::Set { .. } => panic!("equilibrium is not on the sticking line"),
        }
        assert!(equilibrium(&P, 0.0).is_err());
    }

    #[test]
    fn error_rhs_branches() {
        match error_rhs(&P, 1.0, ErrorState::default()).unwrap() {
            Rhs::Single(d) => assert_eq!(d, Vec2::new(0.0, 0.0)),
            _ => panic!(),
        }
        let r = error_rhs(&P, 1.0, ErrorState::new(-1.0, 0.0)).unwrap();
        assert!(r.is_set_valued());
        assert_eq!(r.second(), -1.0);
        let f_s = P.bounds().f_s;
        let f_ref = P.f_nl(1.0).unwrap();
        let first = r.first();
        assert!((first.lo - (-1.0 * -1.0 - (f_s - f_ref))).abs() < 1e-12);
        assert!((first.hi - (1.0 + f_s + f_ref)).abs() < 1e-12);
    }

    #[test]
    fn error_and_physical_fields_agree() {
        let v_ref = 1.3;
        let eq = equilibrium(&P, v_ref).unwrap();
        for &(v, z) in &[(0.0, -3.0), (0.0, 0.5), (2.0, 1.0), (-0.7, -1.1), (5.0, 4.0)] {
            let phys = state_rhs(&P, v_ref, v, z);
            let err = error_rhs(&P, v_ref, ErrorState::from_physical(&eq, v, z)).unwrap();
            assert!((phys.first().lo - err.first().lo).abs() < 1e-12);
            assert!((phys.first().hi - err.first().hi).abs() < 1e-12);
            assert!((phys.second() - err.second()).abs() < 1e-12);
            assert_eq!(phys.is_set_valued(), err.is_set_valued());
        }
    }
}
