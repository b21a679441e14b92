//! Stribeck/Coulomb friction law with set-valued sign, and the scalar
//! quantities derived from it: the shifted nonlinearities φ and ψ, the
//! linearisation slope Γ, the Hurwitz interval of reference speeds, and the
//! local sector bound λ_min.
//!
//! All functions are pure and evaluated in binary64.

use crate::error::{Error, Result};

/// Plant constants plus nothing else; the reference speed is passed
/// separately to every operation that needs it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Mass (kg).
    pub m: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Stribeck velocity (m/s).
    pub v_s: f64,
    /// Coulomb coefficient.
    pub mu_c: f64,
    /// Static coefficient.
    pub mu_s: f64,
    /// Spring stiffness (N/m).
    pub k: f64,
    /// Viscous coefficient (N·s/m).
    pub k_v: f64,
    /// Spring rest length (m).
    pub l0: f64,
    /// Initial anchor position (m).
    pub xa0: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::table1()
    }
}

impl PhysicalParams {
    /// Reference parameter set used throughout the examples and tests.
    pub const fn table1() -> Self {
        Self {
            m: 1.0,
            g: 9.81,
            v_s: 0.8,
            mu_c: 0.2997,
            mu_s: 0.5994,
            k: 2.0,
            k_v: 1.0,
            l0: 0.0,
            xa0: 0.0,
        }
    }

    /// Checks the invariants every downstream computation relies on.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("g", self.g),
            ("v_s", self.v_s),
            ("k", self.k),
            ("k_v", self.k_v),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if !(self.mu_c > 0.0 && self.mu_s > self.mu_c && self.mu_s.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "need mu_S > mu_C > 0, got mu_C = {}, mu_S = {}",
                self.mu_c, self.mu_s
            )));
        }
        if !(self.l0.is_finite() && self.xa0.is_finite()) {
            return Err(Error::InvalidParams("l0 and xA0 must be finite".into()));
        }
        Ok(())
    }

    pub fn bounds(&self) -> FrictionBounds {
        FrictionBounds::new(self)
    }

    /// Stribeck magnitude `R_N (μ_C + (μ_S − μ_C) e^{−(v/v_s)²})`, even in `v`.
    pub fn stribeck_magnitude(&self, v: f64) -> f64 {
        let r_n = self.m * self.g;
        let x = v / self.v_s;
        r_n * (self.mu_c + (self.mu_s - self.mu_c) * (-x * x).exp())
    }

    /// Derivative of the single-valued branch of `F_nl` for `v ≠ 0`.
    pub fn f_nl_slope(&self, v: f64) -> f64 {
        let r_n = self.m * self.g;
        let x = v / self.v_s;
        // d/dv [ sign(v) * mag(v) ] = sign(v) * mag'(v); mag' = -2 v/v_s² Δμ R_N e^{-x²}
        -2.0 * r_n * (self.mu_s - self.mu_c) * v.abs() / (self.v_s * self.v_s) * (-x * x).exp()
    }

    /// Non-viscous friction force on the single-valued branch.
    pub fn f_nl(&self, v: f64) -> Result<f64> {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Domain {
                name: "v",
                value: v,
                reason: "F_nl is set-valued at v = 0; use f_nl_set",
            });
        }
        Ok(self.stribeck_magnitude(v) * v.signum())
    }

    /// `F_nl` as a value set: a singleton for `v ≠ 0`, `[−F_S, F_S]` at 0.
    pub fn f_nl_set(&self, v: f64) -> Interval {
        if v == 0.0 {
            let f_s = self.bounds().f_s;
            Interval::new(-f_s, f_s)
        } else {
            Interval::point(self.stribeck_magnitude(v) * v.signum())
        }
    }

    /// Total friction `F_nl(v) + k_v v` as a value set.
    pub fn friction_force(&self, v: f64) -> Interval {
        self.f_nl_set(v).shift(self.k_v * v)
    }

    /// `φ(ε₁) = F_nl(ε₁ + v_ref) − F_nl(v_ref)` on the single-valued branch.
    pub fn phi(&self, v_ref: f64, eps1: f64) -> Result<f64> {
        check_v_ref(v_ref)?;
        let v = eps1 + v_ref;
        if v == 0.0 {
            return Err(Error::Domain {
                name: "eps1",
                value: eps1,
                reason: "phi is set-valued at eps1 = -v_ref",
            });
        }
        Ok(self.f_nl(v)? - self.stribeck_magnitude(v_ref))
    }

    /// φ with the one-sided limit `F_nl(0⁺) = F_S` at `ε₁ = −v_ref`.
    fn phi_closed(&self, v_ref: f64, eps1: f64) -> f64 {
        let v = eps1 + v_ref;
        let f = if v <= 0.0 {
            if v == 0.0 {
                self.bounds().f_s
            } else {
                -self.stribeck_magnitude(v)
            }
        } else {
            self.stribeck_magnitude(v)
        };
        f - self.stribeck_magnitude(v_ref)
    }

    /// Slope of φ at the origin, `Γ = −2 R_N (μ_S − μ_C) (v_ref/v_s²) e^{−v_ref²/v_s²}`.
    pub fn gamma(&self, v_ref: f64) -> f64 {
        let r_n = self.m * self.g;
        let x = v_ref / self.v_s;
        -2.0 * r_n * (self.mu_s - self.mu_c) * v_ref / (self.v_s * self.v_s) * (-x * x).exp()
    }

    /// `ψ(ε₁) = φ(ε₁) − Γ ε₁`, the part of φ beyond its linearisation.
    pub fn psi(&self, v_ref: f64, eps1: f64) -> Result<f64> {
        Ok(self.phi(v_ref, eps1)? - self.gamma(v_ref) * eps1)
    }

    /// `θ(v) = |v| e^{−v²/v_s²}`.
    pub fn theta(&self, v_ref: f64) -> f64 {
        let x = v_ref / self.v_s;
        v_ref.abs() * (-x * x).exp()
    }

    /// Level that θ must stay below for `A0` to be Hurwitz.
    pub fn hurwitz_threshold(&self) -> f64 {
        let r_n = self.m * self.g;
        self.k_v * self.v_s * self.v_s / (2.0 * r_n * (self.mu_s - self.mu_c))
    }

    /// Reference speeds `(v_ref1, v_ref2)` bounding the zone where the
    /// linearised error dynamics is unstable, or `None` when `A0` is Hurwitz
    /// for every positive reference speed.
    pub fn hurwitz_interval(&self) -> Option<(f64, f64)> {
        let level = self.hurwitz_threshold();
        let peak = self.v_s / std::f64::consts::SQRT_2;
        if level >= self.theta(peak) {
            return None;
        }
        let mut v_up = 2.0 * peak;
        while self.theta(v_up) >= level {
            v_up *= 2.0;
        }
        let lo = bisect(|v| self.theta(v) - level, 0.0, peak);
        let hi = bisect(|v| level - self.theta(v), peak, v_up);
        Some((lo, hi))
    }

    /// True when `v_ref > 0` lies outside the closed unstable interval.
    pub fn in_hurwitz_zone(&self, v_ref: f64) -> bool {
        match self.hurwitz_interval() {
            None => v_ref > 0.0,
            Some((lo, hi)) => v_ref > 0.0 && (v_ref < lo || v_ref > hi),
        }
    }

    /// Sector bound `sup −φ(ε₁)/ε₁` over `[−r_l, 0) ∪ (0, r_l]`.
    pub fn lambda_min(&self, v_ref: f64, r_l: f64) -> Result<f64> {
        Ok(self.sector_bound(v_ref, r_l)?.value)
    }

    /// [`lambda_min`](Self::lambda_min) together with where the supremum is
    /// attained.
    pub fn sector_bound(&self, v_ref: f64, r_l: f64) -> Result<SectorBound> {
        check_v_ref(v_ref)?;
        if !(r_l > 0.0 && r_l <= v_ref) {
            return Err(Error::Domain {
                name: "r_l",
                value: r_l,
                reason: "sector radius must satisfy 0 < r_l <= v_ref",
            });
        }
        let ratio = |e: f64| -self.phi_closed(v_ref, e) / e;

        let mut best = (f64::NEG_INFINITY, 0.0, 0usize, 1.0f64);
        for side in [-1.0f64, 1.0] {
            for i in 1..=SECTOR_GRID {
                let e = side * r_l * i as f64 / SECTOR_GRID as f64;
                let g = ratio(e);
                if g > best.0 {
                    best = (g, e, i, side);
                }
            }
        }
        let (mut value, mut argmax, idx, side) = best;

        // Golden-section refinement inside the neighbouring grid cells.
        let h = r_l / SECTOR_GRID as f64;
        let a = side * ((idx as f64 - 1.0) * h).max(1e-3 * h);
        let b = side * ((idx as f64 + 1.0) * h).min(r_l);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (e_ref, g_ref) = golden_max(ratio, lo, hi);
        if g_ref > value {
            value = g_ref;
            argmax = e_ref;
        }

        let limit_at_zero = -self.gamma(v_ref);
        if limit_at_zero > value {
            value = limit_at_zero;
            argmax = 0.0;
        }

        let interior = argmax.abs() < r_l * (1.0 - 1e-9);
        let stationarity_residual = if interior && argmax != 0.0 {
            let phi = self.phi_closed(v_ref, argmax);
            Some(phi - self.f_nl_slope(argmax + v_ref) * argmax)
        } else {
            None
        };
        Ok(SectorBound {
            value,
            argmax,
            interior,
            stationarity_residual,
        })
    }
}

const SECTOR_GRID: usize = 8192;

/// Result of the sector-bound search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBound {
    pub value: f64,
    /// Maximising `ε₁` (0 when the bound is the limit `−Γ`).
    pub argmax: f64,
    /// Whether the maximiser is strictly inside `[−r_l, r_l]`.
    pub interior: bool,
    /// `φ(ε*) − φ'(ε*) ε*` at an interior maximiser.
    pub stationarity_residual: Option<f64>,
}

/// Derived force levels of the friction law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionBounds {
    /// Coulomb level `μ_C m g`.
    pub f_c: f64,
    /// Static level `μ_S m g`.
    pub f_s: f64,
    /// Normal force `m g`.
    pub r_n: f64,
}

impl FrictionBounds {
    pub fn new(p: &PhysicalParams) -> Self {
        let r_n = p.m * p.g;
        Self {
            f_c: p.mu_c * r_n,
            f_s: p.mu_s * r_n,
            r_n,
        }
    }
}

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval bounds out of order: {lo} > {hi}");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn shift(&self, d: f64) -> Self {
        Self::new(self.lo + d, self.hi + d)
    }

    pub fn scale(&self, s: f64) -> Self {
        if s >= 0.0 {
            Self::new(self.lo * s, self.hi * s)
        } else {
            Self::new(self.hi * s, self.lo * s)
        }
    }

    /// Distance from `x` to the interval (0 inside).
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// Set-valued sign: `{θ/|θ|}` for θ ≠ 0 and `[−1, 1]` at 0.
pub fn sign_set(theta: f64) -> Interval {
    if theta == 0.0 {
        Interval::new(-1.0, 1.0)
    } else {
        Interval::point(theta.signum())
    }
}

fn check_v_ref(v_ref: f64) -> Result<()> {
    if v_ref > 0.0 && v_ref.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "v_ref",
            value: v_ref,
            reason: "reference speed must be finite and strictly positive",
        })
    }
}

/// Root of an increasing function on `[lo, hi]` with `f(lo) < 0 <= f(hi)`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: PhysicalParams = PhysicalParams::table1();

    #[test]
    fn sign_set_cases() {
        assert_eq!(sign_set(2.5), Interval::point(1.0));
        assert_eq!(sign_set(0.0), Interval::new(-1.0, 1.0));
        assert_eq!(sign_set(-0.3), Interval::point(-1.0));
    }

    #[test]
    fn f_nl_values() {
        // R_N μ_C + R_N Δμ e^{-14.0625}
        let expected = 9.81 * (0.2997 + 0.2997 * (-14.0625f64).exp());
        assert!((P.f_nl(3.0).unwrap() - expected).abs() < 1e-12);
        assert!((P.f_nl(3.0).unwrap() - 2.9401).abs() < 1e-4);
        assert_eq!(P.f_nl(-3.0).unwrap(), -P.f_nl(3.0).unwrap());
        assert!((P.f_nl(1e-12).unwrap() - 0.5994 * 9.81).abs() < 1e-12);
        assert!(matches!(P.f_nl(0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn set_valued_forms() {
        let at_zero = P.f_nl_set(0.0);
        assert!((at_zero.hi - 5.880114).abs() < 1e-6 && at_zero.lo == -at_zero.hi);
        assert_eq!(P.f_nl_set(1.0), Interval::point(P.f_nl(1.0).unwrap()));
        assert_eq!(P.f_nl_set(-1.0).lo, -P.f_nl(1.0).unwrap());
        assert_eq!(P.friction_force(0.0), at_zero);
        assert_eq!(P.friction_force(1.0), Interval::point(P.f_nl(1.0).unwrap() + 1.0));
        let v = 10.0 * P.v_s;
        let f = P.friction_force(v);
        assert!((f.lo - (P.bounds().f_c + P.k_v * v)).abs() < 1e-6);
    }

    #[test]
    fn phi_and_psi() {
        assert_eq!(P.phi(3.0, 0.0).unwrap(), 0.0);
        let direct = P.f_nl(0.6).unwrap() - P.f_nl(3.0).unwrap();
        assert!((P.phi(3.0, -2.4).unwrap() - direct).abs() < 1e-13);
        assert!((direct - 1.6752).abs() < 1e-4);
        assert!(P.phi(3.0, -3.0).is_err());
        assert!(P.phi(-1.0, 0.5).is_err());
        assert_eq!(P.psi(2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_values() {
        // -2 * 9.81 * 0.2997 / 0.64 * e^{-1/0.64}
        let expected = -2.0 * 9.81 * 0.2997 / 0.64 * (-1.0f64 / 0.64).exp();
        assert!((P.gamma(1.0) - expected).abs() < 1e-13);
        assert!((P.gamma(1.0) + 1.9258).abs() < 1e-4);
        assert!(P.gamma(100.0).abs() < 1e-300);
    }

    #[test]
    fn theta_peak_and_threshold() {
        let peak = P.v_s / 2f64.sqrt();
        assert!((peak - 0.565685).abs() < 1e-6);
        assert!((P.theta(peak) - 0.343106).abs() < 1e-6);
        assert_eq!(P.theta(0.0), 0.0);
        assert!((P.hurwitz_threshold() - 0.108841).abs() < 1e-6);
    }

    #[test]
    fn hurwitz_roots() {
        let (lo, hi) = P.hurwitz_interval().unwrap();
        assert!((lo - 0.11).abs() < 0.005, "{lo}");
        assert!((hi - 1.25).abs() < 0.005, "{hi}");
        for r in [lo, hi] {
            assert!((P.theta(r) - P.hurwitz_threshold()).abs() < 1e-8);
            assert!((P.k_v + P.gamma(r)).abs() < 1e-8 * P.k_v);
        }
        let stiff = PhysicalParams { k_v: 10.0, ..P };
        assert_eq!(stiff.hurwitz_interval(), None);
        assert!(P.in_hurwitz_zone(0.07) && !P.in_hurwitz_zone(1.0) && P.in_hurwitz_zone(3.0));
    }

    #[test]
    fn lambda_min_domain() {
        assert!(P.lambda_min(3.0, 0.0).is_err());
        assert!(P.lambda_min(3.0, 3.1).is_err());
        assert!(P.lambda_min(3.0, 3.0).is_ok());
    }

    #[test]
    fn lambda_min_boundary_maximiser_at_2_4() {
        let sb = P.sector_bound(3.0, 2.4).unwrap();
        assert!((sb.value - 0.698).abs() < 0.005, "{}", sb.value);
        assert!(!sb.interior);
        assert!((sb.argmax + 2.4).abs() < 1e-9);
    }

    #[test]
    fn interior_maximiser_is_stationary() {
        // Small radius around a fast reference speed: the supremum sits inside.
        for (v_ref, r_l) in [(1.5, 1.2), (0.7, 0.6), (2.0, 1.9)] {
            let sb = P.sector_bound(v_ref, r_l).unwrap();
            if let Some(res) = sb.stationarity_residual {
                assert!(res.abs() < 1e-6, "v_ref={v_ref} r_l={r_l} residual {res}");
            }
        }
    }

    #[test]
    fn validation() {
        assert!(P.validate().is_ok());
        assert!(PhysicalParams { k_v: 0.0, ..P }.validate().is_err());
        assert!(PhysicalParams { mu_s: 0.1, ..P }.validate().is_err());
        assert!(PhysicalParams { m: f64::NAN, ..P }.validate().is_err());
    }
}
