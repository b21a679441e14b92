//! Time stepping of the set-valued mass–spring model, limit-cycle detection
//! and regime classification.
//!
//! Each step freezes the Stribeck magnitude at the start-of-step speed,
//! treats viscous friction and the Coulomb sign implicitly, and resolves
//! the sign inclusion with a closed-form threshold rule, so sticking is
//! exact and no chattering occurs.

use crate::attractor::{certify_attractor, AttractorCertificate};
use crate::basin::{maximize_basin, BasinCertificate};
use crate::dynamics::{equilibrium, ErrorState};
use crate::error::{Error, Result};
use crate::friction::PhysicalParams;
use crate::gas::{certify_gas, GasCertificate};

/// Error norm below which a trajectory counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Relative agreement required between successive peak spacings and
/// peak-to-peak amplitudes.
const CYCLE_AGREEMENT: f64 = 0.05;
const MIN_PEAKS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    /// Horizon `T` (s).
    pub t_end: f64,
    pub v0: f64,
    pub z0: f64,
    /// Speeds at or below this magnitude may stick.
    pub stick_tol: f64,
    /// Fraction of the horizon ignored by cycle detection.
    pub transient_skip: f64,
}

impl SimConfig {
    /// Defaults for the given parameters: `dt = 1e−3`, `T = 40`,
    /// `stick_tol = 1e−6·v_s`, a quarter of the horizon skipped.
    pub fn new(p: &PhysicalParams, v0: f64, z0: f64) -> Self {
        Self {
            dt: 1e-3,
            t_end: 40.0,
            v0,
            z0,
            stick_tol: 1e-6 * p.v_s,
            transient_skip: 0.25,
        }
    }

    pub fn validate(&self, p: &PhysicalParams) -> Result<()> {
        let bad = |name: &'static str, value: f64, reason: &'static str| Err(Error::Domain { name, value, reason });
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", self.dt, "time step must be finite and strictly positive");
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return bad("T", self.t_end, "horizon must be finite and at least one time step");
        }
        if !(self.v0.is_finite() && self.z0.is_finite()) {
            return bad("v0", self.v0, "initial state must be finite");
        }
        if !(self.stick_tol > 0.0 && self.stick_tol <= p.v_s / 10.0) {
            return bad("stick_tol", self.stick_tol, "must lie in (0, v_s/10]");
        }
        if !(0.0..1.0).contains(&self.transient_skip) {
            return bad("transient_skip", self.transient_skip, "must lie in [0, 1)");
        }
        Ok(())
    }

    /// Number of steps, `round(T/dt)`.
    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Slip,
    Stick,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub v: f64,
    pub z: f64,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

/// One step from `(v, z)`; returns `(v⁺, z⁺, mode)`.
pub fn step(p: &PhysicalParams, v_ref: f64, v: f64, z: f64, dt: f64, stick_tol: f64) -> (f64, f64, Mode) {
    let f_s = p.bounds().f_s;
    // Sticking for the whole step leaves z⁺ = z − dt·v_ref; the inclusion
    // 0 ∈ −(F_nl(0) + k z⁺)/m then requires |k z⁺| ≤ F_S.
    let z_stick = z - dt * v_ref;
    let can_stick = (p.k * z_stick).abs() <= f_s;

    let magnitude = p.stribeck_magnitude(v);
    let w = p.m * v - dt * p.k * z;
    let candidate = if w.abs() <= dt * magnitude {
        0.0
    } else {
        (w - dt * magnitude * w.signum()) / (p.m + dt * p.k_v)
    };
    let brackets = candidate == 0.0 || v * candidate <= 0.0 || v.abs() <= stick_tol;
    if brackets && can_stick {
        return (0.0, z_stick, Mode::Stick);
    }
    let v_next = if v != 0.0 && v * candidate < 0.0 {
        // Crossing zero without sticking: the sign flips, and near zero the
        // relevant magnitude is the static one.
        let w_dir = candidate.signum();
        let mag0 = p.stribeck_magnitude(0.0);
        let v = (w - dt * mag0 * w_dir) / (p.m + dt * p.k_v);
        if v * w_dir > 0.0 {
            v
        } else {
            0.0
        }
    } else {
        candidate
    };
    (v_next, z + dt * (v_next - v_ref), Mode::Slip)
}

pub fn simulate(p: &PhysicalParams, v_ref: f64, cfg: &SimConfig) -> Result<Trajectory> {
    p.validate()?;
    cfg.validate(p)?;
    if !(v_ref > 0.0 && v_ref.is_finite()) {
        return Err(Error::Domain {
            name: "v_ref",
            value: v_ref,
            reason: "reference speed must be strictly positive",
        });
    }
    let n = cfg.steps();
    let f_s = p.bounds().f_s;
    let initial_mode = if cfg.v0 == 0.0 && (p.k * cfg.z0).abs() <= f_s {
        Mode::Stick
    } else {
        Mode::Slip
    };
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample {
        t: 0.0,
        v: cfg.v0,
        z: cfg.z0,
        mode: initial_mode,
    });
    let (mut v, mut z) = (cfg.v0, cfg.z0);
    for i in 1..=n {
        let (vn, zn, mode) = step(p, v_ref, v, z, cfg.dt, cfg.stick_tol);
        v = vn;
        z = zn;
        samples.push(Sample {
            t: i as f64 * cfg.dt,
            v,
            z,
            mode,
        });
    }
    Ok(Trajectory { samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub detected: bool,
    /// Mean spacing of successive velocity maxima (s); 0 unless detected.
    pub period: f64,
    /// Mean peak-to-peak velocity between successive maxima (m/s).
    pub amplitude: f64,
    pub converged: bool,
    /// `‖ε(T)‖`.
    pub final_error_norm: f64,
}

impl CycleReport {
    /// Neither a cycle nor convergence was established within the horizon.
    pub fn inconclusive(&self) -> bool {
        !self.detected && !self.converged
    }
}

/// Looks for convergence first, then for a sustained oscillation after the
/// transient: at least three three-point velocity maxima whose spacings and
/// peak-to-peak amplitudes agree to ±5%, with amplitude above `10·stick_tol`.
pub fn detect_cycle(p: &PhysicalParams, traj: &Trajectory, v_ref: f64, cfg: &SimConfig) -> Result<CycleReport> {
    let eq = equilibrium(p, v_ref)?;
    let s = &traj.samples;
    let Some(last) = s.last() else {
        return Err(Error::Domain {
            name: "trajectory",
            value: 0.0,
            reason: "trajectory has no samples",
        });
    };
    let norm = |x: &Sample| ErrorState::from_physical(&eq, x.v, x.z).norm();
    let final_error_norm = norm(last);
    let converged_from = s.iter().rposition(|x| norm(x) >= CONVERGENCE_TOL).map_or(0, |i| i + 1);
    let mut report = CycleReport {
        detected: false,
        period: 0.0,
        amplitude: 0.0,
        converged: converged_from < s.len(),
        final_error_norm,
    };
    if report.converged {
        return Ok(report);
    }

    let start = s.partition_point(|x| x.t < cfg.transient_skip * last.t);
    let peaks: Vec<usize> = (start.max(1)..s.len().saturating_sub(1))
        .filter(|&i| s[i - 1].v < s[i].v && s[i].v >= s[i + 1].v)
        .collect();
    if peaks.len() < MIN_PEAKS {
        return Ok(report);
    }
    let spacings: Vec<f64> = peaks.windows(2).map(|w| s[w[1]].t - s[w[0]].t).collect();
    let swings: Vec<f64> = peaks
        .windows(2)
        .map(|w| {
            let lo = s[w[0]..=w[1]].iter().map(|x| x.v).fold(f64::INFINITY, f64::min);
            0.5 * (s[w[0]].v + s[w[1]].v) - lo
        })
        .collect();
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let agree = |x: &[f64], m: f64| x.iter().all(|v| (v - m).abs() <= CYCLE_AGREEMENT * m.abs());
    let (period, amplitude) = (mean(&spacings), mean(&swings));
    if agree(&spacings, period) && agree(&swings, amplitude) && amplitude > 10.0 * cfg.stick_tol {
        report.detected = true;
        report.period = period;
        report.amplitude = amplitude;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Locally stable equilibrium below the unstable zone; no inclusion.
    BasinOnly,
    /// Reference speed inside the unstable zone.
    UnstableEquilibrium,
    /// Locally stable above the unstable zone, attractor not contained.
    BasinWithoutAttractorInclusion,
    /// Attractor estimate inside the basin estimate.
    GloballyStable,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::BasinOnly => "basin-only",
            Regime::UnstableEquilibrium => "unstable-equilibrium",
            Regime::BasinWithoutAttractorInclusion => "basin-without-attractor-inclusion",
            Regime::GloballyStable => "globally-stable",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regime together with the certificates it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub v_ref: f64,
    pub regime: Regime,
    pub attractor: Option<AttractorCertificate>,
    pub basin: Option<BasinCertificate>,
    pub gas: Option<GasCertificate>,
}

pub fn classify_regime(p: &PhysicalParams, v_ref: f64) -> Result<Regime> {
    Ok(assess_regime(p, v_ref)?.regime)
}

/// Runs the attractor, basin and GAS certifications at `v_ref`. Fails when
/// the speed is outside the unstable zone but no basin can be certified,
/// since none of the four regimes then applies.
pub fn assess_regime(p: &PhysicalParams, v_ref: f64) -> Result<RegimeReport> {
    p.validate()?;
    let attractor = match certify_attractor(p, v_ref) {
        Ok(a) => Some(a),
        Err(Error::NotCertified(_)) => None,
        Err(e) => return Err(e),
    };
    let interval = p.hurwitz_interval();
    if let Some((lo, hi)) = interval {
        if v_ref >= lo && v_ref <= hi {
            return Ok(RegimeReport {
                v_ref,
                regime: Regime::UnstableEquilibrium,
                attractor,
                basin: None,
                gas: None,
            });
        }
    }
    let basin = maximize_basin(p, v_ref)?;
    let gas = match certify_gas(p, v_ref) {
        Ok(g) => Some(g),
        Err(Error::NotCertified(_)) => None,
        Err(e) => return Err(e),
    };
    let below_zone = interval.is_some_and(|(lo, _)| v_ref < lo);
    let regime = match (&gas, below_zone) {
        (Some(_), _) => Regime::GloballyStable,
        (None, true) => Regime::BasinOnly,
        (None, false) => Regime::BasinWithoutAttractorInclusion,
    };
    Ok(RegimeReport {
        v_ref,
        regime,
        attractor,
        basin: Some(basin),
        gas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: PhysicalParams = PhysicalParams::table1();

    #[test]
    fn stick_persists_inside_static_band() {
        let f_s = P.bounds().f_s;
        let z = 0.5 * f_s / P.k;
        let (v, z1, mode) = step(&P, 1.0, 0.0, z, 1e-3, 1e-6);
        assert_eq!((v, mode), (0.0, Mode::Stick));
        assert!((z1 - (z - 1e-3)).abs() < 1e-15);
    }

    #[test]
    fn breakaway_beyond_static_level() {
        let f_s = P.bounds().f_s;
        let z = -1.01 * f_s / P.k;
        let (v, _, mode) = step(&P, 1.0, 0.0, z, 1e-3, 1e-6);
        assert!(v > 0.0);
        assert_eq!(mode, Mode::Slip);
    }

    #[test]
    fn slip_step_matches_explicit_euler() {
        let (v, z, dt) = (6.0, 0.3, 1e-4);
        let (v1, _, _) = step(&P, 1.0, v, z, dt, 1e-6);
        let euler = v + dt * (-(P.stribeck_magnitude(v) + P.k_v * v + P.k * z) / P.m);
        assert!((v1 - euler).abs() < 10.0 * dt * dt);
    }

    #[test]
    fn equilibrium_is_invariant() {
        let v_ref = 3.0;
        let eq = equilibrium(&P, v_ref).unwrap();
        let cfg = SimConfig {
            t_end: 5.0,
            ..SimConfig::new(&P, eq.v_inf, eq.z_inf)
        };
        let traj = simulate(&P, v_ref, &cfg).unwrap();
        for s in &traj.samples {
            assert!(ErrorState::from_physical(&eq, s.v, s.z).norm() < 1e-6);
        }
        let r = detect_cycle(&P, &traj, v_ref, &cfg).unwrap();
        assert!(r.converged && !r.detected && r.amplitude == 0.0);
    }

    #[test]
    fn single_step_horizon() {
        let cfg = SimConfig {
            t_end: 1e-3,
            ..SimConfig::new(&P, 6.0, 0.0)
        };
        assert_eq!(simulate(&P, 1.0, &cfg).unwrap().samples.len(), 2);
        let bad = SimConfig {
            t_end: 1e-4,
            ..cfg.clone()
        };
        assert!(simulate(&P, 1.0, &bad).is_err());
    }

    #[test]
    fn regime_names() {
        assert_eq!(Regime::BasinWithoutAttractorInclusion.to_string(), "basin-without-attractor-inclusion");
    }
}
