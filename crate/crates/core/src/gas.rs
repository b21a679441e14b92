//! Global asymptotic stability: an attractor estimate contained in a basin
//! estimate.
//!
//! The attractor is certified first with the largest `η_g`; the basin
//! search then carries an extra pencil tying `P_l` to it. Two inclusion
//! tests are available: the axis bound `P_l ⪯ η_g I` (the ball of radius
//! `1/√η_g` sits between the two ellipses) and the direct matrix inequality
//! `P_l ⪯ P_g`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attractor::{self, certify_attractor, AttractorCertificate, AttractorOptions};
use crate::basin::{self, maximize_basin, maximize_basin_with, BasinCertificate, BasinOptions};
use crate::certificate::{sym2_basis_matrix, sym2_to_matrix, ReplayReport};
use crate::error::{Error, Result};
use crate::friction::PhysicalParams;
use crate::linalg::SymMat2;
use crate::sdp::MatrixPencil;

/// Tolerated negative inclusion margin (eigenvalue of `P_g − P_l`).
pub const INCLUSION_TOL: f64 = 1e-10;

/// Relative shrink of `η_g` in the axis-bound pencil, so the verified
/// inclusion is not lost to solver tolerance.
const AXIS_BACKOFF: f64 = 1e-8;

/// Alternation rounds for the matrix-pencil inclusion.
const ALTERNATION_ROUNDS: usize = 3;

/// Number of log-spaced speeds in the coarse threshold sweep.
const COARSE_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InclusionMode {
    /// `P_l ⪯ η_g I` with `P_g ⪰ η_g I` from the attractor.
    #[default]
    AxisBound,
    /// `P_l ⪯ P_g`, with up to three attractor/basin alternation rounds.
    MatrixPencil,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasCertificate {
    pub mode: InclusionMode,
    pub attractor: AttractorCertificate,
    pub basin: BasinCertificate,
    /// Smallest eigenvalue of `P_g − P_l`.
    pub inclusion_margin: f64,
}

impl GasCertificate {
    fn new(mode: InclusionMode, attractor: AttractorCertificate, basin: BasinCertificate) -> Self {
        let inclusion_margin = (attractor.p_g - basin.p_l).min_eigenvalue();
        Self {
            mode,
            attractor,
            basin,
            inclusion_margin,
        }
    }

    /// Re-verifies both sub-certificates and the inclusion margin.
    pub fn verify(&self, p: &PhysicalParams) -> Result<bool> {
        Ok(self.attractor.verify(p)? && self.basin.verify(p)? && self.inclusion_margin >= -INCLUSION_TOL)
    }

    /// Samples `samples` points uniformly in angle on `{εᵀP_gε = 1}` and
    /// checks `εᵀP_lε ≤ 1 + 1e−9`. The recorded value is `εᵀP_lε − 1`.
    pub fn inclusion_replay(&self, samples: usize, seed: u64) -> ReplayReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = ReplayReport::new();
        for _ in 0..samples {
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            let eps = self.attractor.p_g.ellipse_point(angle);
            let excess = self.basin.p_l.quad(&eps) - 1.0;
            report.record(excess, excess <= 1e-9);
        }
        report
    }
}

/// `P − P_l ⪰ 0` over the basin variables, for a fixed `P`.
fn below_matrix(p: &SymMat2) -> MatrixPencil {
    let mut pencil = MatrixPencil::positive_semidefinite(sym2_to_matrix(p));
    for k in 0..3 {
        pencil.add_term(basin::vars::P11 + k, sym2_basis_matrix(k).scaled(-1.0));
    }
    pencil
}

/// `P_g − P_l ⪰ 0` over the attractor variables, for a fixed `P_l`.
fn above_matrix(p_l: &SymMat2) -> MatrixPencil {
    let mut pencil = MatrixPencil::positive_semidefinite(sym2_to_matrix(p_l).scaled(-1.0));
    for k in 0..3 {
        pencil.add_term(attractor::vars::P11 + k, sym2_basis_matrix(k));
    }
    pencil
}

pub fn certify_gas(p: &PhysicalParams, v_ref: f64) -> Result<GasCertificate> {
    certify_gas_with(p, v_ref, InclusionMode::default())
}

pub fn certify_gas_with(p: &PhysicalParams, v_ref: f64, mode: InclusionMode) -> Result<GasCertificate> {
    p.validate()?;
    if let Some((lo, hi)) = p.hurwitz_interval() {
        if v_ref >= lo && v_ref <= hi {
            return Err(Error::UnstableZone { v_ref, lo, hi });
        }
    }
    let attractor = certify_attractor(p, v_ref)?;
    let opts = BasinOptions::default();
    let not_certified = |detail: &str| Error::NotCertified(format!("no basin contains the attractor at v_ref = {v_ref}: {detail}"));

    match mode {
        InclusionMode::AxisBound => {
            let cap = SymMat2::scaled_identity(attractor.eta * (1.0 - AXIS_BACKOFF));
            match maximize_basin_with(p, v_ref, &opts, &[below_matrix(&cap)]) {
                Ok(basin) => Ok(GasCertificate::new(mode, attractor, basin)),
                Err(Error::NotCertified(detail)) => Err(not_certified(&detail)),
                Err(e) => Err(e),
            }
        }
        InclusionMode::MatrixPencil => {
            let mut attractor = attractor;
            let mut free_basin: Option<BasinCertificate> = None;
            for round in 0..=ALTERNATION_ROUNDS {
                match maximize_basin_with(p, v_ref, &opts, &[below_matrix(&attractor.p_g)]) {
                    Ok(basin) => return Ok(GasCertificate::new(mode, attractor, basin)),
                    Err(Error::NotCertified(_)) if round < ALTERNATION_ROUNDS => {}
                    Err(Error::NotCertified(detail)) => return Err(not_certified(&detail)),
                    Err(e) => return Err(e),
                }
                // Re-solve the attractor above the unconstrained basin.
                let target = match &free_basin {
                    Some(b) => b.p_l,
                    None => {
                        let b = maximize_basin(p, v_ref).map_err(|e| match e {
                            Error::NotCertified(d) => not_certified(&d),
                            e => e,
                        })?;
                        let p_l = b.p_l;
                        free_basin = Some(b);
                        p_l
                    }
                };
                attractor = match attractor::certify_attractor_constrained(
                    p,
                    v_ref,
                    &AttractorOptions::default(),
                    &[above_matrix(&target)],
                ) {
                    Ok(a) => a,
                    Err(Error::NotCertified(detail)) => return Err(not_certified(&detail)),
                    Err(e) => return Err(e),
                };
            }
            Err(not_certified("alternation exhausted"))
        }
    }
}

fn certifies(p: &PhysicalParams, v_ref: f64, mode: InclusionMode) -> Result<bool> {
    match certify_gas_with(p, v_ref, mode) {
        Ok(_) => Ok(true),
        Err(Error::NotCertified(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn find_gas_threshold(p: &PhysicalParams, v_lo: f64, v_hi: f64, tol: f64) -> Result<f64> {
    find_gas_threshold_with(p, v_lo, v_hi, tol, InclusionMode::default())
}

/// Smallest certified-GAS speed found by a coarse log-spaced sweep of
/// `[v_lo, v_hi]` followed by bisection between the largest failing and the
/// smallest succeeding speed. This is a boundary of what this toolkit can
/// certify, not of global stability itself.
pub fn find_gas_threshold_with(p: &PhysicalParams, v_lo: f64, v_hi: f64, tol: f64, mode: InclusionMode) -> Result<f64> {
    p.validate()?;
    let v2 = p.hurwitz_interval().map_or(0.0, |(_, hi)| hi);
    if !(v_lo > v2 && v_hi > v_lo) {
        return Err(Error::Domain {
            name: "v_lo",
            value: v_lo,
            reason: "need upper unstable root < v_lo < v_hi",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            reason: "tolerance must be strictly positive",
        });
    }
    let ratio = (v_hi / v_lo).ln();
    let grid: Vec<f64> = (0..COARSE_POINTS)
        .map(|i| match i {
            0 => v_lo,
            i if i == COARSE_POINTS - 1 => v_hi,
            i => v_lo * (ratio * i as f64 / (COARSE_POINTS - 1) as f64).exp(),
        })
        .collect();
    let verdicts: Vec<bool> = grid.par_iter().map(|&v| certifies(p, v, mode)).collect::<Result<_>>()?;
    if !verdicts[COARSE_POINTS - 1] {
        return Err(Error::NotCertified(format!("v_hi = {v_hi} is not certified globally stable")));
    }
    let first = verdicts.iter().position(|&ok| ok).expect("v_hi certified");
    if first == 0 {
        return Ok(v_lo);
    }
    let (mut lo, mut hi) = (grid[first - 1], grid[first]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if certifies(p, mid, mode)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
