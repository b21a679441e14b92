//! Inner estimate `{ε : εᵀ P_l ε ≤ 1}` of the basin of attraction.
//!
//! Inside the strip `|ε₁| ≤ r_l` the nonlinearity satisfies a sector bound
//! with slope `λ ≥ λ_min(r_l)`. With `γ = τλ` as a separate variable the
//! S-procedure condition is an LMI in `(P_l, τ, γ)` for a fixed radius, and
//! the ellipse is kept inside the strip by a Schur-complement inclusion.
//! The radius itself is searched by a dichotomy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{bisect_level, sym2_basis, sym2_basis_matrix, sym2_from, ReplayReport};
use crate::dynamics::SystemMatrices;
use crate::error::{Error, Result};
use crate::friction::PhysicalParams;
use crate::linalg::SymMat2;
use crate::sdp::{accepts, solve_with, MatrixPencil, SdpProblem, SolverOptions, SymMatrix, MARGIN_FLOOR};

/// Decision-variable layout of the basin LMIs.
pub mod vars {
    pub const P11: usize = 0;
    pub const P12: usize = 1;
    pub const P22: usize = 2;
    pub const TAU: usize = 3;
    /// `γ = τλ`.
    pub const GAMMA: usize = 4;
    pub const COUNT: usize = 5;
}

/// Lower bound on τ; excludes the degenerate `τ = 0` solution.
pub const TAU_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BasinOptions {
    pub bisection_steps: usize,
    pub bisection_rel_tol: f64,
    /// Radius factor applied after an infeasible attempt.
    pub shrink: f64,
    /// Relative η improvement below which the radius search stops.
    pub stall_rel_tol: f64,
    /// The search gives up once `r_l < min_radius_ratio · v_ref`.
    pub min_radius_ratio: f64,
    pub max_attempts: usize,
}

impl Default for BasinOptions {
    fn default() -> Self {
        Self {
            bisection_steps: 40,
            bisection_rel_tol: 1e-4,
            shrink: 0.95,
            stall_rel_tol: 1e-4,
            min_radius_ratio: 1e-3,
            max_attempts: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinCertificate {
    pub v_ref: f64,
    pub p_l: SymMat2,
    /// Sector radius, `0 < r_l < v_ref`.
    pub r_l: f64,
    /// Sector slope `γ/τ`.
    pub lambda: f64,
    /// `λ_min(r_l)` the slope was constrained by.
    pub lambda_min: f64,
    pub tau: f64,
    /// `P_l ⪯ η I`, so the smallest semi-axis of the ellipse is `1/√η`.
    pub eta: f64,
    /// Verified margins, one per pencil of the problem at `η`.
    pub margins: Vec<f64>,
    /// Raw decision vector, kept for re-verification.
    pub x: Vec<f64>,
}

impl BasinCertificate {
    /// Rebuilds the LMIs at the stored radius and `η` and re-checks them with
    /// the independent eigensolver.
    pub fn verify(&self, p: &PhysicalParams) -> Result<bool> {
        let problem = eta_problem(p, self.v_ref, self.r_l, self.lambda_min, self.eta, &[])?;
        Ok(accepts(&problem, &self.x, MARGIN_FLOOR)
            && self.p_l.is_positive_definite()
            && self.lambda >= self.lambda_min * (1.0 - 1e-9)
            && self.lambda > -p.gamma(self.v_ref))
    }

    /// Checks, at `samples` random nonzero states inside the ellipse, that
    /// `|ε₁| ≤ r_l`, that the sector quadratic is nonpositive, and that
    /// `dV/dt = 2εᵀP_l(A₀ε + Bψ(ε₁)) < 0` with the true nonlinearity. The
    /// recorded value is `dV/dt`.
    pub fn replay(&self, p: &PhysicalParams, samples: usize, seed: u64) -> Result<ReplayReport> {
        let sm = SystemMatrices::new(p, self.v_ref);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = ReplayReport::new();
        for _ in 0..samples {
            // Log-uniform level in [1e-6, 1] so states near the origin are seen.
            let level = (rng.random::<f64>() * 1e-6f64.ln()).exp();
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            let eps = self.p_l.ellipse_point(angle).scale(level.sqrt());
            let e1 = eps.x();
            let psi = p.psi(self.v_ref, e1)?;
            let g = sm.gamma;
            let sector = (psi + g * e1) * (psi + g * e1 + self.lambda * e1);
            let vdot = 2.0 * self.p_l.apply(&eps).dot(&(sm.a0.apply(&eps) + sm.b.scale(psi)));
            let in_strip = e1.abs() <= self.r_l * (1.0 + 1e-12);
            let sector_ok = sector <= 1e-12 * (psi * psi + e1 * e1).max(f64::MIN_POSITIVE);
            report.record(vdot, vdot < 0.0 && in_strip && sector_ok);
        }
        Ok(report)
    }

    pub fn minor_semi_axis(&self) -> f64 {
        self.p_l.minor_semi_axis()
    }

    pub fn major_semi_axis(&self) -> f64 {
        self.p_l.major_semi_axis()
    }
}

fn check_zone(p: &PhysicalParams, v_ref: f64) -> Result<()> {
    if !(v_ref > 0.0) {
        return Err(Error::Domain {
            name: "v_ref",
            value: v_ref,
            reason: "reference speed must be strictly positive",
        });
    }
    if let Some((lo, hi)) = p.hurwitz_interval() {
        if v_ref >= lo && v_ref <= hi {
            return Err(Error::UnstableZone { v_ref, lo, hi });
        }
    }
    Ok(())
}

/// Strictly negative 3×3 pencil in `(P_l, τ, γ)` for the slope `Γ`, acting
/// on `ξ = (ε, ψ)`.
fn phi_pencil_for_slope(p: &PhysicalParams, gamma: f64) -> MatrixPencil {
    let sm = SystemMatrices::new(p, 1.0);
    let mut a0 = sm.a;
    a0.0[0][0] += sm.b.x() * gamma;
    let b = [sm.b.x(), sm.b.y()];

    let mut pencil = MatrixPencil::negative_definite(SymMatrix::zeros(3));
    for k in 0..3 {
        let e = sym2_basis(k);
        // A₀ᵀE + E A₀ in the top-left block, BᵀE in the last row.
        let he = |i: usize, j: usize| (0..2).map(|l| a0.0[l][i] * e[l][j] + e[i][l] * a0.0[l][j]).sum::<f64>();
        let bte = |j: usize| (0..2).map(|l| b[l] * e[l][j]).sum::<f64>();
        pencil.add_term(
            vars::P11 + k,
            SymMatrix::from_fn(3, |i, j| match (i, j) {
                (2, 2) => 0.0,
                (2, c) | (c, 2) => bte(c),
                _ => he(i, j),
            }),
        );
    }
    let mut tau = SymMatrix::zeros(3);
    tau.set(0, 0, -2.0 * gamma * gamma);
    tau.set(0, 2, -2.0 * gamma);
    tau.set(2, 2, -2.0);
    pencil.add_term(vars::TAU, tau);
    let mut gam = SymMatrix::zeros(3);
    gam.set(0, 0, -2.0 * gamma);
    gam.set(0, 2, -1.0);
    pencil.add_term(vars::GAMMA, gam);
    pencil
}

/// The sector LMI at `v_ref` with its side constraints `γ ≥ τ·lambda_floor`
/// and `τ ≥ 1e−9`. Rejects speeds inside the unstable zone.
pub fn build_phi_pencil(p: &PhysicalParams, v_ref: f64, lambda_floor: f64) -> Result<SdpProblem> {
    p.validate()?;
    check_zone(p, v_ref)?;
    Ok(with_sides(
        SdpProblem::new(vars::COUNT).pencil(phi_pencil_for_slope(p, p.gamma(v_ref))),
        lambda_floor,
    ))
}

fn with_sides(problem: SdpProblem, lambda_floor: f64) -> SdpProblem {
    let mut c = vec![0.0; problem.n_vars];
    c[vars::GAMMA] = 1.0;
    c[vars::TAU] = -lambda_floor;
    problem.at_least(c, 0.0).var_at_least(vars::TAU, TAU_FLOOR)
}

/// `[[P_l, Cᵀ], [C, r_l²]] ⪰ 0`, i.e. the ellipse stays in `|ε₁| ≤ r_l`.
fn inclusion_pencil(r_l: f64) -> MatrixPencil {
    let mut constant = SymMatrix::zeros(3);
    constant.set(0, 2, 1.0);
    constant.set(2, 2, r_l * r_l);
    let mut pencil = MatrixPencil::positive_semidefinite(constant);
    for k in 0..3 {
        pencil.add_term(vars::P11 + k, embed2(&sym2_basis_matrix(k)));
    }
    pencil
}

fn embed2(m: &SymMatrix) -> SymMatrix {
    crate::sdp::embed(3, 0, m)
}

/// `η I − P_l ⪰ 0`.
fn eta_cap(eta: f64) -> MatrixPencil {
    let mut pencil = MatrixPencil::positive_semidefinite(SymMatrix::identity(2).scaled(eta));
    for k in 0..3 {
        pencil.add_term(vars::P11 + k, sym2_basis_matrix(k).scaled(-1.0));
    }
    pencil
}

/// Sector LMI, inclusion and any extra pencils over the basin variables.
fn base_problem(
    p: &PhysicalParams,
    v_ref: f64,
    r_l: f64,
    lambda_floor: f64,
    extra: &[MatrixPencil],
) -> Result<SdpProblem> {
    let mut problem = build_phi_pencil(p, v_ref, lambda_floor)?.pencil(inclusion_pencil(r_l));
    for e in extra {
        problem = problem.pencil(e.clone());
    }
    Ok(problem)
}

fn eta_problem(
    p: &PhysicalParams,
    v_ref: f64,
    r_l: f64,
    lambda_floor: f64,
    eta: f64,
    extra: &[MatrixPencil],
) -> Result<SdpProblem> {
    Ok(base_problem(p, v_ref, r_l, lambda_floor, extra)?.pencil(eta_cap(eta)))
}

/// The basin LMIs with `η` as a sixth variable, minimised directly.
fn scan_problem(
    p: &PhysicalParams,
    v_ref: f64,
    r_l: f64,
    lambda_floor: f64,
    extra: &[MatrixPencil],
) -> Result<SdpProblem> {
    let base = base_problem(p, v_ref, r_l, lambda_floor, extra)?;
    let n = vars::COUNT + 1;
    let mut problem = SdpProblem::new(n);
    for pencil in base.pencils {
        problem = problem.pencil(pencil);
    }
    for li in base.linear_inequalities {
        let mut c = li.coeffs;
        c.push(0.0);
        problem = problem.at_least(c, li.bound);
    }
    let cap = eta_cap(0.0).with_term(vars::COUNT, SymMatrix::identity(2));
    let mut objective = vec![0.0; n];
    objective[vars::COUNT] = 1.0;
    Ok(problem.pencil(cap).var_at_least(vars::COUNT, 0.0).minimize(objective))
}

pub fn certify_basin(p: &PhysicalParams, v_ref: f64, r_l: f64) -> Result<BasinCertificate> {
    certify_basin_with(p, v_ref, r_l, &BasinOptions::default(), &[])
}

/// Smallest `η` at a fixed radius. `extra` pencils are added over the
/// [`vars`] layout (used to impose an inclusion of another ellipse).
pub fn certify_basin_with(
    p: &PhysicalParams,
    v_ref: f64,
    r_l: f64,
    opts: &BasinOptions,
    extra: &[MatrixPencil],
) -> Result<BasinCertificate> {
    p.validate()?;
    check_zone(p, v_ref)?;
    if !(r_l > 0.0 && r_l < v_ref) {
        return Err(Error::Domain {
            name: "r_l",
            value: r_l,
            reason: "sector radius must satisfy 0 < r_l < v_ref",
        });
    }
    let lambda_min = p.lambda_min(v_ref, r_l)?;
    let solver = SolverOptions::default();
    let sol = solve_with(&scan_problem(p, v_ref, r_l, lambda_min, extra)?, &solver, None)?;
    let not_certified = || Error::NotCertified(format!("basin LMIs infeasible at v_ref = {v_ref}, r_l = {r_l:.6}"));
    if !sol.is_feasible() {
        return Err(not_certified());
    }
    let eta = sol.x[vars::COUNT] * (1.0 + 1e-9);
    let x: Vec<f64> = sol.x[..vars::COUNT].to_vec();
    let build = |eta: f64| eta_problem(p, v_ref, r_l, lambda_min, eta, extra);
    let seed = solve_with(&build(eta)?, &solver, Some(&x))?;
    if !seed.is_feasible() {
        return Err(not_certified());
    }

    // Step down until infeasible, then bisect.
    let mut feasible = (eta, seed);
    let mut gap = 1e-3 * eta;
    let mut infeasible = 0.0;
    for _ in 0..32 {
        let trial = feasible.0 - gap;
        if trial <= 0.0 {
            break;
        }
        let sol = solve_with(&build(trial)?, &solver, Some(&feasible.1.x))?;
        if !sol.is_feasible() {
            infeasible = trial;
            break;
        }
        feasible = (trial, sol);
        gap *= 2.0;
    }
    // `build` only fails on inputs validated above.
    let (eta, sol) = bisect_level(feasible, infeasible, opts.bisection_steps, opts.bisection_rel_tol, |eta| {
        build(eta).expect("inputs validated above")
    });
    Ok(certificate(v_ref, r_l, lambda_min, eta, sol.x, sol.margins))
}

fn certificate(v_ref: f64, r_l: f64, lambda_min: f64, eta: f64, x: Vec<f64>, margins: Vec<f64>) -> BasinCertificate {
    BasinCertificate {
        v_ref,
        p_l: sym2_from(&x),
        r_l,
        lambda: x[vars::GAMMA] / x[vars::TAU],
        lambda_min,
        tau: x[vars::TAU],
        eta,
        margins,
        x,
    }
}

pub fn maximize_basin(p: &PhysicalParams, v_ref: f64) -> Result<BasinCertificate> {
    maximize_basin_with(p, v_ref, &BasinOptions::default(), &[])
}

/// Radius search for the smallest `η`: start just below `v_ref`, shrink by
/// `opts.shrink` while infeasible, then bisect between the last feasible
/// and last infeasible radius while `η` keeps improving.
pub fn maximize_basin_with(
    p: &PhysicalParams,
    v_ref: f64,
    opts: &BasinOptions,
    extra: &[MatrixPencil],
) -> Result<BasinCertificate> {
    p.validate()?;
    check_zone(p, v_ref)?;
    let r_min = opts.min_radius_ratio * v_ref;
    let mut r = v_ref * (1.0 - 1e-6);
    let mut best: Option<BasinCertificate> = None;
    let mut infeasible_above: Option<f64> = None;
    let mut attempts = 0;

    while attempts < opts.max_attempts && r >= r_min {
        attempts += 1;
        match certify_basin_with(p, v_ref, r, opts, extra) {
            Ok(cert) => {
                let improved = best
                    .as_ref()
                    .is_none_or(|b| cert.eta < b.eta * (1.0 - opts.stall_rel_tol));
                if !improved {
                    break;
                }
                best = Some(cert);
                r = match infeasible_above {
                    Some(hi) => {
                        if (hi - r) <= opts.stall_rel_tol * r {
                            break;
                        }
                        0.5 * (r + hi)
                    }
                    None => r * opts.shrink,
                };
            }
            Err(e) if e.is_precondition() => return Err(e),
            Err(_) => {
                infeasible_above = Some(r);
                r = match &best {
                    Some(b) => {
                        if (r - b.r_l) <= opts.stall_rel_tol * b.r_l {
                            break;
                        }
                        0.5 * (r + b.r_l)
                    }
                    None => r * opts.shrink,
                };
            }
        }
    }
    best.ok_or_else(|| {
        Error::NotCertified(format!(
            "no sector radius in [{r_min:.3e}, {v_ref}) certified a basin after {attempts} attempts"
        ))
    })
}

/// Certificate valid for every `v_ref ≥ v_circ`: one `(P_l, τ, γ, r_l)`
/// satisfying the sector LMI both at `v_circ` and in the limit `Γ = 0`.
/// The slope floor is the largest `λ_min(r_l)` over a grid of speeds from
/// `v_circ` upward, and the radius is searched from `v_circ` downward.
pub fn corollary1_certificate(p: &PhysicalParams, v_circ: f64) -> Result<Option<BasinCertificate>> {
    p.validate()?;
    let v2 = p.hurwitz_interval().map_or(0.0, |(_, hi)| hi);
    if !(v_circ >= v2 && v_circ > 0.0) {
        return Err(Error::Domain {
            name: "v_circ",
            value: v_circ,
            reason: "must be at least the upper end of the unstable zone",
        });
    }
    let opts = BasinOptions::default();
    let solver = SolverOptions::default();
    let mut r = v_circ * (1.0 - 1e-6);
    while r >= opts.min_radius_ratio * v_circ {
        let floor = lambda_floor_above(p, v_circ, r)?;
        let problem = base_problem(p, v_circ, r, floor, &[])?.pencil(phi_pencil_for_slope(p, 0.0));
        let sol = solve_with(&problem, &solver, None)?;
        if sol.is_feasible() {
            let eta = sym2_from(&sol.x).max_eigenvalue();
            return Ok(Some(certificate(v_circ, r, floor, eta, sol.x, sol.margins)));
        }
        r *= opts.shrink;
    }
    Ok(None)
}

pub fn check_corollary1(p: &PhysicalParams, v_circ: f64) -> Result<bool> {
    Ok(corollary1_certificate(p, v_circ)?.is_some())
}

/// `max λ_min(v, r_l)` over `v ∈ [v_circ, 64 v_circ]` on a geometric grid.
fn lambda_floor_above(p: &PhysicalParams, v_circ: f64, r_l: f64) -> Result<f64> {
    let mut floor = f64::NEG_INFINITY;
    for i in 0..=48 {
        let v = v_circ * 2f64.powf(i as f64 / 8.0);
        floor = floor.max(p.lambda_min(v, r_l)?);
    }
    Ok(floor)
}

/// Re-checks a certificate's decision vector against the sector LMI at
/// another speed, together with the inclusion and slope constraints.
pub fn certificate_holds_at(p: &PhysicalParams, cert: &BasinCertificate, v_ref: f64) -> Result<bool> {
    let floor = p.lambda_min(v_ref, cert.r_l)?;
    let problem = base_problem(p, v_ref, cert.r_l, floor, &[])?;
    Ok(accepts(&problem, &cert.x, MARGIN_FLOOR))
}
