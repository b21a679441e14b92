//! Global attractor estimate `{ε : εᵀ P_g ε < 1}`.
//!
//! Two S-procedure LMIs (one for the slipping branch, one for the sticking
//! line `ε₁ = −v_ref`) are made affine by fixing the decay multiplier τ₀ on a
//! grid over `[0, −2 max Re λ(A)]`. For each τ₀ the smallest ellipse is
//! sought by bisecting on `η` in `P_g ⪰ η I`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::certificate::{bisect_level, sym2_basis, sym2_basis_matrix, sym2_from, ReplayReport};
use crate::dynamics::error_matrix;
use crate::error::{Error, Result};
use crate::friction::PhysicalParams;
use crate::linalg::{Mat2, SymMat2, Vec2};
use crate::sdp::{accepts, solve_with, MatrixPencil, SdpProblem, SolverOptions, SymMatrix, MARGIN_FLOOR};

/// Decision-variable layout of the attractor LMIs.
pub mod vars {
    pub const P11: usize = 0;
    pub const P12: usize = 1;
    pub const P22: usize = 2;
    pub const TAU1: usize = 3;
    pub const TAU2: usize = 4;
    pub const TAU3: usize = 5;
    pub const TAU4: usize = 6;
    pub const TAU5: usize = 7;
    pub const COUNT: usize = 8;
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorOptions {
    pub grid_size: usize,
    /// Golden-section evaluations around the best grid point (0 disables).
    pub refine_steps: usize,
    pub bisection_steps: usize,
    pub bisection_rel_tol: f64,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        Self {
            grid_size: 100,
            refine_steps: 8,
            bisection_steps: 40,
            bisection_rel_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorCertificate {
    pub v_ref: f64,
    pub p_g: SymMat2,
    /// `τ₀ … τ₅`; `τ₄` is sign-free, the others nonnegative.
    pub tau: [f64; 6],
    /// `P_g ⪰ η I`, so the ellipse's largest semi-axis is `1/√η`.
    pub eta: f64,
    /// Verified margins of the two strict LMIs and of `P_g − η I ⪰ 0`.
    pub margins: Vec<f64>,
    /// Raw decision vector, kept for re-verification.
    pub x: Vec<f64>,
}

impl AttractorCertificate {
    pub fn tau0(&self) -> f64 {
        self.tau[0]
    }

    /// Rebuilds the LMIs at the stored `τ₀`, `η` and re-checks them with the
    /// independent eigensolver.
    pub fn verify(&self, p: &PhysicalParams) -> Result<bool> {
        let problem = eta_problem(p, self.v_ref, self.tau0(), self.eta, &[])?;
        Ok(accepts(&problem, &self.x, MARGIN_FLOOR) && self.p_g.is_positive_definite())
    }

    /// Checks `dV/dt = 2εᵀP_g(Aε + Bφ) < 0` at `samples` random states with
    /// `εᵀP_gε ∈ [1.01, 100]`. On the sticking line `ε₁ = −v_ref` both relay
    /// extremes `±F_S` are tried.
    pub fn replay(&self, p: &PhysicalParams, samples: usize, seed: u64) -> Result<ReplayReport> {
        let a = error_matrix(p);
        let b = Vec2::new(-1.0 / p.m, 0.0);
        let f_ref = p.f_nl(self.v_ref)?;
        let f_s = p.bounds().f_s;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = ReplayReport::new();
        let vdot = |eps: Vec2, phi: f64| 2.0 * self.p_g.apply(&eps).dot(&(a.apply(&eps) + b.scale(phi)));

        for i in 0..samples {
            if i % 10 == 9 {
                // Sticking line: pick ε₂ so the level lands in the band.
                let eps1 = -self.v_ref;
                let Some(eps2) = sample_on_line(&self.p_g, eps1, &mut rng) else {
                    continue;
                };
                let eps = Vec2::new(eps1, eps2);
                for f in [-f_s, f_s] {
                    let d = vdot(eps, f - f_ref);
                    report.record(d, d < 0.0);
                }
                continue;
            }
            let level: f64 = (rng.random::<f64>() * (100f64 / 1.01).ln()).exp() * 1.01;
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            let eps = self.p_g.ellipse_point(angle).scale(level.sqrt());
            let phi = if eps.x() + self.v_ref == 0.0 {
                f_s - f_ref
            } else {
                p.phi(self.v_ref, eps.x())?
            };
            let d = vdot(eps, phi);
            report.record(d, d < 0.0);
        }
        Ok(report)
    }
}

/// `ε₂` with `(ε₁, ε₂)ᵀ P (ε₁, ε₂) ∈ [1.01, 100]`, if the line meets the band.
fn sample_on_line(p: &SymMat2, eps1: f64, rng: &mut ChaCha8Rng) -> Option<f64> {
    // q(ε₂) = c ε₂² + 2 b ε₁ ε₂ + a ε₁²; solve q = level for a random level.
    for _ in 0..32 {
        let level = 1.01 + rng.random::<f64>() * (100.0 - 1.01);
        let (qa, qb, qc) = (p.c, 2.0 * p.b * eps1, p.a * eps1 * eps1 - level);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            continue;
        }
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let e2 = (-qb + sign * disc.sqrt()) / (2.0 * qa);
        let v = p.quad(&Vec2::new(eps1, e2));
        if (1.01..=100.0).contains(&v) {
            return Some(e2);
        }
    }
    None
}

/// `τ₀^max = −2 max Re λ(A)`; rejects non-Hurwitz `A`.
pub fn tau0_max(a: &Mat2) -> Result<f64> {
    let re = a.max_real_eigenvalue();
    if re >= 0.0 {
        return Err(Error::NotHurwitz { max_real: re });
    }
    Ok(-2.0 * re)
}

/// Both attractor LMIs at a fixed `τ₀`, sharing `P_g`, with the multiplier
/// sign constraints attached. `pencils[0]` covers the slipping branch and
/// `pencils[1]` the sticking line. Variables follow [`vars`].
pub fn build_theorem1_pencils(p: &PhysicalParams, v_ref: f64, tau0: f64) -> Result<SdpProblem> {
    let f_ref = p.f_nl(v_ref)?;
    let bnd = p.bounds();
    let a = error_matrix(p);
    let b = [-1.0 / p.m, 0.0];

    // D = [A  B  −F_nl(v_ref) B], 2×4.
    let d = |r: usize, c: usize| -> f64 {
        match c {
            0 | 1 => a.0[r][c],
            2 => b[r],
            _ => -f_ref * b[r],
        }
    };
    // He(Dᵀ E F) + τ₀ Fᵀ E F for the symmetric basis element E; F = [I₂ 0].
    let p_term = |k: usize| {
        let e = sym2_basis(k);
        let dte = |i: usize, j: usize| (0..2).map(|l| d(l, i) * e[l][j]).sum::<f64>();
        SymMatrix::from_fn(4, |i, j| {
            let mut v = 0.0;
            if j < 2 {
                v += dte(i, j);
            }
            if i < 2 {
                v += dte(j, i);
            }
            if i < 2 && j < 2 {
                v += tau0 * e[i][j];
            }
            v
        })
    };

    let unit = |i: usize| {
        let mut u = [0.0; 4];
        u[i] = 1.0;
        u
    };
    let (pi1, pi3, pi4) = (unit(0), unit(2), unit(3));
    let q: Vec<f64> = (0..4).map(|i| pi1[i] + v_ref * pi4[i]).collect();
    let outer = |u: &[f64]| SymMatrix::outer(u);

    let mut big_pi1 = outer(&pi3);
    big_pi1.add_scaled(-bnd.f_s * bnd.f_s, &outer(&pi4));
    let mut big_pi2 = outer(&pi4).scaled(bnd.f_c * bnd.f_c);
    big_pi2.add_scaled(-1.0, &outer(&pi3));
    let big_pi3 = SymMatrix::sym_outer(&q, &pi3).scaled(-1.0);
    let big_pi4 = outer(&q);

    let constant = outer(&pi4).scaled(-tau0);
    let mut first = MatrixPencil::negative_definite(constant.clone());
    let mut second = MatrixPencil::negative_definite(constant);
    for k in 0..3 {
        first.add_term(vars::P11 + k, p_term(k));
        second.add_term(vars::P11 + k, p_term(k));
    }
    first.add_term(vars::TAU1, big_pi1.scaled(-1.0));
    first.add_term(vars::TAU2, big_pi2.scaled(-1.0));
    first.add_term(vars::TAU3, big_pi3.scaled(-1.0));
    second.add_term(vars::TAU5, big_pi1.scaled(-1.0));
    second.add_term(vars::TAU4, big_pi4.scaled(-1.0));

    let mut problem = SdpProblem::new(vars::COUNT).pencil(first).pencil(second);
    for v in [vars::TAU1, vars::TAU2, vars::TAU3, vars::TAU5] {
        problem = problem.var_at_least(v, 0.0);
    }
    Ok(problem)
}

/// Attractor LMIs plus `P_g − η I ⪰ 0`.
fn eta_problem(p: &PhysicalParams, v_ref: f64, tau0: f64, eta: f64, extra: &[MatrixPencil]) -> Result<SdpProblem> {
    let mut lower = MatrixPencil::positive_semidefinite(SymMatrix::identity(2).scaled(-eta));
    for k in 0..3 {
        lower.add_term(vars::P11 + k, sym2_basis_matrix(k));
    }
    let mut problem = build_theorem1_pencils(p, v_ref, tau0)?.pencil(lower);
    for e in extra {
        problem = problem.pencil(e.clone());
    }
    Ok(problem)
}

/// Attractor LMIs with `η` as a ninth variable, maximised directly.
fn scan_problem(p: &PhysicalParams, v_ref: f64, tau0: f64, extra: &[MatrixPencil]) -> Result<SdpProblem> {
    let mut base = build_theorem1_pencils(p, v_ref, tau0)?;
    base.pencils.extend(extra.iter().cloned());
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
    let mut lower = MatrixPencil::positive_semidefinite(SymMatrix::zeros(2)).with_term(vars::COUNT, SymMatrix::identity(2).scaled(-1.0));
    for k in 0..3 {
        lower.add_term(vars::P11 + k, sym2_basis_matrix(k));
    }
    let mut objective = vec![0.0; n];
    objective[vars::COUNT] = -1.0;
    Ok(problem.pencil(lower).var_at_least(vars::COUNT, 0.0).minimize(objective))
}

/// Best `η` at a fixed `τ₀` from a single objective-mode solve, or `None`
/// when the LMIs are not certified feasible there.
pub fn scan_eta_at(p: &PhysicalParams, v_ref: f64, tau0: f64) -> Result<Option<AttractorCertificate>> {
    scan_eta_with(p, v_ref, tau0, &[])
}

fn scan_eta_with(p: &PhysicalParams, v_ref: f64, tau0: f64, extra: &[MatrixPencil]) -> Result<Option<AttractorCertificate>> {
    let sol = solve_with(&scan_problem(p, v_ref, tau0, extra)?, &SolverOptions::default(), None)?;
    let eta = sol.x[vars::COUNT];
    if !sol.is_feasible() || !(eta > 0.0) {
        return Ok(None);
    }
    let x = sol.x[..vars::COUNT].to_vec();
    let problem = eta_problem(p, v_ref, tau0, eta, extra)?;
    if !accepts(&problem, &x, MARGIN_FLOOR) {
        return Ok(None);
    }
    let margins = crate::sdp::verify(&problem, &x)?;
    Ok(Some(certificate(v_ref, tau0, eta, x, margins)))
}

/// Largest `η` at a fixed `τ₀` by bisection over feasibility problems
/// `P_g ⪰ η I`, started from a known feasible certificate at that `τ₀`.
pub fn polish_eta(p: &PhysicalParams, start: &AttractorCertificate, opts: &AttractorOptions) -> Result<AttractorCertificate> {
    polish_eta_with(p, start, opts, &[])
}

fn polish_eta_with(
    p: &PhysicalParams,
    start: &AttractorCertificate,
    opts: &AttractorOptions,
    extra: &[MatrixPencil],
) -> Result<AttractorCertificate> {
    let (v_ref, tau0) = (start.v_ref, start.tau0());
    let solver = SolverOptions::default();
    let seed = solve_with(&eta_problem(p, v_ref, tau0, start.eta, extra)?, &solver, Some(&start.x))?;
    if !seed.is_feasible() {
        return Ok(start.clone());
    }
    let mut feasible = (start.eta, seed);
    let mut trial = start.eta * 1.01;
    let mut infeasible = None;
    for _ in 0..64 {
        let sol = solve_with(&eta_problem(p, v_ref, tau0, trial, extra)?, &solver, Some(&feasible.1.x))?;
        if !sol.is_feasible() {
            infeasible = Some(trial);
            break;
        }
        feasible = (trial, sol);
        trial *= 2.0;
    }
    let Some(infeasible) = infeasible else {
        return Ok(start.clone());
    };
    // `eta_problem` only fails on an invalid `v_ref`, ruled out above.
    let (eta, sol) = bisect_level(feasible, infeasible, opts.bisection_steps, opts.bisection_rel_tol, |eta| {
        eta_problem(p, v_ref, tau0, eta, extra).expect("v_ref validated above")
    });
    Ok(certificate(v_ref, tau0, eta, sol.x, sol.margins))
}

fn certificate(v_ref: f64, tau0: f64, eta: f64, x: Vec<f64>, margins: Vec<f64>) -> AttractorCertificate {
    AttractorCertificate {
        v_ref,
        p_g: sym2_from(&x),
        tau: [
            tau0,
            x[vars::TAU1],
            x[vars::TAU2],
            x[vars::TAU3],
            x[vars::TAU4],
            x[vars::TAU5],
        ],
        eta,
        margins,
        x,
    }
}

/// Per-point certificates over `tau0s`, evaluated in parallel; the output
/// order follows the input so reductions over it are deterministic.
pub fn scan_tau0(
    p: &PhysicalParams,
    v_ref: f64,
    tau0s: &[f64],
) -> Result<Vec<Option<AttractorCertificate>>> {
    scan_tau0_with(p, v_ref, tau0s, &[])
}

fn scan_tau0_with(
    p: &PhysicalParams,
    v_ref: f64,
    tau0s: &[f64],
    extra: &[MatrixPencil],
) -> Result<Vec<Option<AttractorCertificate>>> {
    tau0s.par_iter().map(|&t| scan_eta_with(p, v_ref, t, extra)).collect()
}

/// Uniform grid of `n` points over `[0, hi]` (endpoints included).
pub fn tau0_grid(hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * hi],
        _ => (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn certify_attractor(p: &PhysicalParams, v_ref: f64) -> Result<AttractorCertificate> {
    certify_attractor_with(p, v_ref, &AttractorOptions::default())
}

pub fn certify_attractor_with(p: &PhysicalParams, v_ref: f64, opts: &AttractorOptions) -> Result<AttractorCertificate> {
    certify_attractor_constrained(p, v_ref, opts, &[])
}

/// As [`certify_attractor_with`], with `extra` pencils over the [`vars`]
/// layout added to every LMI system.
pub fn certify_attractor_constrained(
    p: &PhysicalParams,
    v_ref: f64,
    opts: &AttractorOptions,
    extra: &[MatrixPencil],
) -> Result<AttractorCertificate> {
    p.validate()?;
    if !(v_ref > 0.0) {
        return Err(Error::Domain {
            name: "v_ref",
            value: v_ref,
            reason: "reference speed must be strictly positive",
        });
    }
    let hi = tau0_max(&error_matrix(p))?;
    let grid = tau0_grid(hi, opts.grid_size);
    let results = scan_tau0_with(p, v_ref, &grid, extra)?;

    let mut best: Option<(usize, AttractorCertificate)> = None;
    for (i, cert) in results.into_iter().enumerate() {
        if let Some(c) = cert {
            if best.as_ref().is_none_or(|(_, b)| c.eta > b.eta) {
                best = Some((i, c));
            }
        }
    }
    let Some((idx, mut best)) = best else {
        return Err(Error::NotCertified(format!(
            "no point of the {}-point tau0 grid over [0, {hi:.6}] admits the attractor LMIs",
            grid.len()
        )));
    };

    if opts.refine_steps > 0 && grid.len() > 1 {
        let lo = grid[idx.saturating_sub(1)];
        let up = grid[(idx + 1).min(grid.len() - 1)];
        for cand in golden_refine(lo, up, opts.refine_steps, |t| {
            scan_eta_with(p, v_ref, t, extra).ok().flatten()
        }) {
            if cand.eta > best.eta {
                best = cand;
            }
        }
    }
    polish_eta_with(p, &best, opts, extra)
}

/// Golden-section search maximising `η(τ₀)` on `[lo, hi]`; returns every
/// certificate found along the way.
fn golden_refine(
    mut lo: f64,
    mut hi: f64,
    steps: usize,
    mut eval: impl FnMut(f64) -> Option<AttractorCertificate>,
) -> Vec<AttractorCertificate> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let score = |c: &Option<AttractorCertificate>| c.as_ref().map_or(f64::NEG_INFINITY, |c| c.eta);
    let mut found = Vec::new();
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..steps.saturating_sub(2) {
        if score(&f1) >= score(&f2) {
            hi = x2;
            x2 = x1;
            found.extend(f2.take());
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            found.extend(f1.take());
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    found.extend(f1);
    found.extend(f2);
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau0_max_values() {
        let p = PhysicalParams::table1();
        assert!((tau0_max(&error_matrix(&p)).unwrap() - 1.0).abs() < 1e-14);
        let tri = Mat2::new(-3.0, 0.0, 1.0, -1.0);
        assert!((tau0_max(&tri).unwrap() - 2.0).abs() < 1e-14);
        let marginal = Mat2::new(0.0, -2.0, 1.0, 0.0);
        assert!(matches!(tau0_max(&marginal), Err(Error::NotHurwitz { .. })));
    }

    #[test]
    fn pencil_entries_match_block_assembly() {
        let p = PhysicalParams::table1();
        let bnd = p.bounds();
        let tau0 = 0.4;
        let prob = build_theorem1_pencils(&p, 1.0, tau0).unwrap();
        let mut x = vec![0.0; vars::COUNT];
        x[vars::TAU1] = 0.7;
        x[vars::TAU2] = 1.3;
        let m = prob.pencils[0].evaluate(&x);
        let expected = -tau0 + 0.7 * bnd.f_s * bnd.f_s - 1.3 * bnd.f_c * bnd.f_c;
        assert!((m.get(3, 3) - expected).abs() < 1e-12);

        // With only P nonzero and τ₀ = 0 the lower-right 2×2 block vanishes.
        let prob0 = build_theorem1_pencils(&p, 1.0, 0.0).unwrap();
        let m0 = prob0.pencils[0].evaluate(&[0.3, 0.1, 0.9, 0.0, 0.0, 0.0, 0.0, 0.0]);
        for (i, j) in [(2, 2), (2, 3), (3, 3)] {
            assert_eq!(m0.get(i, j), 0.0);
        }
    }

    #[test]
    fn second_pencil_has_free_tau4_term() {
        let p = PhysicalParams::table1();
        let v_ref = 2.0;
        let prob = build_theorem1_pencils(&p, v_ref, 0.5).unwrap();
        let (_, basis) = prob.pencils[1].bases.iter().find(|(v, _)| *v == vars::TAU4).unwrap();
        // −(π₁ + v_ref π₄)ᵀ(π₁ + v_ref π₄)
        assert_eq!(basis.get(0, 0), -1.0);
        assert_eq!(basis.get(0, 3), -v_ref);
        assert_eq!(basis.get(3, 3), -v_ref * v_ref);
        assert!(prob.linear_inequalities.iter().all(|li| li.coeffs[vars::TAU4] == 0.0));
    }

    #[test]
    fn grid_includes_endpoints() {
        let g = tau0_grid(1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
