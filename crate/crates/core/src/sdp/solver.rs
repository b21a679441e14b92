//! Log-det barrier method for small affine LMI systems.
//!
//! Feasibility is decided by a phase-I problem in homogeneous coordinates
//! `(x', w)` with `x = x'/w`: maximise a common slack `t` such that
//! `σⱼ(w Ĉⱼ + Σ x'ᵢ B̂ᵢⱼ) − t I ⪰ 0` for every pencil (σ = −1 for ≺ 0, +1 for
//! ⪰ 0), `âᵢᵀx' − b̂ᵢ w − t ≥ 0` for every linear inequality and `w ≥ t`.
//! Hats denote normalisation by the stacked coefficient norm. Because the
//! system is a cone in `(x', w)`, strict pencils can additionally be capped
//! at `I` without loss of generality, which ties the slack to the
//! Frobenius-normalised margin that [`verify`] measures. A candidate is only
//! accepted once [`verify`] re-checks it with the Jacobi eigensolver.
//!
//! Objective mode then runs a standard barrier method in the original
//! coordinates from the verified phase-I point.

use nalgebra::{DMatrix, DVector};

use super::eigen::{sym_eigen, sym_eigenvalues};
use super::{SdpError, SdpProblem, Sense, SymMatrix};

/// Minimum verified margin `−λ_max(M(x)) / ‖M(x)‖_F` for a strict pencil.
pub const MARGIN_FLOOR: f64 = 1e-7;
/// Allowed relative violation `λ_min(M(x)) / ‖M(x)‖_F ≥ −PSD_TOL` for ⪰ 0.
pub const PSD_TOL: f64 = 1e-9;
/// Allowed violation of a (normalised) linear inequality.
pub const LINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_newton_per_centering: usize,
    pub max_barrier_updates: usize,
    pub barrier_growth: f64,
    pub margin_floor: f64,
    /// Half-width of the implicit box on every variable without explicit
    /// bounds.
    pub box_limit: f64,
    /// Relative duality-gap target in objective mode.
    pub objective_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_newton_per_centering: 200,
            max_barrier_updates: 40,
            barrier_growth: 8.0,
            margin_floor: MARGIN_FLOOR,
            box_limit: 1e6,
            objective_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InfeasibleReason {
    /// A constraint that does not depend on the variables is violated.
    Structural { detail: String },
    /// The phase-I optimum is provably below zero (up to centring accuracy).
    NegativeMaxMargin { upper_bound: f64 },
    /// Phase I converged but the best point does not clear the margin floor.
    MarginBelowFloor { best_slack: f64 },
    /// Newton or barrier-update budget ran out first.
    BudgetExhausted { best_slack: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Feasible,
    ObjectiveOptimal,
    /// Failure to certify, not a proof of infeasibility (except for
    /// [`InfeasibleReason::Structural`]).
    InfeasibleWithinTolerance(InfeasibleReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: Status,
    pub x: Vec<f64>,
    /// Verified per-pencil margins at `x` (see [`verify`]).
    pub margins: Vec<f64>,
    pub objective_value: Option<f64>,
    pub newton_steps: usize,
}

impl SdpSolution {
    pub fn is_feasible(&self) -> bool {
        !matches!(self.status, Status::InfeasibleWithinTolerance(_))
    }
}

/// Worst-eigenvalue slack of every pencil at `x`, normalised by the
/// Frobenius norm of the evaluated pencil: `−λ_max/‖M‖` for strict pencils
/// and `λ_min/‖M‖` for semidefinite ones. A zero matrix scores 0.
pub fn verify(problem: &SdpProblem, x: &[f64]) -> Result<Vec<f64>, SdpError> {
    if x.len() != problem.n_vars {
        return Err(SdpError::LengthMismatch {
            expected: problem.n_vars,
            got: x.len(),
        });
    }
    problem
        .pencils
        .iter()
        .map(|p| {
            let m = p.evaluate(x);
            let norm = m.frobenius_norm();
            if norm == 0.0 {
                return Ok(0.0);
            }
            let ev = sym_eigenvalues(&m)?;
            Ok(match p.sense {
                Sense::NegativeDefinite => -ev[ev.len() - 1] / norm,
                Sense::PositiveSemidefinite => ev[0] / norm,
            })
        })
        .collect()
}

/// Whether `x` satisfies every constraint of `problem` under the verified
/// margin contract.
pub fn accepts(problem: &SdpProblem, x: &[f64], margin_floor: f64) -> bool {
    let Ok(margins) = verify(problem, x) else {
        return false;
    };
    let pencils_ok = problem.pencils.iter().zip(&margins).all(|(p, &m)| match p.sense {
        Sense::NegativeDefinite => m >= margin_floor,
        Sense::PositiveSemidefinite => m >= -PSD_TOL,
    });
    let linear_ok = problem.linear_inequalities.iter().all(|li| {
        let scale = li.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-300);
        li.slack(x) / scale >= -LINEAR_TOL
    });
    let bounds_ok = problem
        .var_bounds
        .as_ref()
        .is_none_or(|b| b.iter().zip(x).all(|(&(lo, hi), &v)| lo <= v && v <= hi));
    pencils_ok && linear_ok && bounds_ok
}

/// Direction in variable space that increases the worst eigenvalue of
/// pencil `index` fastest, `dᵢ = ±uᵀ Mᵢ u` for its extreme eigenvector `u`,
/// together with the rate `‖d‖²` at which the Rayleigh quotient moves.
pub fn worst_direction(problem: &SdpProblem, x: &[f64], index: usize) -> Result<(Vec<f64>, f64), SdpError> {
    let p = &problem.pencils[index];
    let eig = sym_eigen(&p.evaluate(x))?;
    let (u, sign) = match p.sense {
        Sense::NegativeDefinite => (eig.vectors.last().unwrap(), 1.0),
        Sense::PositiveSemidefinite => (&eig.vectors[0], -1.0),
    };
    let mut d = vec![0.0; problem.n_vars];
    for (var, basis) in &p.bases {
        d[*var] += sign * basis.quad_form(u);
    }
    let rate = d.iter().map(|v| v * v).sum();
    Ok((d, rate))
}

pub fn solve(problem: &SdpProblem) -> Result<SdpSolution, SdpError> {
    solve_with(problem, &SolverOptions::default(), None)
}

pub fn solve_with(
    problem: &SdpProblem,
    opts: &SolverOptions,
    warm_start: Option<&[f64]>,
) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    let n = problem.n_vars;

    if let Some(detail) = structural_violation(problem, opts)? {
        let x = vec![0.0; n];
        return Ok(SdpSolution {
            status: Status::InfeasibleWithinTolerance(InfeasibleReason::Structural { detail }),
            margins: verify(problem, &x)?,
            x,
            objective_value: None,
            newton_steps: 0,
        });
    }

    let mut x0: Vec<f64> = match warm_start {
        Some(w) if w.len() == n => w.to_vec(),
        _ => vec![0.0; n],
    };
    if let Some(bounds) = &problem.var_bounds {
        for (v, &(lo, hi)) in x0.iter_mut().zip(bounds) {
            let pad = 1e-3 * (hi - lo);
            *v = v.clamp(lo + pad, hi - pad);
        }
    }

    let direct = Constraints::direct(problem, opts);
    let mut newton_steps = 0;
    let x_feas = if accepts(problem, &x0, opts.margin_floor) && direct.min_slack(&x0, &[]) > 0.0 {
        x0
    } else {
        let lifted = Constraints::homogeneous(problem, opts);
        match phase_one(problem, &lifted, opts, &x0, &mut newton_steps) {
            Ok(x) => x,
            Err(reason) => {
                return Ok(SdpSolution {
                    status: Status::InfeasibleWithinTolerance(reason),
                    margins: verify(problem, &x0)?,
                    x: x0,
                    objective_value: None,
                    newton_steps,
                })
            }
        }
    };

    let Some(objective) = &problem.objective else {
        return Ok(SdpSolution {
            status: Status::Feasible,
            margins: verify(problem, &x_feas)?,
            x: x_feas,
            objective_value: None,
            newton_steps,
        });
    };

    let x = phase_two(problem, &direct, opts, objective, &x_feas, &mut newton_steps);
    let value = dot(objective, &x);
    Ok(SdpSolution {
        status: Status::ObjectiveOptimal,
        margins: verify(problem, &x)?,
        x,
        objective_value: Some(value),
        newton_steps,
    })
}

/// Constant pencils violating their sense and `0 ≥ b > 0` rows.
fn structural_violation(problem: &SdpProblem, opts: &SolverOptions) -> Result<Option<String>, SdpError> {
    for (idx, p) in problem.pencils.iter().enumerate() {
        if !p.is_constant() {
            continue;
        }
        let margin = verify_constant(&p.constant, p.sense)?;
        let ok = match p.sense {
            Sense::NegativeDefinite => margin >= opts.margin_floor,
            Sense::PositiveSemidefinite => margin >= -PSD_TOL,
        };
        if !ok {
            return Ok(Some(format!(
                "pencil {idx} is constant and violates its sense (margin {margin:.3e})"
            )));
        }
    }
    for (idx, li) in problem.linear_inequalities.iter().enumerate() {
        if li.coeffs.iter().all(|&c| c == 0.0) && li.bound > 0.0 {
            return Ok(Some(format!("linear inequality {idx} reads 0 >= {}", li.bound)));
        }
    }
    Ok(None)
}

/// A homogeneous phase-I optimum this far under the floor cannot be turned
/// into a verified margin.
const BELOW_FLOOR_FACTOR: f64 = 0.1;
/// Cap on strict pencils in objective mode, relative to the phase-I point.
const PHASE_TWO_CEILING_FACTOR: f64 = 100.0;

fn phase_one(
    problem: &SdpProblem,
    cons: &Constraints,
    opts: &SolverOptions,
    x0: &[f64],
    newton_steps: &mut usize,
) -> Result<Vec<f64>, InfeasibleReason> {
    let n = problem.n_vars;
    // y = (x', w, t), starting from (x0, 1) scaled under the cap.
    let mut y = x0.to_vec();
    y.push(1.0);
    let top = cons.max_strict_eigenvalue(&y);
    let box_top = y[..n].iter().fold(0.0f64, |m, v| m.max(v.abs())) / (0.5 * opts.box_limit);
    let shrink = (top / 0.5).max(box_top).max(1.0);
    for v in &mut y {
        *v /= shrink;
    }
    let t0 = (cons.min_slack(&y, &[]) - 1.0).min(0.5);
    y.push(t0);

    let mut objective = vec![0.0; n + 2];
    objective[n + 1] = -1.0;
    let barrier = Barrier {
        cons,
        with_t: true,
        delta: Vec::new(),
        ceiling: 1.0,
        objective: &objective,
    };
    let nu = barrier.degree() as f64;
    let recover = |y: &[f64]| -> Option<Vec<f64>> {
        let w = y[n];
        (w > 0.0).then(|| y[..n].iter().map(|v| v / w).collect())
    };

    let mut s = 1.0;
    let mut best_slack = t0;
    let mut found: Option<Vec<f64>> = None;
    for _ in 0..opts.max_barrier_updates {
        let converged = barrier.center(&mut y, s, opts.max_newton_per_centering, newton_steps, |y| {
            if y[n + 1] <= 0.0 {
                return false;
            }
            match recover(y) {
                Some(x) if accepts(problem, &x, opts.margin_floor) => {
                    found = Some(x);
                    true
                }
                _ => false,
            }
        });
        best_slack = best_slack.max(y[n + 1]);
        if let Some(x) = found {
            return Ok(x);
        }
        if let Some(x) = recover(&y).filter(|x| accepts(problem, x, opts.margin_floor)) {
            return Ok(x);
        }
        if converged {
            let upper = y[n + 1] + nu / s;
            if upper < 0.0 {
                return Err(InfeasibleReason::NegativeMaxMargin { upper_bound: upper });
            }
            if upper < BELOW_FLOOR_FACTOR * opts.margin_floor || nu / s < 1e-13 {
                return Err(InfeasibleReason::MarginBelowFloor { best_slack });
            }
        }
        s *= opts.barrier_growth;
    }
    Err(InfeasibleReason::BudgetExhausted { best_slack })
}

fn phase_two(
    problem: &SdpProblem,
    cons: &Constraints,
    opts: &SolverOptions,
    objective: &[f64],
    x_feas: &[f64],
    newton_steps: &mut usize,
) -> Vec<f64> {
    let ceiling = PHASE_TWO_CEILING_FACTOR * (2.0 * cons.max_strict_eigenvalue(x_feas)).max(1.0);
    let mut best = x_feas.to_vec();
    let mut reference = x_feas.to_vec();
    let mut last = x_feas.to_vec();
    for _ in 0..PHASE_TWO_ROUNDS {
        let delta = phase_two_offsets(cons, opts, &best, &reference);
        if cons.min_slack(&best, &delta) <= 0.0 {
            break;
        }
        let barrier = Barrier {
            cons,
            with_t: false,
            delta,
            ceiling,
            objective,
        };
        let nu = barrier.degree() as f64;
        let mut x = best.clone();
        let mut s = 1.0 / dot(objective, objective).sqrt().max(1e-300);
        for _ in 0..opts.max_barrier_updates {
            barrier.center(&mut x, s, opts.max_newton_per_centering, newton_steps, |_| false);
            if dot(objective, &x) < dot(objective, &best) && accepts(problem, &x, opts.margin_floor) {
                best.clone_from(&x);
            }
            if nu / s <= opts.objective_tol * dot(objective, &x).abs().max(1.0) {
                break;
            }
            s *= opts.barrier_growth;
        }
        if best == x {
            return best;
        }
        // The normalisation drifted along the path: resize the offsets with
        // the end point's scale and go again from the best verified iterate.
        reference.clone_from(&x);
        last = x;
    }
    let mut theta = 1.0;
    while theta > 1e-6 {
        let candidate: Vec<f64> = best.iter().zip(&last).map(|(a, b)| a + theta * (b - a)).collect();
        if dot(objective, &candidate) < dot(objective, &best) && accepts(problem, &candidate, opts.margin_floor) {
            return candidate;
        }
        theta *= 0.5;
    }
    best
}

/// Objective-mode passes, each with offsets resized to the previous end point.
const PHASE_TWO_ROUNDS: usize = 3;

/// Per-pencil offsets approximating the normalised floor at the larger of the
/// two scales while keeping `anchor` strictly interior.
fn phase_two_offsets(cons: &Constraints, opts: &SolverOptions, anchor: &[f64], reference: &[f64]) -> Vec<f64> {
    cons.blocks
        .iter()
        .map(|b| {
            if !b.strict {
                return 0.0;
            }
            let m = b.evaluate(anchor, 0.0, 0.0);
            let scale = m.norm().max(b.evaluate(reference, 0.0, 0.0).norm());
            (0.5 * m.symmetric_eigenvalues().min()).min(1.5 * opts.margin_floor * scale)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `S(y) = K + Σ yₖ Gₖ` with the pencil sign already applied, so every block
/// must end up positive (semi)definite.
struct Block {
    strict: bool,
    constant: DMatrix<f64>,
    bases: Vec<(usize, DMatrix<f64>)>,
}

struct Lin {
    coeffs: Vec<f64>,
    bound: f64,
    /// Box rows do not participate in the common slack.
    shifted: bool,
}

struct Constraints {
    blocks: Vec<Block>,
    lins: Vec<Lin>,
    /// Number of variables (excluding the phase-I slack).
    n: usize,
}

fn dense(m: &SymMatrix, scale: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice()) * scale
}

fn unit_row(n: usize, i: usize, v: f64) -> Vec<f64> {
    let mut c = vec![0.0; n];
    c[i] = v;
    c
}

impl Constraints {
    /// Original coordinates `x`, with user bounds or the default box.
    fn direct(problem: &SdpProblem, opts: &SolverOptions) -> Self {
        let n = problem.n_vars;
        let blocks = problem
            .pencils
            .iter()
            .filter(|p| !p.is_constant())
            .map(|p| {
                let sigma = if p.sense == Sense::NegativeDefinite { -1.0 } else { 1.0 };
                let scale = sigma / p.coefficient_norm();
                Block {
                    strict: p.sense == Sense::NegativeDefinite,
                    constant: dense(&p.constant, scale),
                    bases: p.bases.iter().map(|(v, b)| (*v, dense(b, scale))).collect(),
                }
            })
            .collect();
        let mut lins = normalised_rows(problem, false);
        let bounds = problem
            .var_bounds
            .clone()
            .unwrap_or_else(|| vec![(-opts.box_limit, opts.box_limit); n]);
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let width = hi - lo;
            lins.push(Lin {
                coeffs: unit_row(n, i, 1.0 / width),
                bound: lo / width,
                shifted: false,
            });
            lins.push(Lin {
                coeffs: unit_row(n, i, -1.0 / width),
                bound: -hi / width,
                shifted: false,
            });
        }
        Self { blocks, lins, n }
    }

    /// Coordinates `(x', w)`; every constraint is homogeneous in them.
    fn homogeneous(problem: &SdpProblem, opts: &SolverOptions) -> Self {
        let n = problem.n_vars;
        let nh = n + 1;
        let blocks = problem
            .pencils
            .iter()
            .filter(|p| !p.is_constant())
            .map(|p| {
                let sigma = if p.sense == Sense::NegativeDefinite { -1.0 } else { 1.0 };
                let scale = sigma / p.coefficient_norm();
                let mut bases: Vec<(usize, DMatrix<f64>)> = p.bases.iter().map(|(v, b)| (*v, dense(b, scale))).collect();
                if !p.constant.is_zero() {
                    bases.push((n, dense(&p.constant, scale)));
                }
                Block {
                    strict: p.sense == Sense::NegativeDefinite,
                    constant: DMatrix::zeros(p.dim(), p.dim()),
                    bases,
                }
            })
            .collect();
        let mut lins = normalised_rows(problem, true);
        lins.push(Lin {
            coeffs: unit_row(nh, n, 1.0),
            bound: 0.0,
            shifted: true,
        });
        lins.push(Lin {
            coeffs: unit_row(nh, n, -1.0 / opts.box_limit),
            bound: -1.0,
            shifted: false,
        });
        match &problem.var_bounds {
            Some(bounds) => {
                for (i, &(lo, hi)) in bounds.iter().enumerate() {
                    let mut up = unit_row(nh, i, 1.0);
                    up[n] = -lo;
                    let mut down = unit_row(nh, i, -1.0);
                    down[n] = hi;
                    for mut c in [up, down] {
                        let norm = dot(&c, &c).sqrt();
                        c.iter_mut().for_each(|v| *v /= norm);
                        lins.push(Lin {
                            coeffs: c,
                            bound: 0.0,
                            shifted: false,
                        });
                    }
                }
            }
            None => {
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        lins.push(Lin {
                            coeffs: unit_row(nh, i, sign / opts.box_limit),
                            bound: -1.0,
                            shifted: false,
                        });
                    }
                }
            }
        }
        Self { blocks, lins, n: nh }
    }

    /// Largest eigenvalue over strict blocks at `y` (0 if none).
    fn max_strict_eigenvalue(&self, y: &[f64]) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.strict)
            .map(|b| b.evaluate(y, 0.0, 0.0).symmetric_eigenvalues().max())
            .fold(0.0, f64::max)
    }

    /// Smallest slack over all constraints at `y` (with per-block offsets
    /// `delta`, if given).
    fn min_slack(&self, y: &[f64], delta: &[f64]) -> f64 {
        let mut worst = f64::INFINITY;
        for (j, b) in self.blocks.iter().enumerate() {
            let d = delta.get(j).copied().unwrap_or(0.0);
            worst = worst.min(b.evaluate(y, 0.0, d).symmetric_eigenvalues().min());
        }
        for lin in &self.lins {
            worst = worst.min(dot(&lin.coeffs, &y[..self.n]) - lin.bound);
        }
        worst
    }
}

/// User inequalities normalised to unit coefficient norm; in homogeneous
/// form the bound moves onto the `w` column.
fn normalised_rows(problem: &SdpProblem, homogeneous: bool) -> Vec<Lin> {
    problem
        .linear_inequalities
        .iter()
        .filter_map(|li| {
            let scale = dot(&li.coeffs, &li.coeffs).sqrt();
            if scale == 0.0 {
                return None;
            }
            let mut coeffs: Vec<f64> = li.coeffs.iter().map(|c| c / scale).collect();
            let bound = if homogeneous {
                coeffs.push(-li.bound / scale);
                0.0
            } else {
                li.bound / scale
            };
            Some(Lin {
                coeffs,
                bound,
                shifted: true,
            })
        })
        .collect()
}

impl Block {
    /// `S(y) − (t + δ) I`.
    fn evaluate(&self, y: &[f64], t: f64, delta: f64) -> DMatrix<f64> {
        let mut m = self.constant.clone();
        for (var, b) in &self.bases {
            m += b * y[*var];
        }
        for i in 0..m.nrows() {
            m[(i, i)] -= t + delta;
        }
        m
    }

    /// `U I − S(y)`.
    fn capped(&self, y: &[f64], ceiling: f64) -> DMatrix<f64> {
        let mut m = -self.evaluate(y, 0.0, 0.0);
        for i in 0..m.nrows() {
            m[(i, i)] += ceiling;
        }
        m
    }
}

fn verify_constant(m: &SymMatrix, sense: Sense) -> Result<f64, SdpError> {
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let ev = sym_eigenvalues(m)?;
    Ok(match sense {
        Sense::NegativeDefinite => -ev[ev.len() - 1] / norm,
        Sense::PositiveSemidefinite => ev[0] / norm,
    })
}

fn log_det(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>) -> f64 {
    chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0
}

/// Adds `−tr(Q_k)` to the gradient and `tr(Q_k Q_l)` to the Hessian for
/// `Q_k = S⁻¹ G_k`.
fn accumulate(qs: &[(usize, DMatrix<f64>)], g: &mut DVector<f64>, h: &mut DMatrix<f64>) {
    for (a, (ia, qa)) in qs.iter().enumerate() {
        g[*ia] -= qa.trace();
        for (ib, qb) in qs.iter().skip(a) {
            let v = qa.component_mul(&qb.transpose()).sum();
            h[(*ia, *ib)] += v;
            if ia != ib {
                h[(*ib, *ia)] += v;
            }
        }
    }
}

/// `s · objᵀy − Σ log det Sⱼ(y) − Σ log det(U − Sⱼ(y)) − Σ log ℓᵢ(y)` over
/// `y = (vars, t)` in phase I or `y = vars` in objective mode.
struct Barrier<'a> {
    cons: &'a Constraints,
    with_t: bool,
    /// Per-block offsets (objective mode only).
    delta: Vec<f64>,
    /// Upper cap on strict blocks.
    ceiling: f64,
    objective: &'a [f64],
}

impl Barrier<'_> {
    fn dim(&self) -> usize {
        self.cons.n + usize::from(self.with_t)
    }

    fn degree(&self) -> usize {
        let blocks: usize = self
            .cons
            .blocks
            .iter()
            .map(|b| b.constant.nrows() * if b.strict { 2 } else { 1 })
            .sum();
        blocks + self.cons.lins.len() + usize::from(self.with_t)
    }

    fn t(&self, y: &[f64]) -> f64 {
        if self.with_t {
            y[self.cons.n]
        } else {
            0.0
        }
    }

    fn offset(&self, j: usize) -> f64 {
        self.delta.get(j).copied().unwrap_or(0.0)
    }

    fn lin_slack(&self, lin: &Lin, y: &[f64]) -> f64 {
        let mut v = dot(&lin.coeffs, &y[..self.cons.n]) - lin.bound;
        if lin.shifted {
            v -= self.t(y);
        }
        v
    }

    /// Barrier value, or `None` outside the domain.
    fn value(&self, y: &[f64], s: f64) -> Option<f64> {
        let mut f = s * dot(self.objective, y);
        let t = self.t(y);
        for (j, b) in self.cons.blocks.iter().enumerate() {
            f -= log_det(&b.evaluate(y, t, self.offset(j)).cholesky()?);
            if b.strict {
                f -= log_det(&b.capped(y, self.ceiling).cholesky()?);
            }
        }
        for lin in &self.cons.lins {
            let sl = self.lin_slack(lin, y);
            if sl <= 0.0 {
                return None;
            }
            f -= sl.ln();
        }
        if self.with_t {
            let cap = 1.0 - t;
            if cap <= 0.0 {
                return None;
            }
            f -= cap.ln();
        }
        Some(f)
    }

    fn gradient_hessian(&self, y: &[f64], s: f64) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let dim = self.dim();
        let n = self.cons.n;
        let mut g = DVector::from_column_slice(self.objective) * s;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let t = self.t(y);

        for (j, b) in self.cons.blocks.iter().enumerate() {
            let w = b.evaluate(y, t, self.offset(j)).cholesky()?.inverse();
            let mut qs: Vec<(usize, DMatrix<f64>)> = b.bases.iter().map(|(var, g)| (*var, &w * g)).collect();
            if self.with_t {
                qs.push((n, -w.clone()));
            }
            accumulate(&qs, &mut g, &mut h);
            if b.strict {
                let w = b.capped(y, self.ceiling).cholesky()?.inverse();
                let qs: Vec<(usize, DMatrix<f64>)> = b.bases.iter().map(|(var, g)| (*var, -(&w * g))).collect();
                accumulate(&qs, &mut g, &mut h);
            }
        }
        for lin in &self.cons.lins {
            let sl = self.lin_slack(lin, y);
            if sl <= 0.0 {
                return None;
            }
            let mut a = DVector::<f64>::zeros(dim);
            for (i, c) in lin.coeffs.iter().enumerate() {
                a[i] = *c;
            }
            if lin.shifted && self.with_t {
                a[n] = -1.0;
            }
            g -= &a / sl;
            h += &a * a.transpose() / (sl * sl);
        }
        if self.with_t {
            let cap = 1.0 - t;
            if cap <= 0.0 {
                return None;
            }
            g[n] += 1.0 / cap;
            h[(n, n)] += 1.0 / (cap * cap);
        }
        Some((g, h))
    }

    /// Damped Newton centring. Returns whether the Newton decrement fell
    /// below tolerance. `stop` is polled after each accepted step.
    fn center(
        &self,
        y: &mut Vec<f64>,
        s: f64,
        max_steps: usize,
        counter: &mut usize,
        mut stop: impl FnMut(&[f64]) -> bool,
    ) -> bool {
        let Some(mut f) = self.value(y, s) else {
            return false;
        };
        for _ in 0..max_steps {
            let Some((g, h)) = self.gradient_hessian(y, s) else {
                return false;
            };
            let step = match h.clone().cholesky() {
                Some(c) => c.solve(&(-&g)),
                None => {
                    let ridge = 1e-12 * h.diagonal().amax().max(1.0);
                    let mut hr = h;
                    for i in 0..hr.nrows() {
                        hr[(i, i)] += ridge;
                    }
                    match hr.cholesky() {
                        Some(c) => c.solve(&(-&g)),
                        None => return false,
                    }
                }
            };
            let decrement = -g.dot(&step);
            if decrement / 2.0 < 1e-10 {
                return true;
            }
            *counter += 1;

            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                if let Some(ft) = self.value(&trial, s) {
                    if ft <= f - 0.25 * alpha * decrement {
                        *y = trial;
                        f = ft;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                return true;
            }
            if stop(y) {
                return false;
            }
        }
        false
    }
}
