//! The four subcommands. Each returns the files it wrote.

use std::path::PathBuf;

use rayon::prelude::*;
use stickslip_core::simulator::{assess_regime, RegimeReport};
use stickslip_core::{
    certify_attractor, certify_gas, detect_cycle, find_gas_threshold, maximize_basin, simulate, AttractorCertificate,
    BasinCertificate, Error, GasCertificate, Mode, ReplayReport, SymMat2,
};
use thiserror::Error;

use crate::config::RunConfig;
use crate::output::{append_csv, num, write_csv};

/// Boundary points written per ellipse.
const ELLIPSE_POINTS: usize = 256;
const REPLAY_SAMPLES: usize = 200;
const INCLUSION_SAMPLES: usize = 500;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    /// 2 bad input, 3 not certified, 4 precondition rejected, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Usage(_) => 2,
            CommandError::Core(Error::InvalidParams(_)) => 2,
            CommandError::Core(e) if e.is_precondition() => 4,
            CommandError::Core(Error::NotCertified(_)) => 3,
            CommandError::Core(_) | CommandError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Attractor,
    Basin,
    Gas,
}

impl Which {
    fn name(self) -> &'static str {
        match self {
            Which::Attractor => "attractor",
            Which::Basin => "basin",
            Which::Gas => "gas",
        }
    }
}

type Rows = Vec<Vec<String>>;

fn kv(key: impl Into<String>, value: String) -> Vec<String> {
    vec![key.into(), value]
}

pub fn roots(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let rows: Rows = match cfg.params.hurwitz_interval() {
        Some((lo, hi)) => {
            println!("v_ref1 = {lo:.6}\nv_ref2 = {hi:.6}");
            vec![kv("v_ref1", num(lo)), kv("v_ref2", num(hi))]
        }
        None => {
            println!("no unstable interval: the linearisation is Hurwitz for every v_ref > 0");
            vec![kv("interval", "none".into())]
        }
    };
    Ok(vec![write_csv(&cfg.output_dir, "roots.csv", &["name", "value"], rows)?])
}

fn matrix_rows(prefix: &str, p: &SymMat2) -> Rows {
    vec![
        kv(format!("{prefix}p11"), num(p.a)),
        kv(format!("{prefix}p12"), num(p.b)),
        kv(format!("{prefix}p22"), num(p.c)),
    ]
}

fn replay_rows(prefix: &str, r: &ReplayReport) -> Rows {
    vec![
        kv(format!("{prefix}replay_samples"), r.samples.to_string()),
        kv(format!("{prefix}replay_failures"), r.failures.to_string()),
        kv(format!("{prefix}replay_worst"), num(r.worst)),
    ]
}

fn margin_rows(prefix: &str, margins: &[f64]) -> Rows {
    margins
        .iter()
        .enumerate()
        .map(|(i, m)| kv(format!("{prefix}margin_{i}"), num(*m)))
        .collect()
}

fn attractor_rows(cfg: &RunConfig, prefix: &str, c: &AttractorCertificate) -> Result<Rows, CommandError> {
    let mut rows = matrix_rows(prefix, &c.p_g);
    rows.push(kv(format!("{prefix}eta"), num(c.eta)));
    for (i, t) in c.tau.iter().enumerate() {
        rows.push(kv(format!("{prefix}tau{i}"), num(*t)));
    }
    rows.extend(margin_rows(prefix, &c.margins));
    rows.push(kv(format!("{prefix}verified"), c.verify(&cfg.params)?.to_string()));
    rows.extend(replay_rows(prefix, &c.replay(&cfg.params, REPLAY_SAMPLES, cfg.seed)?));
    Ok(rows)
}

fn basin_rows(cfg: &RunConfig, prefix: &str, c: &BasinCertificate) -> Result<Rows, CommandError> {
    let mut rows = matrix_rows(prefix, &c.p_l);
    rows.push(kv(format!("{prefix}eta"), num(c.eta)));
    rows.push(kv(format!("{prefix}r_l"), num(c.r_l)));
    rows.push(kv(format!("{prefix}lambda"), num(c.lambda)));
    rows.push(kv(format!("{prefix}lambda_min"), num(c.lambda_min)));
    rows.push(kv(format!("{prefix}tau"), num(c.tau)));
    rows.extend(margin_rows(prefix, &c.margins));
    rows.push(kv(format!("{prefix}verified"), c.verify(&cfg.params)?.to_string()));
    rows.extend(replay_rows(prefix, &c.replay(&cfg.params, REPLAY_SAMPLES, cfg.seed)?));
    Ok(rows)
}

fn gas_rows(cfg: &RunConfig, c: &GasCertificate) -> Result<Rows, CommandError> {
    let mut rows = vec![kv("mode", format!("{:?}", c.mode))];
    rows.extend(attractor_rows(cfg, "attractor_", &c.attractor)?);
    rows.extend(basin_rows(cfg, "basin_", &c.basin)?);
    rows.push(kv("inclusion_margin", num(c.inclusion_margin)));
    rows.push(kv("verified", c.verify(&cfg.params)?.to_string()));
    rows.extend(replay_rows("inclusion_", &c.inclusion_replay(INCLUSION_SAMPLES, cfg.seed)));
    Ok(rows)
}

fn ellipse_rows(set: &str, p: &SymMat2) -> Rows {
    p.ellipse_boundary(ELLIPSE_POINTS)
        .into_iter()
        .map(|e| vec![set.to_string(), num(e.x()), num(e.y())])
        .collect()
}

pub fn certify(cfg: &RunConfig, which: Which) -> Result<Vec<PathBuf>, CommandError> {
    let p = &cfg.params;
    let v_ref = cfg.v_ref;
    let (mut rows, ellipses): (Rows, Vec<(&str, SymMat2)>) = match which {
        Which::Attractor => {
            let c = certify_attractor(p, v_ref)?;
            println!("attractor certified at v_ref = {v_ref}: eta = {:.6e}, tau0 = {:.4}", c.eta, c.tau0());
            (attractor_rows(cfg, "", &c)?, vec![("attractor", c.p_g)])
        }
        Which::Basin => {
            let c = maximize_basin(p, v_ref)?;
            println!("basin certified at v_ref = {v_ref}: eta = {:.6e}, r_l = {:.4}", c.eta, c.r_l);
            (basin_rows(cfg, "", &c)?, vec![("basin", c.p_l)])
        }
        Which::Gas => {
            let c = certify_gas(p, v_ref)?;
            println!(
                "global stability certified at v_ref = {v_ref}: inclusion margin = {:.6e}",
                c.inclusion_margin
            );
            (gas_rows(cfg, &c)?, vec![("attractor", c.attractor.p_g), ("basin", c.basin.p_l)])
        }
    };
    rows.insert(0, kv("v_ref", num(v_ref)));
    rows.insert(0, kv("which", which.name().into()));
    let cert = write_csv(
        &cfg.output_dir,
        &format!("certificate_{}.csv", which.name()),
        &["key", "value"],
        rows,
    )?;
    let ellipse = write_csv(
        &cfg.output_dir,
        &format!("ellipse_{}.csv", which.name()),
        &["set", "eps1", "eps2"],
        ellipses.iter().flat_map(|(set, p)| ellipse_rows(set, p)),
    )?;
    Ok(vec![cert, ellipse])
}

pub fn simulate_cmd(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let traj = simulate(&cfg.params, cfg.v_ref, &cfg.sim)?;
    let report = detect_cycle(&cfg.params, &traj, cfg.v_ref, &cfg.sim)?;
    let rows = traj.samples.iter().map(|s| {
        let mode = match s.mode {
            Mode::Slip => "0",
            Mode::Stick => "1",
        };
        vec![num(s.t), num(s.v), num(s.z), mode.to_string()]
    });
    let trajectory = write_csv(&cfg.output_dir, "trajectory.csv", &["t", "v", "z", "mode"], rows)?;
    let outcome = if report.detected {
        "cycle"
    } else if report.converged {
        "converged"
    } else {
        "inconclusive"
    };
    println!(
        "{outcome}: period = {:.4} s, amplitude = {:.4} m/s, final error = {:.3e}",
        report.period, report.amplitude, report.final_error_norm
    );
    let cycle = append_csv(
        &cfg.output_dir,
        "cycle_report.csv",
        &[
            "v_ref",
            "v0",
            "z0",
            "dt",
            "T",
            "outcome",
            "detected",
            "period",
            "amplitude",
            "converged",
            "final_error_norm",
        ],
        [vec![
            num(cfg.v_ref),
            num(cfg.sim.v0),
            num(cfg.sim.z0),
            num(cfg.sim.dt),
            num(cfg.sim.t_end),
            outcome.to_string(),
            report.detected.to_string(),
            num(report.period),
            num(report.amplitude),
            report.converged.to_string(),
            num(report.final_error_norm),
        ]],
    )?;
    Ok(vec![trajectory, cycle])
}

fn sweep_row(r: &RegimeReport) -> Vec<String> {
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    vec![
        num(r.v_ref),
        r.regime.to_string(),
        opt(r.basin.as_ref().map(|b| b.eta)),
        opt(r.attractor.as_ref().map(|a| a.eta)),
        r.gas.is_some().to_string(),
    ]
}

/// Per-row regimes, then (if any speed lies above the unstable zone) the
/// certified-GAS threshold as a final `gas-threshold` row. Rows that fail
/// are written as `failed` and make the command exit non-zero.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CommandError> {
    let grid = match &cfg.sweep {
        Some(spec) => spec.grid().map_err(|e| CommandError::Usage(e.to_string()))?,
        None => vec![cfg.v_ref],
    };
    if grid.is_empty() {
        return Err(CommandError::Usage("sweep grid is empty".into()));
    }
    let p = &cfg.params;
    let results: Vec<Result<RegimeReport, Error>> = grid.par_iter().map(|&v| assess_regime(p, v)).collect();
    let mut rows = Vec::with_capacity(grid.len() + 1);
    let mut failed = 0;
    for (v, r) in grid.iter().zip(&results) {
        match r {
            Ok(r) => {
                println!("v_ref = {v}: {}", r.regime);
                rows.push(sweep_row(r));
            }
            Err(e) => {
                eprintln!("v_ref = {v}: {e}");
                failed += 1;
                rows.push(vec![num(*v), "failed".into(), String::new(), String::new(), String::new()]);
            }
        }
    }
    let v2 = p.hurwitz_interval().map_or(0.0, |(_, hi)| hi);
    if grid.iter().any(|&v| v > v2) {
        match find_gas_threshold(p, cfg.gas_v_lo.max(v2 * (1.0 + 1e-9)), cfg.gas_v_hi, cfg.gas_tol) {
            Ok(t) => {
                println!("certified global stability from v_ref = {t:.4}");
                rows.push(vec![num(t), "gas-threshold".into(), String::new(), String::new(), "true".into()]);
            }
            Err(e) => {
                eprintln!("threshold search: {e}");
                failed += 1;
                rows.push(vec![String::new(), "gas-threshold".into(), String::new(), String::new(), "failed".into()]);
            }
        }
    }
    let path = write_csv(
        &cfg.output_dir,
        "sweep.csv",
        &["v_ref", "regime", "basin_eta", "attractor_eta", "gas"],
        rows,
    )?;
    if failed > 0 {
        return Err(CommandError::Core(Error::NotCertified(format!(
            "{failed} sweep row(s) did not complete; see {}",
            path.display()
        ))));
    }
    Ok(vec![path])
}
