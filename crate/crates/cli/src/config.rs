//! Run configuration: a flat JSON object whose keys mirror the physical
//! parameters plus the run settings. Missing keys take the reference
//! values; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use stickslip_core::{PhysicalParams, SimConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Sweep grid: an explicit list or `"lo:hi:n"` (log-spaced, endpoints
/// included).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SweepSpec {
    List(Vec<f64>),
    Range(String),
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let grid = match self {
            SweepSpec::List(v) => v.clone(),
            SweepSpec::Range(s) => parse_range(s)?,
        };
        if let Some(bad) = grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(ConfigError::Invalid(format!("sweep speed {bad} is not strictly positive")));
        }
        Ok(grid)
    }
}

fn parse_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError::Invalid(format!("sweep range {s:?} is not of the form lo:hi:n"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo) {
        return Err(bad());
    }
    Ok(match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo * ((hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub m: f64,
    pub g: f64,
    pub v_s: f64,
    #[serde(rename = "mu_C")]
    pub mu_c: f64,
    #[serde(rename = "mu_S")]
    pub mu_s: f64,
    pub k: f64,
    pub k_v: f64,
    pub l0: f64,
    #[serde(rename = "xA0")]
    pub xa0: f64,
    pub v_ref: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub v0: f64,
    pub z0: f64,
    pub stick_tol: Option<f64>,
    pub transient_skip: f64,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
    /// Threshold search bracket and tolerance for `sweep`.
    pub gas_v_lo: f64,
    pub gas_v_hi: f64,
    pub gas_tol: f64,
}

impl Default for RawConfig {
    fn default() -> Self {
        let p = PhysicalParams::table1();
        Self {
            m: p.m,
            g: p.g,
            v_s: p.v_s,
            mu_c: p.mu_c,
            mu_s: p.mu_s,
            k: p.k,
            k_v: p.k_v,
            l0: p.l0,
            xa0: p.xa0,
            v_ref: 1.0,
            dt: 1e-3,
            t_end: 40.0,
            v0: 6.0,
            z0: 0.0,
            stick_tol: None,
            transient_skip: 0.25,
            output_dir: None,
            seed: 0,
            sweep: None,
            gas_v_lo: 1.3,
            gas_v_hi: 20.0,
            gas_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub v_ref: f64,
    pub sim: SimConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
    pub gas_v_lo: f64,
    pub gas_v_hi: f64,
    pub gas_tol: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let raw: RawConfig = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let params = PhysicalParams {
            m: raw.m,
            g: raw.g,
            v_s: raw.v_s,
            mu_c: raw.mu_c,
            mu_s: raw.mu_s,
            k: raw.k,
            k_v: raw.k_v,
            l0: raw.l0,
            xa0: raw.xa0,
        };
        params.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut sim = SimConfig::new(&params, raw.v0, raw.z0);
        sim.dt = raw.dt;
        sim.t_end = raw.t_end;
        sim.transient_skip = raw.transient_skip;
        if let Some(tol) = raw.stick_tol {
            sim.stick_tol = tol;
        }
        sim.validate(&params).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(raw.v_ref > 0.0 && raw.v_ref.is_finite()) {
            return Err(ConfigError::Invalid(format!("v_ref = {} must be strictly positive", raw.v_ref)));
        }
        if !(raw.gas_tol > 0.0 && raw.gas_v_hi > raw.gas_v_lo && raw.gas_v_lo > 0.0) {
            return Err(ConfigError::Invalid("need 0 < gas_v_lo < gas_v_hi and gas_tol > 0".into()));
        }
        Ok(Self {
            params,
            v_ref: raw.v_ref,
            sim,
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from(".")),
            seed: raw.seed,
            sweep: raw.sweep,
            gas_v_lo: raw.gas_v_lo,
            gas_v_hi: raw.gas_v_hi,
            gas_tol: raw.gas_tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig, String> {
        let raw: RawConfig = serde_json::from_str(s).map_err(|e| e.to_string())?;
        RunConfig::from_raw(raw).map_err(|e| e.to_string())
    }

    #[test]
    fn empty_object_gives_reference_values() {
        let c = parse("{}").unwrap();
        assert_eq!(c.params, PhysicalParams::table1());
        assert_eq!(c.sim.dt, 1e-3);
        assert_eq!(c.sim.t_end, 40.0);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse(r#"{"k_vv": 2}"#).unwrap_err();
        assert!(err.contains("k_vv"), "{err}");
    }

    #[test]
    fn invariants_are_checked() {
        assert!(parse(r#"{"mu_S": 0.1}"#).is_err());
        assert!(parse(r#"{"T": 1e-4}"#).is_err());
        assert!(parse(r#"{"v_ref": 0}"#).is_err());
    }

    #[test]
    fn sweep_forms() {
        let c = parse(r#"{"sweep": [0.07, 1, 1.45, 10]}"#).unwrap();
        assert_eq!(c.sweep.unwrap().grid().unwrap(), vec![0.07, 1.0, 1.45, 10.0]);
        let g = parse(r#"{"sweep": "1:100:3"}"#).unwrap().sweep.unwrap().grid().unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12 && g.len() == 3);
        assert!(parse(r#"{"sweep": "1:100"}"#).unwrap().sweep.unwrap().grid().is_err());
    }
}
