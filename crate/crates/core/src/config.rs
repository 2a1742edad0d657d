//! Plain-text `key = value` run configuration.
//!
//! ```text
//! # well-separated register
//! omega0 = 0
//! m = 100
//! j = 10            # or one `j_ab = a,b,value` line per pair
//! rabi = 0.1        # or four comma-separated values
//! drive = auto      # or an explicit angular frequency
//! dt = 0.01
//! method = rk4
//! initial = superposition
//! phase_dress = 0.7853981633974483
//! ```
//!
//! Also accepted: `record_every`, `phase_floor`, `threshold`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{uniform_coupling, Couplings, DriveSetting};
use crate::spin_ops::N_SPINS;
use crate::sweep::RunConfig;

/// Parses `value` or four comma-separated values.
pub fn parse_rabi(s: &str) -> Result<[f64; N_SPINS]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::arg(format!("bad Rabi amplitude '{p}'")))
        })
        .collect::<Result<Vec<f64>>>()?;
    match nums.as_slice() {
        [v] => Ok([*v; N_SPINS]),
        [a, b, c, d] => Ok([*a, *b, *c, *d]),
        _ => Err(Error::arg(format!(
            "rabi takes 1 or {N_SPINS} values, got {}",
            nums.len()
        ))),
    }
}

pub fn parse_drive(s: &str) -> Result<DriveSetting> {
    match s.trim() {
        "auto" => Ok(DriveSetting::Resonant),
        v => v
            .parse::<f64>()
            .map(DriveSetting::Fixed)
            .map_err(|_| Error::arg(format!("bad drive '{v}' (auto or a number)"))),
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, RunConfig::default())
}

/// Applies the settings in `text` on top of `base`.
pub fn parse_config(text: &str, base: RunConfig) -> Result<RunConfig> {
    let mut cfg = base;
    let mut uniform_j: Option<f64> = None;
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| Error::Config {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| err(format!("'{key}' expects a number, got '{v}'")))
        };
        let wrap = |e: Error| err(e.to_string());
        match key {
            "omega0" => cfg.model.omega0 = num(value)?,
            "m" => cfg.model.m = num(value)?,
            "j" => uniform_j = Some(num(value)?),
            "j_ab" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                let [a, b, v] = parts.as_slice() else {
                    return Err(err("j_ab expects 'a,b,value'".into()));
                };
                let idx = |s: &str| -> Result<usize> {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&k| k < N_SPINS)
                        .ok_or_else(|| err(format!("bad spin index '{s}'")))
                };
                let (a, b) = (idx(a)?, idx(b)?);
                if a == b {
                    return Err(err("j_ab needs two distinct spins".into()));
                }
                pairs.push((a, b, num(v)?));
            }
            "rabi" => cfg.model.rabi = parse_rabi(value).map_err(wrap)?,
            "drive" => cfg.model.drive = parse_drive(value).map_err(wrap)?,
            "dt" => cfg.evolution = cfg.evolution.with_dt(num(value)?).map_err(wrap)?,
            "method" => cfg.evolution = cfg.evolution.with_method(value.parse().map_err(wrap)?),
            "record_every" => {
                let k = value
                    .parse::<usize>()
                    .map_err(|_| err(format!("record_every expects an integer, got '{value}'")))?;
                cfg.evolution = cfg.evolution.with_record_every(k);
            }
            "initial" => cfg.initial = value.parse().map_err(wrap)?,
            "phase_dress" => cfg.phase_dress = num(value)?,
            "phase_floor" => cfg.phase_floor = num(value)?,
            "threshold" => cfg.threshold = num(value)?,
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }

    if !pairs.is_empty() {
        let mut c = uniform_coupling(uniform_j.unwrap_or(0.0));
        for (a, b, v) in pairs {
            c[a][b] = v;
            c[b][a] = v;
        }
        cfg.model.couplings = Couplings::General(c);
    } else if let Some(j) = uniform_j {
        cfg.model.couplings = Couplings::Uniform(j);
    }
    cfg.validate()?;
    Ok(cfg)
}
