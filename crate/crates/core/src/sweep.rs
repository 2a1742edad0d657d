//! Single pulse runs, parameter sweeps and critical-value detection.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolve::{integrate, pi_pulse_duration, EvolutionConfig, Trajectory};
use crate::metrics::{deviation_report, DeviationReport, DEFAULT_PHASE_FLOOR};
use crate::model::{cn_detuning, Couplings, DriveSetting, ModelConfig, SystemParams};
use crate::spin_ops::DIM;
use crate::state::{DensityMatrix, InitialState};

/// Default threshold on `max_amp` for [`find_critical`].
pub const DEFAULT_THRESHOLD: f64 = 0.02;

const RESONANCE_TOL: f64 = 1e-9;

/// Diagonal and off-diagonal elements plotted as time series by default.
pub const DEFAULT_ELEMENTS: [(usize, usize); 10] = [
    (0, 0),
    (1, 1),
    (2, 2),
    (3, 3),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 2),
    (1, 3),
    (2, 3),
];

/// How grid points are scheduled. Without the `parallel` feature both
/// variants run sequentially.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `items`, returning results in input order.
pub fn map_ordered<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => parallel_map(items, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Everything needed for one pulse run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub initial: InitialState,
    pub phase_dress: f64,
    pub evolution: EvolutionConfig,
    pub phase_floor: f64,
    /// `(i, j)` elements written to the time-series CSV.
    pub elements: Vec<(usize, usize)>,
    pub threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig::default(),
            initial: InitialState::Superposition,
            phase_dress: FRAC_PI_4,
            evolution: EvolutionConfig::default().with_record_every(10),
            phase_floor: DEFAULT_PHASE_FLOOR,
            elements: DEFAULT_ELEMENTS.to_vec(),
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&(i, j)) = self.elements.iter().find(|(i, j)| *i >= DIM || *j >= DIM) {
            return Err(Error::arg(format!("element ({i},{j}) out of range")));
        }
        if !(self.phase_floor > 0.0) {
            return Err(Error::arg("phase floor must be positive"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::arg("threshold must be positive"));
        }
        if !self.phase_dress.is_finite() {
            return Err(Error::arg("phase dress must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SingleRun {
    pub params: SystemParams,
    pub initial: DensityMatrix,
    pub tau: f64,
    pub trajectory: Trajectory,
    pub report: DeviationReport,
}

/// Evolves the configured initial state through one pi-pulse of length
/// `pi / Omega_0`, recording snapshots per `cfg.evolution`.
pub fn run_single(cfg: &RunConfig) -> Result<SingleRun> {
    cfg.validate()?;
    let params = cfg.model.build()?;
    let initial = cfg.initial.build(&params, cfg.phase_dress)?;
    let tau = pi_pulse_duration(&params, 0)?;
    cfg.evolution.check_resolution(&params);
    let trajectory = integrate(&initial, &params, tau, &cfg.evolution)?;
    let report = deviation_report(
        &initial,
        trajectory.final_state(),
        &params,
        tau,
        cfg.phase_floor,
    )?;
    Ok(SingleRun {
        params,
        initial,
        tau,
        trajectory,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    /// Qubit frequency spacing, `w_k = w_0 + M k`.
    M,
    /// Uniform Ising coupling.
    J,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "M" | "m" => Ok(SweepVariable::M),
            "J" | "j" => Ok(SweepVariable::J),
            other => Err(Error::arg(format!(
                "unknown sweep variable '{other}' (M or J)"
            ))),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::M => "M",
            SweepVariable::J => "J",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    variable: SweepVariable,
    values: Vec<f64>,
    base: RunConfig,
}

impl SweepSpec {
    /// `values` must be non-empty and strictly monotone. Each point uses
    /// `base` with the swept parameter replaced and the drive re-tuned to
    /// the `|0> <-> |1>` resonance.
    pub fn new(variable: SweepVariable, values: Vec<f64>, base: RunConfig) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::arg("sweep needs at least one grid value"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("sweep grid values must be finite"));
        }
        let up = values.windows(2).all(|w| w[1] > w[0]);
        let down = values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::arg("sweep grid must be strictly monotone"));
        }
        base.validate()?;
        Ok(SweepSpec {
            variable,
            values,
            base,
        })
    }

    pub fn variable(&self) -> SweepVariable {
        self.variable
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base(&self) -> &RunConfig {
        &self.base
    }

    /// Resolved parameters at one grid value.
    pub fn params_at(&self, grid: f64) -> Result<SystemParams> {
        let mut model = self.base.model.clone();
        match self.variable {
            SweepVariable::M => model.m = grid,
            SweepVariable::J => model.couplings = Couplings::Uniform(grid),
        }
        model.drive = DriveSetting::Resonant;
        model.build()
    }
}

/// `n` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n)
            .map(|k| from + (to - from) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Upper-triangle `(i, j)` pairs with `i <= j`, in CSV column order.
pub fn upper_triangle() -> impl Iterator<Item = (usize, usize)> {
    (0..DIM).flat_map(|i| (i..DIM).map(move |j| (i, j)))
}

/// One CSV record of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub grid: f64,
    pub tau: f64,
    pub max_amp: f64,
    pub max_phase: f64,
    /// `Delta_ij` in [`upper_triangle`] order.
    pub amp: Vec<f64>,
    /// `delta_ij` in [`upper_triangle`] order; `None` where masked.
    pub phase: Vec<Option<f64>>,
}

impl SweepRow {
    pub fn from_report(grid: f64, report: &DeviationReport) -> Self {
        SweepRow {
            grid,
            tau: report.tau,
            max_amp: report.max_amp,
            max_phase: report.max_phase,
            amp: upper_triangle()
                .map(|(i, j)| report.amp.get(i, j))
                .collect(),
            phase: upper_triangle()
                .map(|(i, j)| report.phase.get(i, j))
                .collect(),
        }
    }

    pub fn amp_at(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.amp[triangle_index(i, j)]
    }

    /// Largest `Delta_ij` over the active-state block `i, j < 4`.
    pub fn active_block_max_amp(&self) -> f64 {
        upper_triangle()
            .zip(&self.amp)
            .filter(|((i, j), _)| *i < 4 && *j < 4)
            .map(|(_, &a)| a)
            .fold(0.0, f64::max)
    }

    /// Worst amplitude deviation and its `(i, j)` position.
    pub fn worst_amp(&self) -> (usize, usize, f64) {
        upper_triangle()
            .zip(&self.amp)
            .fold((0, 0, f64::NEG_INFINITY), |best, ((i, j), &a)| {
                if a > best.2 {
                    (i, j, a)
                } else {
                    best
                }
            })
    }
}

fn triangle_index(i: usize, j: usize) -> usize {
    // rows r < i hold DIM - r entries each
    i * DIM - i * (i + 1) / 2 + j
}

fn run_point(spec: &SweepSpec, grid: f64) -> Result<SweepRow> {
    let params = spec.params_at(grid)?;
    let detuning = cn_detuning(&params);
    if detuning.abs() > RESONANCE_TOL * (1.0 + params.drive().abs()) {
        return Err(Error::NotResonant { detuning });
    }
    let base = &spec.base;
    let initial = base.initial.build(&params, base.phase_dress)?;
    let tau = pi_pulse_duration(&params, 0)?;
    let cfg = base.evolution.with_record_every(0);
    let last = integrate(&initial, &params, tau, &cfg)?.into_final_state();
    let report = deviation_report(&initial, &last, &params, tau, base.phase_floor)?;
    Ok(SweepRow::from_report(grid, &report))
}

/// Runs every grid point and returns rows in grid order. The first failing
/// point (in grid order) aborts the sweep.
pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    // the driven frequency spread grows with |M| and |J|
    let widest = spec
        .values
        .iter()
        .copied()
        .fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
    if let Ok(p) = spec.params_at(widest) {
        spec.base.evolution.check_resolution(&p);
    }
    map_ordered(&spec.values, exec, |&g| {
        run_point(spec, g).map_err(|e| Error::SweepPoint {
            grid: g,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect()
}

/// Grid value at which `max_amp` first reaches `threshold`, walking from
/// the largest grid value (the well-separated end) towards the smallest.
/// The crossing is linearly interpolated between the bracketing points.
/// Returns `Some(largest grid value)` if the first point already exceeds the
/// threshold and `None` if no point does.
pub fn find_critical(rows: &[SweepRow], threshold: f64) -> Result<Option<f64>> {
    find_critical_by(rows, threshold, |r| r.max_amp)
}

/// [`find_critical`] on an arbitrary per-row metric.
pub fn find_critical_by(
    rows: &[SweepRow],
    threshold: f64,
    metric: impl Fn(&SweepRow) -> f64,
) -> Result<Option<f64>> {
    if rows.len() < 2 {
        return Err(Error::arg("critical-value search needs at least two rows"));
    }
    if !(threshold > 0.0) {
        return Err(Error::arg("threshold must be positive"));
    }
    let mut order: Vec<&SweepRow> = rows.iter().collect();
    order.sort_by(|a, b| b.grid.total_cmp(&a.grid));
    if order.windows(2).any(|w| w[0].grid == w[1].grid) {
        return Err(Error::arg("sweep grid has repeated values"));
    }
    if metric(order[0]) >= threshold {
        return Ok(Some(order[0].grid));
    }
    for w in order.windows(2) {
        let (safe, next) = (w[0], w[1]);
        let (a0, a1) = (metric(safe), metric(next));
        if a1 >= threshold {
            let frac = (threshold - a0) / (a1 - a0);
            return Ok(Some(safe.grid + frac * (next.grid - safe.grid)));
        }
    }
    Ok(None)
}
