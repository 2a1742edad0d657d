//! Time evolution of the interaction-picture deviation matrix.
//!
//! The integrator solves `d rho''/dt = -i [V''(t), rho'']` with fixed-step
//! classical RK4. The oracle propagates exactly in the rotating frame, where
//! the Hamiltonian is static, and maps the result back to the interaction
//! picture.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{cn_detuning, rotating_frame, rotating_hamiltonian, EnergyTable, SystemParams};
use crate::spin_ops::{ComplexMatrix, HermitianEigen, DIM};
use crate::state::{DensityMatrix, Picture};

/// Recommended upper bound on `dt * max |E'_j - E'_k|` over driven pairs.
pub const RESOLUTION_LIMIT: f64 = 0.1;

const INPUT_HERMITIAN_TOL: f64 = 1e-10;
const RESONANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    /// Exact propagator, sampled on the same time grid as RK4.
    ExpmOracle,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rk4" => Ok(Method::Rk4),
            "expm" | "expm-oracle" => Ok(Method::ExpmOracle),
            other => Err(Error::arg(format!(
                "unknown method '{other}' (rk4 or expm)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::ExpmOracle => "expm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionConfig {
    dt: f64,
    method: Method,
    record_every: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            dt: 0.01,
            method: Method::Rk4,
            record_every: 0,
        }
    }
}

impl EvolutionConfig {
    /// `record_every = 0` keeps only the final state.
    pub fn new(dt: f64, method: Method, record_every: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::arg(format!("time step must be positive, got {dt}")));
        }
        Ok(EvolutionConfig {
            dt,
            method,
            record_every,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    pub fn with_dt(self, dt: f64) -> Result<Self> {
        Self::new(dt, self.method, self.record_every)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_record_every(mut self, record_every: usize) -> Self {
        self.record_every = record_every;
        self
    }

    /// `dt * max |E'_j - E'_k|` over pairs coupled by the drive. Logs a
    /// warning above [`RESOLUTION_LIMIT`].
    pub fn check_resolution(&self, p: &SystemParams) -> f64 {
        let r = self.dt * DriveTerms::new(p).max_frequency();
        if r > RESOLUTION_LIMIT && self.method == Method::Rk4 {
            log::warn!(
                "dt = {} gives dt * max|E'_j - E'_k| = {r:.3} > {RESOLUTION_LIMIT}; \
                 fast phases of V'' are under-resolved",
                self.dt
            );
        }
        r
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    fn push(&mut self, t: f64, rho: DensityMatrix) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.states.push(rho);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(&self.states)
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds at least the final state")
    }

    pub fn into_final_state(mut self) -> DensityMatrix {
        self.states
            .pop()
            .expect("trajectory holds at least the final state")
    }
}

/// `pi / Omega_target`.
pub fn pi_pulse_duration(p: &SystemParams, target: usize) -> Result<f64> {
    let rabi = p
        .rabi()
        .get(target)
        .copied()
        .ok_or_else(|| Error::arg(format!("target qubit {target} out of range")))?;
    if !(rabi > 0.0) {
        return Err(Error::arg(format!(
            "qubit {target} has zero Rabi amplitude"
        )));
    }
    Ok(PI / rabi)
}

/// Nonzero entries of `V'` with their interaction-picture angular frequency.
#[derive(Clone, Debug)]
struct DriveTerms {
    terms: Vec<(usize, usize, Complex64, f64)>,
}

impl DriveTerms {
    fn new(p: &SystemParams) -> Self {
        let (energies, vprime) = rotating_frame(p);
        Self::from_parts(&energies, &vprime)
    }

    fn from_parts(energies: &EnergyTable, vprime: &ComplexMatrix) -> Self {
        let e = &energies.values;
        let mut terms = Vec::new();
        for r in 0..DIM {
            for c in 0..DIM {
                let v = vprime[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    terms.push((r, c, v, e[r] - e[c]));
                }
            }
        }
        DriveTerms { terms }
    }

    fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.3.abs()).fold(0.0, f64::max)
    }

    fn at(&self, t: f64, out: &mut Vec<(usize, usize, Complex64)>) {
        out.clear();
        out.extend(
            self.terms
                .iter()
                .map(|&(r, c, v, w)| (r, c, v * Complex64::from_polar(1.0, w * t))),
        );
    }
}

/// `out = -i [V, rho]` with `V` given as sparse entries.
fn liouvillian(v: &[(usize, usize, Complex64)], rho: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
    for &(r, k, val) in v {
        // (V rho)[r][:] += V[r][k] rho[k][:]
        let src = &rho[k * DIM..(k + 1) * DIM];
        let dst = &mut out[r * DIM..(r + 1) * DIM];
        for (d, s) in dst.iter_mut().zip(src) {
            *d += val * s;
        }
    }
    for &(k, c, val) in v {
        // (rho V)[:][c] -= rho[:][k] V[k][c]
        for row in 0..DIM {
            out[row * DIM + c] -= rho[row * DIM + k] * val;
        }
    }
    let minus_i = Complex64::new(0.0, -1.0);
    out.iter_mut().for_each(|x| *x *= minus_i);
}

struct Rk4Workspace {
    v: Vec<(usize, usize, Complex64)>,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4Workspace {
    fn new() -> Self {
        let z = || vec![Complex64::new(0.0, 0.0); DIM * DIM];
        Rk4Workspace {
            v: Vec::new(),
            k: [z(), z(), z(), z()],
            tmp: z(),
        }
    }

    fn step(&mut self, drive: &DriveTerms, t: f64, h: f64, rho: &mut ComplexMatrix) {
        let y = rho.as_mut_slice();
        drive.at(t, &mut self.v);
        liouvillian(&self.v, y, &mut self.k[0]);

        drive.at(t + 0.5 * h, &mut self.v);
        axpy(&mut self.tmp, y, 0.5 * h, &self.k[0]);
        liouvillian(&self.v, &self.tmp, &mut self.k[1]);
        axpy(&mut self.tmp, y, 0.5 * h, &self.k[1]);
        liouvillian(&self.v, &self.tmp, &mut self.k[2]);

        drive.at(t + h, &mut self.v);
        axpy(&mut self.tmp, y, h, &self.k[2]);
        liouvillian(&self.v, &self.tmp, &mut self.k[3]);

        let w = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]) * w;
        }
        rho.symmetrize();
    }
}

/// `out = y + a x`
fn axpy(out: &mut [Complex64], y: &[Complex64], a: f64, x: &[Complex64]) {
    for ((o, yi), xi) in out.iter_mut().zip(y).zip(x) {
        *o = yi + xi * a;
    }
}

/// Step count and last-step length for a fixed `dt` ending exactly at `t_end`.
fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    let ratio = t_end / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        (rounded as usize, dt)
    } else {
        let n = ratio.ceil() as usize;
        (n, t_end - (n - 1) as f64 * dt)
    }
}

fn check_inputs(rho0: &DensityMatrix, t_end: f64) -> Result<()> {
    rho0.require_picture(Picture::Interaction)?;
    rho0.matrix().require_hermitian(INPUT_HERMITIAN_TOL)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::arg(format!(
            "end time must be positive, got {t_end}"
        )));
    }
    Ok(())
}

/// Evolves `rho0` from `t = 0` to `t_end` and returns the recorded snapshots.
///
/// With [`Method::Rk4`] this is fixed-step RK4 with `V''` evaluated at the
/// substep times, the last step shortened to land on `t_end`, and the state
/// re-symmetrised after every step. With [`Method::ExpmOracle`] the same time
/// grid is sampled from [`ExactPropagator`].
pub fn integrate(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t_end: f64,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    check_inputs(rho0, t_end)?;
    let (n, last_h) = step_plan(t_end, cfg.dt);
    let record = |i: usize| i == n || (cfg.record_every > 0 && i % cfg.record_every == 0);
    let time_of = |i: usize| if i == n { t_end } else { i as f64 * cfg.dt };

    let mut traj = Trajectory::default();
    match cfg.method {
        Method::Rk4 => {
            let drive = DriveTerms::new(p);
            let mut ws = Rk4Workspace::new();
            let mut rho = rho0.matrix().clone();
            rho.symmetrize();
            if cfg.record_every > 0 {
                traj.push(
                    0.0,
                    DensityMatrix::from_parts(rho.clone(), Picture::Interaction),
                );
            }
            for i in 0..n {
                let h = if i + 1 == n { last_h } else { cfg.dt };
                ws.step(&drive, i as f64 * cfg.dt, h, &mut rho);
                if record(i + 1) {
                    traj.push(
                        time_of(i + 1),
                        DensityMatrix::from_parts(rho.clone(), Picture::Interaction),
                    );
                }
            }
        }
        Method::ExpmOracle => {
            let prop = ExactPropagator::new(p)?;
            if cfg.record_every > 0 {
                traj.push(0.0, rho0.clone());
            }
            for i in (1..=n).filter(|&i| record(i)) {
                let t = time_of(i);
                traj.push(t, prop.propagate(rho0, t)?);
            }
        }
    }
    Ok(traj)
}

/// Exact evolution under the static rotating-frame Hamiltonian, reusing one
/// eigendecomposition for many times.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    eigen: HermitianEigen,
    energies: EnergyTable,
}

impl ExactPropagator {
    pub fn new(p: &SystemParams) -> Result<Self> {
        let (energies, _) = rotating_frame(p);
        Ok(ExactPropagator {
            eigen: HermitianEigen::new(&rotating_hamiltonian(p))?,
            energies,
        })
    }

    /// Interaction-picture state at time `t` from an interaction-picture
    /// state at `t = 0` (where it equals the rotating-frame state).
    pub fn propagate(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        rho0.require_picture(Picture::Interaction)?;
        let u = self.eigen.exp_i(-t);
        let rotating = &(&u * rho0.matrix()) * &u.adjoint();
        let e = &self.energies.values;
        let phase: Vec<Complex64> = e
            .iter()
            .map(|&ek| Complex64::from_polar(1.0, ek * t))
            .collect();
        let m = ComplexMatrix::from_fn(DIM, |j, k| phase[j] * rotating[(j, k)] * phase[k].conj());
        Ok(DensityMatrix::from_parts(m, Picture::Interaction))
    }
}

/// Exact interaction-picture state at time `t`; the oracle for [`integrate`].
pub fn exact_propagate(rho0: &DensityMatrix, p: &SystemParams, t: f64) -> Result<DensityMatrix> {
    rho0.require_picture(Picture::Interaction)?;
    rho0.matrix().require_hermitian(INPUT_HERMITIAN_TOL)?;
    if !t.is_finite() {
        return Err(Error::arg("time must be finite"));
    }
    ExactPropagator::new(p)?.propagate(rho0, t)
}

/// Applies one resonant pi-pulse of length `pi / Omega_0` and returns the
/// final state. The drive must sit on the `|0> <-> |1>` resonance.
pub fn apply_cn_pulse(
    rho0: &DensityMatrix,
    p: &SystemParams,
    cfg: &EvolutionConfig,
) -> Result<DensityMatrix> {
    let detuning = cn_detuning(p);
    if detuning.abs() > RESONANCE_TOL * (1.0 + p.drive().abs()) {
        return Err(Error::NotResonant { detuning });
    }
    let tau = pi_pulse_duration(p, 0)?;
    Ok(integrate(rho0, p, tau, &cfg.with_record_every(0))?.into_final_state())
}
