//! Ideal CN-gate map and the amplitude/phase deviation diagnostics.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::spin_ops::{ComplexMatrix, DIM};
use crate::state::DensityMatrix;

/// Default amplitude below which a phase is considered meaningless.
pub const DEFAULT_PHASE_FLOOR: f64 = 1e-3;

/// `i|0><1| + i|1><0| + sum_{n>=2} |n><n|`.
pub fn ideal_cn_unitary() -> ComplexMatrix {
    let mut g = ComplexMatrix::identity(DIM);
    g[(0, 0)] = Complex64::new(0.0, 0.0);
    g[(1, 1)] = Complex64::new(0.0, 0.0);
    g[(0, 1)] = Complex64::new(0.0, 1.0);
    g[(1, 0)] = Complex64::new(0.0, 1.0);
    g
}

/// `G rho0 G^dagger`: the state an ideal gate would produce.
pub fn expected_final(rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let g = ideal_cn_unitary();
    let out = &(&g * rho0.matrix()) * &g.adjoint();
    DensityMatrix::new(out, rho0.picture())
}

/// Row-major 16x16 grid of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid16 {
    values: Vec<f64>,
}

impl Grid16 {
    fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(DIM * DIM);
        for i in 0..DIM {
            for j in 0..DIM {
                values.push(f(i, j));
            }
        }
        Grid16 { values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * DIM + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Largest value and its `(i, j)` position (first in row-major order).
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (n, &v) in self.values.iter().enumerate() {
            if v > best.2 {
                best = (n / DIM, n % DIM, v);
            }
        }
        best
    }

    /// Maximum over the active-state block `i, j < 4`.
    pub fn block_max(&self) -> f64 {
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .fold(0.0, f64::max)
    }
}

/// 16x16 grid with per-entry validity.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedGrid16 {
    values: Vec<Option<f64>>,
}

impl MaskedGrid16 {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * DIM + j]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// `Delta_ij = | |actual_ij| - |expected_ij| |` over all 16x16 entries.
pub fn amplitude_deviation(actual: &DensityMatrix, expected: &DensityMatrix) -> Grid16 {
    let (a, e) = (actual.matrix(), expected.matrix());
    Grid16::from_fn(|i, j| (a[(i, j)].norm() - e[(i, j)].norm()).abs())
}

/// Circular distance in `[0, pi]` between `arg(actual_ij)` and
/// `arg(expected_ij)`. Entries where either modulus is below `floor` are
/// masked.
pub fn phase_deviation(
    actual: &DensityMatrix,
    expected: &DensityMatrix,
    floor: f64,
) -> Result<MaskedGrid16> {
    if !(floor > 0.0) {
        return Err(Error::arg(format!(
            "phase floor must be positive, got {floor}"
        )));
    }
    let (a, e) = (actual.matrix(), expected.matrix());
    let mut values = Vec::with_capacity(DIM * DIM);
    for i in 0..DIM {
        for j in 0..DIM {
            let (x, y) = (a[(i, j)], e[(i, j)]);
            values.push(if x.norm() < floor || y.norm() < floor {
                None
            } else {
                Some(wrapped_distance(x.arg() - y.arg()))
            });
        }
    }
    Ok(MaskedGrid16 { values })
}

/// `|d|` after reducing `d` to `(-pi, pi]`.
fn wrapped_distance(d: f64) -> f64 {
    let mut r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r.abs()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationReport {
    pub amp: Grid16,
    pub phase: MaskedGrid16,
    pub max_amp: f64,
    pub max_phase: f64,
    pub params_echo: SystemParams,
    pub tau: f64,
}

impl DeviationReport {
    /// Position and value of the largest amplitude deviation.
    pub fn worst_amp(&self) -> (usize, usize, f64) {
        self.amp.argmax()
    }
}

pub fn summarize(
    amp: Grid16,
    phase: MaskedGrid16,
    params: &SystemParams,
    tau: f64,
) -> DeviationReport {
    DeviationReport {
        max_amp: amp.max(),
        max_phase: phase.max(),
        amp,
        phase,
        params_echo: params.clone(),
        tau,
    }
}

/// Compares `actual` with the ideal gate applied to `initial`.
pub fn deviation_report(
    initial: &DensityMatrix,
    actual: &DensityMatrix,
    params: &SystemParams,
    tau: f64,
    floor: f64,
) -> Result<DeviationReport> {
    let expected = expected_final(initial)?;
    let amp = amplitude_deviation(actual, &expected);
    let phase = phase_deviation(actual, &expected, floor)?;
    Ok(summarize(amp, phase, params, tau))
}
