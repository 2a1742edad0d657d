//! Initial density matrices.
//!
//! The simulated object is the scale-free deviation matrix `r''`. Its
//! physical counterpart is `r''` times `hbar sum w_k / (32 k_B T)`; that
//! factor never enters the (linear) dynamics. The identity part of the
//! ensemble density matrix commutes with everything and is not simulated.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{energy_table, EnergyFrame, SystemParams};
use crate::spin_ops::{ComplexMatrix, DIM};

/// Dimension of the active-state block `|00kl>`.
pub const BLOCK_DIM: usize = 4;

const HERMITIAN_TOL: f64 = 1e-12;

/// Populations of the inactive states `|4>..|15>` in the prepared matrix.
pub const BACKGROUND: [(usize, f64); 9] = [
    (4, -0.5),
    (5, 0.5),
    (6, 0.5),
    (7, 0.5),
    (8, 0.5),
    (9, -0.5),
    (10, -0.5),
    (11, -0.5),
    (12, -1.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    Lab,
    Rotating,
    Interaction,
}

/// 16x16 deviation matrix tagged with the picture it is expressed in.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    picture: Picture,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, picture: Picture) -> Result<Self> {
        if matrix.dim() != DIM {
            return Err(Error::DimensionMismatch {
                left: DIM,
                right: matrix.dim(),
            });
        }
        matrix.require_hermitian(HERMITIAN_TOL)?;
        Ok(DensityMatrix { matrix, picture })
    }

    /// Skips the Hermiticity check; for integrator output that is
    /// symmetrised on every step.
    pub(crate) fn from_parts(matrix: ComplexMatrix, picture: Picture) -> Self {
        debug_assert_eq!(matrix.dim(), DIM);
        DensityMatrix { matrix, picture }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub(crate) fn require_picture(&self, expected: Picture) -> Result<()> {
        if self.picture != expected {
            return Err(Error::WrongPicture {
                expected,
                found: self.picture,
            });
        }
        Ok(())
    }
}

/// The 4x4 active-state block `r_ij`, `i, j in 0..4`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBlock {
    matrix: ComplexMatrix,
}

impl ReducedBlock {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != BLOCK_DIM {
            return Err(Error::DimensionMismatch {
                left: BLOCK_DIM,
                right: matrix.dim(),
            });
        }
        matrix.require_hermitian(HERMITIAN_TOL)?;
        Ok(ReducedBlock { matrix })
    }

    pub fn from_rows(rows: [[Complex64; BLOCK_DIM]; BLOCK_DIM]) -> Result<Self> {
        Self::new(ComplexMatrix::from_fn(BLOCK_DIM, |r, c| rows[r][c]))
    }

    pub fn zero() -> Self {
        ReducedBlock {
            matrix: ComplexMatrix::zeros(BLOCK_DIM),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }
}

/// Normalised amplitudes of a pure two-spin state over `|00>, |01>, |10>, |11>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureTwoSpinState {
    amplitudes: [Complex64; BLOCK_DIM],
}

impl PureTwoSpinState {
    pub fn new(amplitudes: [Complex64; BLOCK_DIM]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::arg(format!(
                "two-spin amplitudes must be normalised, sum |c|^2 = {norm}"
            )));
        }
        Ok(PureTwoSpinState { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: [Complex64; BLOCK_DIM]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::arg("two-spin amplitudes must not all vanish"));
        }
        Ok(PureTwoSpinState {
            amplitudes: amplitudes.map(|c| c / norm),
        })
    }

    pub fn amplitudes(&self) -> [Complex64; BLOCK_DIM] {
        self.amplitudes
    }

    /// `sqrt(0.3)|00> + sqrt(0.2)|01> + |10>/sqrt(3) + |11>/sqrt(6)`.
    pub fn superposition() -> Self {
        let re = |v: f64| Complex64::new(v, 0.0);
        PureTwoSpinState {
            amplitudes: [
                re(0.3f64.sqrt()),
                re(0.2f64.sqrt()),
                re(1.0 / 3f64.sqrt()),
                re(1.0 / 6f64.sqrt()),
            ],
        }
    }

    pub fn ground() -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); BLOCK_DIM];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        PureTwoSpinState { amplitudes }
    }
}

/// Boltzmann populations `exp(-E_k / kT) / Z` over lab-frame energies, with
/// `kT` in the same units as the energies.
pub fn thermal_density(p: &SystemParams, kt: f64) -> Result<DensityMatrix> {
    if !(kt > 0.0) {
        return Err(Error::arg(format!(
            "temperature must be positive, got {kt}"
        )));
    }
    let e = energy_table(p, EnergyFrame::Lab).values;
    let emin = e.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = e.iter().map(|&ek| (-(ek - emin) / kt).exp()).collect();
    let z: f64 = w.iter().sum();
    let diag: Vec<f64> = w.iter().map(|v| v / z).collect();
    Ok(DensityMatrix::from_parts(
        ComplexMatrix::from_real_diagonal(&diag),
        Picture::Interaction,
    ))
}

/// Embeds `rdm` as the active block on top of the fixed inactive background.
pub fn prepared_deviation(rdm: &ReducedBlock) -> Result<DensityMatrix> {
    rdm.matrix.require_hermitian(HERMITIAN_TOL)?;
    let mut m = ComplexMatrix::zeros(DIM);
    for i in 0..BLOCK_DIM {
        for j in 0..BLOCK_DIM {
            m[(i, j)] = rdm.matrix[(i, j)];
        }
    }
    for &(k, v) in &BACKGROUND {
        m[(k, k)] = Complex64::new(v, 0.0);
    }
    Ok(DensityMatrix::from_parts(m, Picture::Interaction))
}

/// `r_nk = c_n conj(c_k)`.
pub fn rdm_from_pure(state: &PureTwoSpinState) -> ReducedBlock {
    let c = state.amplitudes;
    ReducedBlock {
        matrix: ComplexMatrix::from_fn(BLOCK_DIM, |n, k| c[n] * c[k].conj()),
    }
}

/// Replaces each upper off-diagonal entry by `|r_ij| e^{i phase}` and fills
/// the lower triangle by conjugation; the diagonal is kept.
pub fn phase_dressed_rdm(base: &ReducedBlock, phase: f64) -> ReducedBlock {
    let mut m = base.matrix.clone();
    let rot = Complex64::from_polar(1.0, phase);
    for i in 0..BLOCK_DIM {
        for j in (i + 1)..BLOCK_DIM {
            let v = rot * base.matrix[(i, j)].norm();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    ReducedBlock { matrix: m }
}

pub fn extract_block(rho: &DensityMatrix) -> ReducedBlock {
    ReducedBlock {
        matrix: ComplexMatrix::from_fn(BLOCK_DIM, |i, j| rho.matrix[(i, j)]),
    }
}

/// Initial-state selector accepted by the CLI and config files.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    /// `|00>`, block with `r_00 = 1`.
    Ground,
    /// Real superposition block built from [`PureTwoSpinState::superposition`].
    Superposition,
    /// Superposition block with off-diagonal phases set to the dress phase.
    SuperpositionDressed,
    Pure(PureTwoSpinState),
    /// Thermal equilibrium with `theta = mean(w) / kT`.
    Thermal(f64),
}

impl InitialState {
    /// `phase_dress` is only used by [`InitialState::SuperpositionDressed`].
    pub fn build(&self, p: &SystemParams, phase_dress: f64) -> Result<DensityMatrix> {
        match self {
            InitialState::Ground => prepared_deviation(&rdm_from_pure(&PureTwoSpinState::ground())),
            InitialState::Superposition => {
                prepared_deviation(&rdm_from_pure(&PureTwoSpinState::superposition()))
            }
            InitialState::SuperpositionDressed => prepared_deviation(&phase_dressed_rdm(
                &rdm_from_pure(&PureTwoSpinState::superposition()),
                phase_dress,
            )),
            InitialState::Pure(s) => prepared_deviation(&rdm_from_pure(s)),
            InitialState::Thermal(theta) => {
                if !(*theta > 0.0) {
                    return Err(Error::arg(format!(
                        "thermal theta must be positive, got {theta}"
                    )));
                }
                let wbar = p.mean_frequency();
                if !(wbar > 0.0) {
                    return Err(Error::arg(
                        "thermal state needs a positive mean qubit frequency (set omega0)",
                    ));
                }
                thermal_density(p, wbar / theta)
            }
        }
    }
}

/// Default dress phase for [`InitialState::SuperpositionDressed`].
pub const DEFAULT_PHASE_DRESS: f64 = FRAC_PI_4;

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Ground => f.write_str("ground"),
            InitialState::Superposition => f.write_str("superposition"),
            InitialState::SuperpositionDressed => f.write_str("superposition-dressed"),
            InitialState::Pure(s) => {
                let parts: Vec<String> = s
                    .amplitudes
                    .iter()
                    .map(|c| format!("{}{:+}i", c.re, c.im))
                    .collect();
                write!(f, "pure:{}", parts.join(","))
            }
            InitialState::Thermal(theta) => write!(f, "thermal:{theta}"),
        }
    }
}

impl FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "ground" => return Ok(InitialState::Ground),
            "superposition" => return Ok(InitialState::Superposition),
            "superposition-dressed" => return Ok(InitialState::SuperpositionDressed),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("pure:") {
            let rest = rest.trim().trim_start_matches('<').trim_end_matches('>');
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != BLOCK_DIM {
                return Err(Error::arg(format!(
                    "pure state needs {BLOCK_DIM} amplitudes, got {}",
                    parts.len()
                )));
            }
            let mut amps = [Complex64::new(0.0, 0.0); BLOCK_DIM];
            for (a, p) in amps.iter_mut().zip(parts) {
                *a = parse_complex(p)?;
            }
            return Ok(InitialState::Pure(PureTwoSpinState::normalized(amps)?));
        }
        if let Some(rest) = s.strip_prefix("thermal:") {
            let theta: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::arg(format!("bad thermal theta '{rest}'")))?;
            if !(theta > 0.0) {
                return Err(Error::arg(format!(
                    "thermal theta must be positive, got {theta}"
                )));
            }
            return Ok(InitialState::Thermal(theta));
        }
        Err(Error::arg(format!(
            "unknown initial state '{s}' (expected ground, superposition, \
             superposition-dressed, pure:<c0,c1,c2,c3>, thermal:<theta>)"
        )))
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (`j` is accepted for `i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::arg(format!("bad complex number '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re_str.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}
