//! Hamiltonians of the driven four-spin Ising register.
//!
//! Units: hbar = 1 and every frequency is a dimensionless angular frequency.
//! Multiplying by `2 pi * 1e6 s^-1` recovers physical values.
//!
//! Lab frame: `H = -sum_a [w_a I^z_a + 2 sum_{b>a} J_ab I^z_a I^z_b]` and a
//! circularly polarised drive `V(t)`. Rotating with the drive at `w` gives the
//! static `H' = H + w sum_a I^z_a` and `V' = -sum_a Omega_a I^x_a`. The
//! interaction picture removes the diagonal `H'` phases, leaving
//! `V''(t)[j][k] = V'[j][k] exp(i (E'_j - E'_k) t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_ops::{single_spin_operator, ComplexMatrix, SpinAxis, DIM, N_SPINS};

/// Physical constants of one register.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    omega: [f64; N_SPINS],
    coupling: [[f64; N_SPINS]; N_SPINS],
    rabi: [f64; N_SPINS],
    drive: f64,
}

impl SystemParams {
    /// Validates and builds a parameter set. Frequencies must be strictly
    /// increasing, couplings symmetric with a zero diagonal, and Rabi
    /// amplitudes non-negative.
    pub fn new(
        omega: [f64; N_SPINS],
        coupling: [[f64; N_SPINS]; N_SPINS],
        rabi: [f64; N_SPINS],
        drive: f64,
    ) -> Result<Self> {
        if omega.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(format!(
                "qubit frequencies must be strictly increasing, got {omega:?}"
            )));
        }
        Self::new_unordered(omega, coupling, rabi, drive)
    }

    /// Like [`SystemParams::new`] but accepts equal or unordered qubit
    /// frequencies, for degeneracy studies.
    pub fn new_unordered(
        omega: [f64; N_SPINS],
        coupling: [[f64; N_SPINS]; N_SPINS],
        rabi: [f64; N_SPINS],
        drive: f64,
    ) -> Result<Self> {
        let finite = omega
            .iter()
            .chain(rabi.iter())
            .chain(coupling.iter().flatten())
            .chain(std::iter::once(&drive))
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        for a in 0..N_SPINS {
            if coupling[a][a] != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "coupling diagonal J[{a}][{a}] must be zero"
                )));
            }
            for b in (a + 1)..N_SPINS {
                if coupling[a][b] != coupling[b][a] {
                    return Err(Error::InvalidParams(format!(
                        "coupling must be symmetric: J[{a}][{b}] != J[{b}][{a}]"
                    )));
                }
            }
        }
        if let Some(r) = rabi.iter().find(|r| **r < 0.0) {
            return Err(Error::InvalidParams(format!(
                "Rabi amplitudes must be non-negative, got {r}"
            )));
        }
        Ok(SystemParams {
            omega,
            coupling,
            rabi,
            drive,
        })
    }

    /// `w_k = omega0 + m k`, uniform coupling `j`, equal Rabi amplitudes.
    pub fn uniform(omega0: f64, m: f64, j: f64, rabi: f64, drive: f64) -> Result<Self> {
        Self::new(
            ladder(omega0, m),
            uniform_coupling(j),
            [rabi; N_SPINS],
            drive,
        )
    }

    pub fn omega(&self) -> [f64; N_SPINS] {
        self.omega
    }

    pub fn coupling(&self) -> [[f64; N_SPINS]; N_SPINS] {
        self.coupling
    }

    pub fn rabi(&self) -> [f64; N_SPINS] {
        self.rabi
    }

    pub fn drive(&self) -> f64 {
        self.drive
    }

    pub fn mean_frequency(&self) -> f64 {
        self.omega.iter().sum::<f64>() / N_SPINS as f64
    }

    pub fn with_drive(mut self, drive: f64) -> Self {
        self.drive = drive;
        self
    }

    /// Tunes the drive to the `|0> <-> |1>` transition.
    pub fn with_resonant_drive(self) -> Self {
        let w = lab_energy(&self, 1) - lab_energy(&self, 0);
        self.with_drive(w)
    }
}

impl Default for SystemParams {
    /// `w_k = 100 k`, `J = 10`, `Omega = 0.1`, drive on the `|0> <-> |1>`
    /// resonance at `3J`.
    fn default() -> Self {
        SystemParams::uniform(0.0, 100.0, 10.0, 0.1, 0.0)
            .expect("default parameters are valid")
            .with_resonant_drive()
    }
}

pub fn ladder(omega0: f64, m: f64) -> [f64; N_SPINS] {
    std::array::from_fn(|k| omega0 + m * k as f64)
}

pub fn uniform_coupling(j: f64) -> [[f64; N_SPINS]; N_SPINS] {
    std::array::from_fn(|a| std::array::from_fn(|b| if a == b { 0.0 } else { j }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyFrame {
    Lab,
    Rotating,
}

/// Diagonal energies of the 16 basis states in one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTable {
    pub frame: EnergyFrame,
    pub values: [f64; DIM],
}

impl EnergyTable {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `I^z` eigenvalue of spin `site` in basis state `k`.
#[inline]
pub fn spin_projection(k: usize, site: usize) -> f64 {
    if (k >> site) & 1 == 0 {
        0.5
    } else {
        -0.5
    }
}

fn energy(p: &SystemParams, k: usize, drive: f64) -> f64 {
    let mut e = 0.0;
    for a in 0..N_SPINS {
        let ma = spin_projection(k, a);
        e -= (p.omega[a] - drive) * ma;
        for b in (a + 1)..N_SPINS {
            e -= 2.0 * p.coupling[a][b] * ma * spin_projection(k, b);
        }
    }
    e
}

fn lab_energy(p: &SystemParams, k: usize) -> f64 {
    energy(p, k, 0.0)
}

/// Energy of basis state `k`; the lab frame is the rotating frame at zero
/// drive frequency.
pub fn basis_energy(p: &SystemParams, k: usize, frame: EnergyFrame) -> Result<f64> {
    if k >= DIM {
        return Err(Error::arg(format!("basis index {k} out of range 0..{DIM}")));
    }
    Ok(match frame {
        EnergyFrame::Lab => lab_energy(p, k),
        EnergyFrame::Rotating => energy(p, k, p.drive),
    })
}

pub fn energy_table(p: &SystemParams, frame: EnergyFrame) -> EnergyTable {
    let drive = match frame {
        EnergyFrame::Lab => 0.0,
        EnergyFrame::Rotating => p.drive,
    };
    EnergyTable {
        frame,
        values: std::array::from_fn(|k| energy(p, k, drive)),
    }
}

fn spin(axis: SpinAxis, site: usize) -> ComplexMatrix {
    single_spin_operator(axis, site).expect("site within register")
}

fn zeeman_ising(p: &SystemParams, drive: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(DIM);
    for a in 0..N_SPINS {
        let za = spin(SpinAxis::Z, a);
        h = &h - &za.scale_real(p.omega[a] - drive);
        for b in (a + 1)..N_SPINS {
            let zz = &za * &spin(SpinAxis::Z, b);
            h = &h - &zz.scale_real(2.0 * p.coupling[a][b]);
        }
    }
    h
}

/// Lab-frame static Hamiltonian `H`, built from spin operators.
pub fn static_hamiltonian(p: &SystemParams) -> ComplexMatrix {
    zeeman_ising(p, 0.0)
}

/// Lab-frame drive `V(t) = -1/2 sum_a Omega_a (e^{iwt} I^+_a + e^{-iwt} I^-_a)`.
pub fn drive_potential_lab(p: &SystemParams, t: f64) -> ComplexMatrix {
    let ph = Complex64::from_polar(1.0, p.drive * t);
    let mut v = ComplexMatrix::zeros(DIM);
    for a in 0..N_SPINS {
        if p.rabi[a] == 0.0 {
            continue;
        }
        let term = &spin(SpinAxis::Plus, a).scale(ph) + &spin(SpinAxis::Minus, a).scale(ph.conj());
        v = &v - &term.scale_real(0.5 * p.rabi[a]);
    }
    v
}

fn rotating_potential(p: &SystemParams) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(DIM);
    for a in 0..N_SPINS {
        v = &v - &spin(SpinAxis::X, a).scale_real(p.rabi[a]);
    }
    v
}

/// Diagonal of `H'` and the static drive `V'` in the frame rotating at the
/// drive frequency.
pub fn rotating_frame(p: &SystemParams) -> (EnergyTable, ComplexMatrix) {
    (
        energy_table(p, EnergyFrame::Rotating),
        rotating_potential(p),
    )
}

/// Full rotating-frame Hamiltonian `H' + V'` built from spin operators.
pub fn rotating_hamiltonian(p: &SystemParams) -> ComplexMatrix {
    &zeeman_ising(p, p.drive) + &rotating_potential(p)
}

/// Lab-frame transition frequency `E_to - E_from`.
pub fn resonant_drive_frequency(p: &SystemParams, from: usize, to: usize) -> Result<f64> {
    if from == to {
        return Err(Error::arg("transition needs two distinct basis states"));
    }
    Ok(basis_energy(p, to, EnergyFrame::Lab)? - basis_energy(p, from, EnergyFrame::Lab)?)
}

/// `E'_1 - E'_0`; zero when the drive sits on the CN transition.
pub fn cn_detuning(p: &SystemParams) -> f64 {
    energy(p, 1, p.drive) - energy(p, 0, p.drive)
}

/// Interaction-picture drive `V''(t)`, evaluated in closed form from the
/// diagonal rotating-frame spectrum.
pub fn interaction_potential(
    energies: &EnergyTable,
    vprime: &ComplexMatrix,
    t: f64,
) -> ComplexMatrix {
    debug_assert_eq!(energies.frame, EnergyFrame::Rotating);
    let e = &energies.values;
    ComplexMatrix::from_fn(DIM, |j, k| {
        let v = vprime[(j, k)];
        if v.re == 0.0 && v.im == 0.0 {
            v
        } else {
            v * Complex64::from_polar(1.0, (e[j] - e[k]) * t)
        }
    })
}

/// A single-spin flip `from -> to` with spin `site` going from up to down.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub site: usize,
    pub from: usize,
    pub to: usize,
    /// Lab-frame angular frequency `E_to - E_from`.
    pub frequency: f64,
}

/// All 32 single-flip transitions of the register, ordered by site then by
/// the lower state index.
pub fn transition_table(p: &SystemParams) -> Vec<Transition> {
    let mut out = Vec::with_capacity(DIM * N_SPINS / 2);
    for site in 0..N_SPINS {
        for from in (0..DIM).filter(|k| (k >> site) & 1 == 0) {
            let to = from | (1 << site);
            out.push(Transition {
                site,
                from,
                to,
                frequency: lab_energy(p, to) - lab_energy(p, from),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Couplings {
    Uniform(f64),
    General([[f64; N_SPINS]; N_SPINS]),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DriveSetting {
    /// Tune to the `|0> <-> |1>` transition.
    Resonant,
    Fixed(f64),
}

/// Parameter template resolved into [`SystemParams`] per run or grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub omega0: f64,
    pub m: f64,
    pub couplings: Couplings,
    pub rabi: [f64; N_SPINS],
    pub drive: DriveSetting,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            omega0: 0.0,
            m: 100.0,
            couplings: Couplings::Uniform(10.0),
            rabi: [0.1; N_SPINS],
            drive: DriveSetting::Resonant,
        }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<SystemParams> {
        let coupling = match &self.couplings {
            Couplings::Uniform(j) => uniform_coupling(*j),
            Couplings::General(c) => *c,
        };
        let p = SystemParams::new(ladder(self.omega0, self.m), coupling, self.rabi, 0.0)?;
        Ok(match self.drive {
            DriveSetting::Resonant => p.with_resonant_drive(),
            DriveSetting::Fixed(w) => p.with_drive(w),
        })
    }
}
