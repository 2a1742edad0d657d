//! Quick self-checks run by `cngate verify`.

use crate::error::Result;
use crate::evolve::{exact_propagate, integrate, EvolutionConfig, Method};
use crate::metrics::ideal_cn_unitary;
use crate::model::{energy_table, rotating_hamiltonian, EnergyFrame, SystemParams};
use crate::spin_ops::{kron, single_spin_operator, ComplexMatrix, SpinAxis};
use crate::state::{InitialState, DEFAULT_PHASE_DRESS};
use crate::sweep::{run_single, RunConfig};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, limit: f64) -> CheckResult {
    CheckResult {
        name,
        passed: value.is_finite() && value <= limit,
        detail: format!("{value:.3e} (limit {limit:.0e})"),
    }
}

/// Runs every check against the default parameters.
pub fn run_checks() -> Result<Vec<CheckResult>> {
    let p = SystemParams::default();
    let mut out = Vec::new();

    let z0 = single_spin_operator(SpinAxis::Z, 0)?;
    let z_sign = (z0[(0, 0)].re - 0.5).abs() + (z0[(1, 1)].re + 0.5).abs();
    out.push(check("spin-up is I^z = +1/2 on bit 0", z_sign, 0.0));

    let x = single_spin_operator(SpinAxis::X, 3)?;
    let manual = kron(&SpinAxis::X.pauli_half(), &ComplexMatrix::identity(8));
    out.push(check(
        "site 3 is the leftmost factor",
        x.max_abs_diff(&manual),
        0.0,
    ));

    let e = energy_table(&p, EnergyFrame::Rotating);
    out.push(check(
        "rotating-frame |0>,|1> degenerate at resonance",
        (e.values[1] - e.values[0]).abs(),
        1e-9,
    ));

    out.push(check(
        "rotating Hamiltonian Hermitian",
        rotating_hamiltonian(&p).hermiticity_defect(),
        1e-12,
    ));
    out.push(check(
        "CN gate unitary",
        ideal_cn_unitary().unitarity_defect(),
        1e-14,
    ));

    let rho0 = InitialState::Superposition.build(&p, DEFAULT_PHASE_DRESS)?;
    let cfg = EvolutionConfig::new(0.0025, Method::Rk4, 0)?;
    let rk = integrate(&rho0, &p, 5.0, &cfg)?.into_final_state();
    let ex = exact_propagate(&rho0, &p, 5.0)?;
    out.push(check(
        "RK4 agrees with exact propagator (t = 5)",
        rk.matrix().max_abs_diff(ex.matrix()),
        1e-6,
    ));
    out.push(check(
        "trace conserved",
        (rk.trace() - rho0.trace()).norm(),
        1e-12,
    ));

    let run = run_single(&RunConfig::default())?;
    out.push(check(
        "default pulse within 0.01 of the ideal gate (active block)",
        run.report.amp.block_max(),
        0.01,
    ));
    out.push(CheckResult {
        name: "tau equals pi / rabi",
        passed: (run.tau - std::f64::consts::PI / 0.1).abs() < 1e-12,
        detail: format!("{:.6}", run.tau),
    });
    Ok(out)
}
