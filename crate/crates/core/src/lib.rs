//! Four-spin NMR model of a controlled-NOT pulse on a nuclear-spin chain:
//! Hamiltonian construction, density-matrix preparation, time evolution in
//! the interaction picture, gate-fidelity metrics and parameter sweeps.

pub mod config;
pub mod error;
pub mod evolve;
pub mod metrics;
pub mod model;
pub mod output;
pub mod spin_ops;
pub mod state;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use evolve::{integrate, EvolutionConfig, Method, Trajectory};
pub use metrics::{deviation_report, DeviationReport};
pub use model::{ModelConfig, SystemParams};
pub use spin_ops::{ComplexMatrix, DIM, N_SPINS};
pub use state::{DensityMatrix, InitialState, Picture};
pub use sweep::{
    find_critical, run_single, run_sweep, Execution, RunConfig, SweepSpec, SweepVariable,
};
