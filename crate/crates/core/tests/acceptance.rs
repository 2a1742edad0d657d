//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_BLOCKED` are measured exactly as stated and are
//! expected to print FAIL; the process exits non-zero on any other failure,
//! or if a blocked criterion starts passing.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cngate::evolve::{exact_propagate, integrate, EvolutionConfig, Method};
use cngate::metrics::{expected_final, ideal_cn_unitary};
use cngate::model::{transition_table, Couplings, DriveSetting, ModelConfig};
use cngate::output::write_sweep;
use cngate::spin_ops::hermitian_eigenvalues;
use cngate::state::{extract_block, prepared_deviation, ReducedBlock};
use cngate::sweep::{
    find_critical, find_critical_by, run_single, run_sweep, Execution, RunConfig, SweepRow,
    SweepSpec, SweepVariable,
};
use cngate::{ComplexMatrix, DensityMatrix, InitialState, Picture, SystemParams, DIM};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_BLOCKED: [u32; 3] = [2, 5, 6];

// criterion 1
const BLOCK_TOL: f64 = 0.01;
const SINGLE_RUN_BUDGET: Duration = Duration::from_secs(10);
// criterion 2
const ORACLE_TOL: f64 = 1e-6;
const ORDER_GAIN: f64 = 10.0;
// criterion 3
const CONSERVATION_DT: f64 = 0.0025;
const TRACE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-6;
const RANDOM_BLOCKS: usize = 20;
// criterion 4
const RABI_TOL: f64 = 1e-6;
// criterion 5
const M_SAFE_TOL: f64 = 0.01;
const M_CR_RANGE: (f64, f64) = (20.0, 40.0);
const SWEEP_BUDGET: Duration = Duration::from_secs(300);
const THRESHOLD: f64 = 0.02;
// criterion 6
const J_SAFE_TOL: f64 = 0.015;
const J_TREND_RATIO: f64 = 5.0;
const J_CR_RANGE: (f64, f64) = (0.1, 1.0);
const J_SWEEP_M: f64 = 30.0;
// criterion 7
const GATE_TOL: f64 = 1e-14;
const RANDOM_GATE_INPUTS: usize = 50;
// criterion 8
const DEGENERACY_TOL: f64 = 1e-12;
const DESTROYED_MIN: f64 = 0.1;

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new(id: u32, title: &'static str) -> Self {
        Outcome {
            id,
            title,
            passed: true,
            lines: Vec::new(),
        }
    }

    /// Records one sub-check; the criterion passes only if all do.
    fn check(&mut self, ok: bool, msg: String) {
        self.passed &= ok;
        self.lines
            .push(format!("{} {msg}", if ok { "ok  " } else { "MISS" }));
    }

    fn info(&mut self, msg: String) {
        self.lines.push(format!("info {msg}"));
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sweep_base() -> RunConfig {
    RunConfig {
        initial: InitialState::SuperpositionDressed,
        ..RunConfig::default()
    }
}

fn m_grid() -> Vec<f64> {
    (1..=20).map(|k| 5.0 * k as f64).collect()
}

fn m_sweep_spec() -> SweepSpec {
    SweepSpec::new(SweepVariable::M, m_grid(), sweep_base()).expect("valid M grid")
}

fn row_at(rows: &[SweepRow], grid: f64) -> &SweepRow {
    rows.iter()
        .find(|r| r.grid == grid)
        .expect("grid value present")
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new(1, "superposition pulse reproduces the printed final block");
    #[rustfmt::skip]
    let printed = [
        [c(0.2, 0.0), c(0.2449, 0.0), c(0.0, 0.25819), c(0.0, 0.1826)],
        [c(0.2449, 0.0), c(0.3, 0.0), c(0.0, 0.3162), c(0.0, 0.2236)],
        [c(0.0, -0.2582), c(0.0, -0.3162), c(0.333, 0.0), c(0.2357, 0.0)],
        [c(0.0, -0.1826), c(0.0, -0.2236), c(0.2357, 0.0), c(0.1666, 0.0)],
    ];
    let start = Instant::now();
    let run = run_single(&RunConfig::default()).expect("default run");
    let elapsed = start.elapsed();
    let block = extract_block(run.trajectory.final_state());
    let mut worst = 0.0f64;
    for (i, row) in printed.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            worst = worst.max((block.get(i, j) - want).norm());
        }
    }
    o.check(
        worst <= BLOCK_TOL,
        format!("max |r_ij(tau) - printed| = {worst:.3e} (<= {BLOCK_TOL})"),
    );
    o.check(
        elapsed < SINGLE_RUN_BUDGET,
        format!(
            "runtime {:.3} s (< {} s, dt = 0.01)",
            elapsed.as_secs_f64(),
            SINGLE_RUN_BUDGET.as_secs()
        ),
    );
    o.info(format!(
        "max amplitude deviation over all 16x16 = {:.3e}",
        run.report.max_amp
    ));
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new(2, "RK4 agrees with the exact propagator at tau");
    let p = SystemParams::default();
    let rho0 = InitialState::Superposition.build(&p, 0.0).unwrap();
    let tau = PI / p.rabi()[0];
    let exact = exact_propagate(&rho0, &p, tau).unwrap();
    let err = |dt: f64| {
        let cfg = EvolutionConfig::new(dt, Method::Rk4, 0).unwrap();
        let rk = integrate(&rho0, &p, tau, &cfg).unwrap().into_final_state();
        rk.matrix().max_abs_diff(exact.matrix())
    };
    let (e1, e2) = (err(0.01), err(0.005));
    o.check(
        e1 <= ORACLE_TOL,
        format!("dt = 0.01: max entry error {e1:.3e} (<= {ORACLE_TOL:e})"),
    );
    o.check(
        e1 / e2 >= ORDER_GAIN,
        format!(
            "halving dt improves error by {:.1}x (>= {ORDER_GAIN})",
            e1 / e2
        ),
    );
    o.info(format!(
        "dt = 0.005: {e2:.3e}; dt = 0.0025: {:.3e}",
        err(0.0025)
    ));
    o
}

struct Drift {
    trace: f64,
    hermitian: f64,
    spectrum: f64,
}

fn conservation_drift(blocks: &[ComplexMatrix], p: &SystemParams, dt: f64) -> Drift {
    let tau = PI / p.rabi()[0];
    let cfg = EvolutionConfig::new(dt, Method::Rk4, 0).unwrap();
    let mut d = Drift {
        trace: 0.0,
        hermitian: 0.0,
        spectrum: 0.0,
    };
    for b in blocks {
        let rho0 = prepared_deviation(&ReducedBlock::new(b.clone()).unwrap()).unwrap();
        let last = integrate(&rho0, p, tau, &cfg).unwrap().into_final_state();
        d.trace = d.trace.max((last.trace() - rho0.trace()).norm());
        d.hermitian = d.hermitian.max(last.matrix().hermiticity_defect());
        let before = hermitian_eigenvalues(rho0.matrix()).unwrap();
        let after = hermitian_eigenvalues(&last.matrix().hermitian_part()).unwrap();
        for (a, b) in before.iter().zip(&after) {
            d.spectrum = d.spectrum.max((a - b).abs());
        }
    }
    d
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new(
        3,
        "trace, Hermiticity and spectrum conserved over the pulse",
    );
    let p = SystemParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let blocks: Vec<ComplexMatrix> = (0..RANDOM_BLOCKS)
        .map(|_| random_hermitian(&mut rng, 4))
        .collect();
    let d = conservation_drift(&blocks, &p, CONSERVATION_DT);
    o.check(
        d.trace <= TRACE_TOL,
        format!("trace drift {:.3e} (<= {TRACE_TOL:e})", d.trace),
    );
    o.check(
        d.hermitian <= HERMITIAN_TOL,
        format!(
            "Hermiticity defect {:.3e} (<= {HERMITIAN_TOL:e})",
            d.hermitian
        ),
    );
    o.check(
        d.spectrum <= SPECTRUM_TOL,
        format!(
            "eigenvalue drift {:.3e} (<= {SPECTRUM_TOL:e}) at dt = {CONSERVATION_DT}",
            d.spectrum
        ),
    );
    let coarse = conservation_drift(&blocks, &p, 0.01);
    o.info(format!(
        "eigenvalue drift at dt = 0.01: {:.3e}",
        coarse.spectrum
    ));
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new(4, "single-qubit Rabi flopping matches cos^2 / sin^2");
    let omega0 = 5.0;
    let rabi = 0.1;
    let p = SystemParams::new(
        [omega0, omega0 + 100.0, omega0 + 200.0, omega0 + 300.0],
        [[0.0; 4]; 4],
        [rabi, 0.0, 0.0, 0.0],
        omega0,
    )
    .unwrap();
    let mut m = ComplexMatrix::zeros(DIM);
    m[(0, 0)] = c(1.0, 0.0);
    let rho0 = DensityMatrix::new(m, Picture::Interaction).unwrap();
    let cfg = EvolutionConfig::new(0.01, Method::Rk4, 1).unwrap();
    let traj = integrate(&rho0, &p, 2.0 * PI / rabi, &cfg).unwrap();
    let mut worst = 0.0f64;
    for (t, rho) in traj.iter() {
        let (c2, s2) = (
            (rabi * t / 2.0).cos().powi(2),
            (rabi * t / 2.0).sin().powi(2),
        );
        worst = worst
            .max((rho.get(0, 0).re - c2).abs())
            .max((rho.get(1, 1).re - s2).abs());
    }
    o.check(
        worst <= RABI_TOL,
        format!(
            "max population error {worst:.3e} over {} samples (<= {RABI_TOL:e})",
            traj.len()
        ),
    );
    o
}

fn criterion_5() -> (Outcome, Vec<SweepRow>) {
    let mut o = Outcome::new(5, "M sweep: small deviations for M >= 40, M_cr in [20, 40]");
    let start = Instant::now();
    let rows = run_sweep(&m_sweep_spec(), Execution::Parallel).expect("M sweep");
    let elapsed = start.elapsed();
    for m in (4..=10).map(|k| 10.0 * k as f64) {
        let r = row_at(&rows, m);
        let (i, j, v) = r.worst_amp();
        o.check(
            r.max_amp < M_SAFE_TOL,
            format!(
                "M = {m:>3}: max_amp {:.3e} at ({i},{j}) (< {M_SAFE_TOL})",
                v
            ),
        );
    }
    let cr = find_critical(&rows, THRESHOLD).unwrap();
    o.check(
        cr.is_some_and(|v| (M_CR_RANGE.0..=M_CR_RANGE.1).contains(&v)),
        format!(
            "M_cr = {cr:?} at threshold {THRESHOLD} (in [{}, {}])",
            M_CR_RANGE.0, M_CR_RANGE.1
        ),
    );
    o.check(
        elapsed <= SWEEP_BUDGET,
        format!(
            "sweep runtime {:.2} s (<= {} s)",
            elapsed.as_secs_f64(),
            SWEEP_BUDGET.as_secs()
        ),
    );
    let ratio = row_at(&rows, 10.0).max_amp / row_at(&rows, 100.0).max_amp;
    o.info(format!("max_amp(M=10) / max_amp(M=100) = {ratio:.1}"));
    let block_cr = find_critical_by(&rows, THRESHOLD, SweepRow::active_block_max_amp).unwrap();
    let block_safe = (4..=10)
        .map(|k| row_at(&rows, 10.0 * k as f64).active_block_max_amp())
        .fold(0.0, f64::max);
    o.info(format!(
        "active 4x4 block only: worst for M >= 40 = {block_safe:.3e}, M_cr = {block_cr:?}"
    ));
    (o, rows)
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new(
        6,
        "J sweep at M = 30: ~1% for J >= 1, trend, J_cr in [0.1, 1]",
    );
    let mut base = sweep_base();
    base.model.m = J_SWEEP_M;
    let grid = vec![0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0];
    let spec = SweepSpec::new(SweepVariable::J, grid, base).unwrap();
    let rows = run_sweep(&spec, Execution::Parallel).expect("J sweep");
    for j in [1.0, 2.0, 5.0, 10.0, 50.0, 100.0] {
        let r = row_at(&rows, j);
        let (a, b, v) = r.worst_amp();
        o.check(
            r.max_amp <= J_SAFE_TOL,
            format!("J = {j:>5}: max_amp {v:.3e} at ({a},{b}) (<= {J_SAFE_TOL})"),
        );
    }
    let ratio = row_at(&rows, 0.1).max_amp / row_at(&rows, 10.0).max_amp;
    o.check(
        ratio >= J_TREND_RATIO,
        format!("max_amp(J=0.1) / max_amp(J=10) = {ratio:.2} (>= {J_TREND_RATIO})"),
    );
    let cr = find_critical(&rows, THRESHOLD).unwrap();
    o.check(
        cr.is_some_and(|v| (J_CR_RANGE.0..=J_CR_RANGE.1).contains(&v)),
        format!(
            "J_cr = {cr:?} at threshold {THRESHOLD} (in [{}, {}])",
            J_CR_RANGE.0, J_CR_RANGE.1
        ),
    );
    let block = |j: f64| row_at(&rows, j).active_block_max_amp();
    let block_cr = find_critical_by(&rows, THRESHOLD, SweepRow::active_block_max_amp).unwrap();
    o.info(format!(
        "active 4x4 block only: J=1 {:.3e}, J=10 {:.3e}, ratio {:.1}, J_cr = {block_cr:?}",
        block(1.0),
        block(10.0),
        block(0.1) / block(10.0)
    ));
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new(
        7,
        "ideal gate map equals unitary conjugation and the printed table",
    );
    let g = ideal_cn_unitary();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_conj = 0.0f64;
    let mut worst_table = 0.0f64;
    // printed 4x4 map: entry (n,k) of the result is factor * r_{src}(0)
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    #[rustfmt::skip]
    let table: [[(Complex64, (usize, usize)); 4]; 4] = [
        [(one, (1, 1)), (one, (1, 0)), (i, (1, 2)), (i, (1, 3))],
        [(one, (0, 1)), (one, (0, 0)), (i, (0, 2)), (i, (0, 3))],
        [(-i, (2, 1)), (-i, (2, 0)), (one, (2, 2)), (one, (2, 3))],
        [(-i, (3, 1)), (-i, (3, 0)), (one, (3, 2)), (one, (3, 3))],
    ];
    for _ in 0..RANDOM_GATE_INPUTS {
        let m = random_hermitian(&mut rng, DIM);
        let rho = DensityMatrix::new(m.clone(), Picture::Interaction).unwrap();
        let got = expected_final(&rho).unwrap();
        let conj = &(&g * &m) * &g.adjoint();
        worst_conj = worst_conj.max(got.matrix().max_abs_diff(&conj));
        for a in 0..DIM {
            for b in 0..DIM {
                let want = if a < 4 && b < 4 {
                    let (f, (s, t)) = table[a][b];
                    f * m[(s, t)]
                } else if a < 4 || b < 4 {
                    // block/background cross terms are not in the printed table
                    continue;
                } else {
                    m[(a, b)]
                };
                worst_table = worst_table.max((got.get(a, b) - want).norm());
            }
        }
    }
    o.check(
        worst_conj <= GATE_TOL,
        format!("{RANDOM_GATE_INPUTS} random inputs: |expected - G rho G^+| = {worst_conj:.1e} (<= {GATE_TOL:e})"),
    );
    o.check(
        worst_table <= GATE_TOL,
        format!("entry-for-entry printed table: {worst_table:.1e} (<= {GATE_TOL:e})"),
    );
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new(8, "J = 0 degeneracy destroys the gate");
    let cfg = ModelConfig {
        couplings: Couplings::Uniform(0.0),
        drive: DriveSetting::Resonant,
        ..ModelConfig::default()
    };
    let p = cfg.build().unwrap();
    let omega0 = p.omega()[0];
    let table = transition_table(&p);
    // |0000>-|0001>, |0010>-|0011>, |0100>-|0101>, |1000>-|1001>
    let named: Vec<_> = table
        .iter()
        .filter(|t| t.site == 0 && [0, 2, 4, 8].contains(&t.from))
        .collect();
    let degenerate = named.len() == 4
        && named
            .iter()
            .all(|t| (t.frequency - omega0).abs() <= DEGENERACY_TOL);
    o.check(
        degenerate,
        format!(
            "{} named spin-0 transitions at omega_0 = {omega0}",
            named.len()
        ),
    );
    let all_spin0 = table
        .iter()
        .filter(|t| t.site == 0 && (t.frequency - omega0).abs() <= DEGENERACY_TOL)
        .count();
    o.info(format!(
        "spin-0 transitions at omega_0 in the full table: {all_spin0}"
    ));
    let mut run = sweep_base();
    run.model = cfg;
    let r = run_single(&run).unwrap();
    o.check(
        r.report.max_amp > DESTROYED_MIN,
        format!(
            "max_amp at J = 0 = {:.3e} (> {DESTROYED_MIN})",
            r.report.max_amp
        ),
    );
    o.info(format!(
        "active 4x4 block only: {:.3e}",
        r.report.amp.block_max()
    ));
    o
}

fn csv(rows: &[SweepRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_sweep(&mut buf, rows).unwrap();
    buf
}

fn criterion_9(first: &[SweepRow]) -> Outcome {
    let mut o = Outcome::new(
        9,
        "sweep CSV is byte-identical across runs and worker counts",
    );
    let spec = m_sweep_spec();
    let reference = csv(first);
    let again = csv(&run_sweep(&spec, Execution::Parallel).unwrap());
    o.check(
        reference == again,
        format!("two parallel runs: {} bytes each", reference.len()),
    );
    let seq = csv(&run_sweep(&spec, Execution::Sequential).unwrap());
    o.check(reference == seq, "parallel vs sequential".into());
    for threads in [1, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let out = pool.install(|| csv(&run_sweep(&spec, Execution::Parallel).unwrap()));
        o.check(reference == out, format!("{threads}-thread pool"));
    }
    o
}

fn main() -> ExitCode {
    let (c5, m_rows) = criterion_5();
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        c5,
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(&m_rows),
    ];

    let mut unexpected = 0;
    println!();
    for o in &outcomes {
        let blocked = KNOWN_BLOCKED.contains(&o.id);
        let tag = match (o.passed, blocked) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known, see notes)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected: update KNOWN_BLOCKED)",
        };
        unexpected += usize::from(o.passed == blocked);
        println!("criterion {}: {tag}  {}", o.id, o.title);
        for l in &o.lines {
            println!("    {l}");
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!(
        "\n{passed}/{} criteria pass; {unexpected} unexpected result(s)",
        outcomes.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
