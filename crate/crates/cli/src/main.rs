use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cngate::config::{parse_config, parse_drive, parse_rabi};
use cngate::model::Couplings;
use cngate::output::{write_sweep, write_time_series};
use cngate::sweep::{find_critical, linspace, run_single, run_sweep, Execution, SweepSpec};
use cngate::verify::run_checks;
use cngate::{InitialState, Method, RunConfig, SweepVariable};

#[derive(Parser)]
#[command(
    name = "cngate",
    version,
    about = "Controlled-NOT pulse simulator for a four-spin chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one pi-pulse and write the density-matrix time series.
    Evolve {
        #[command(flatten)]
        run: RunArgs,
        /// Elements to record, e.g. `0:0,0:1,2:3`.
        #[arg(long, value_delimiter = ',')]
        elements: Option<Vec<String>>,
    },
    /// Sweep M or J and write gate deviations per grid point.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Locate where the worst amplitude deviation crosses the threshold.
    Critical {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run built-in consistency checks.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// rk4 or expm
    #[arg(long)]
    method: Option<Method>,
    /// ground, superposition, superposition-dressed, pure:<c0,c1,c2,c3>, thermal:<theta>
    #[arg(long)]
    initial: Option<InitialState>,
    #[arg(long)]
    phase_dress: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    j: Option<f64>,
    /// One value or four comma-separated values.
    #[arg(long)]
    rabi: Option<String>,
    /// `auto` or an angular frequency.
    #[arg(long)]
    drive: Option<String>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Evaluate grid points one at a time.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct GridArgs {
    /// M or J
    #[arg(long)]
    variable: SweepVariable,
    #[arg(long, requires_all = ["to", "points"], conflicts_with = "values")]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
}

impl RunArgs {
    fn config(&self, base: RunConfig) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_config(&text, base).with_context(|| format!("in {}", path.display()))?
            }
            None => base,
        };
        if let Some(dt) = self.dt {
            cfg.evolution = cfg.evolution.with_dt(dt)?;
        }
        if let Some(m) = self.method {
            cfg.evolution = cfg.evolution.with_method(m);
        }
        if let Some(k) = self.record_every {
            cfg.evolution = cfg.evolution.with_record_every(k);
        }
        if let Some(init) = &self.initial {
            cfg.initial = init.clone();
        }
        if let Some(v) = self.phase_dress {
            cfg.phase_dress = v;
        }
        if let Some(v) = self.threshold {
            cfg.threshold = v;
        }
        if let Some(v) = self.omega0 {
            cfg.model.omega0 = v;
        }
        if let Some(v) = self.m {
            cfg.model.m = v;
        }
        if let Some(v) = self.j {
            cfg.model.couplings = Couplings::Uniform(v);
        }
        if let Some(s) = &self.rabi {
            cfg.model.rabi = parse_rabi(s)?;
        }
        if let Some(s) = &self.drive {
            cfg.model.drive = parse_drive(s)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

impl GridArgs {
    fn values(&self) -> Result<Vec<f64>> {
        match (&self.values, self.from, self.to, self.points) {
            (Some(v), ..) => Ok(v.clone()),
            (None, Some(from), Some(to), Some(n)) => Ok(linspace(from, to, n)),
            _ => bail!("give either --values or --from/--to/--points"),
        }
    }
}

/// Sweeps start from the phase-dressed superposition.
fn sweep_base() -> RunConfig {
    RunConfig {
        initial: InitialState::SuperpositionDressed,
        ..RunConfig::default()
    }
}

fn parse_elements(raw: &[String]) -> Result<Vec<(usize, usize)>> {
    raw.iter()
        .map(|s| {
            let (i, j) = s
                .split_once(':')
                .with_context(|| format!("element '{s}' should look like i:j"))?;
            Ok((i.trim().parse()?, j.trim().parse()?))
        })
        .collect()
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Evolve { run, elements } => {
            let mut cfg = run.config(RunConfig::default())?;
            if let Some(raw) = elements {
                cfg.elements = parse_elements(&raw)?;
                cfg.validate()?;
            }
            let single = run_single(&cfg)?;
            let mut out = open_out(run.out.as_deref())?;
            write_time_series(&mut out, &single.trajectory, &cfg.elements)?;
            out.flush()?;
            let (i, j, worst) = single.report.worst_amp();
            eprintln!(
                "tau = {:.6}  max_amp = {:.3e} at ({i},{j})  max_phase = {:.3e}",
                single.tau, worst, single.report.max_phase
            );
        }
        Command::Sweep { run, grid } => {
            let spec = SweepSpec::new(grid.variable, grid.values()?, run.config(sweep_base())?)?;
            let rows = run_sweep(&spec, run.execution())?;
            let mut out = open_out(run.out.as_deref())?;
            write_sweep(&mut out, &rows)?;
            out.flush()?;
        }
        Command::Critical { run, grid } => {
            let cfg = run.config(sweep_base())?;
            let threshold = cfg.threshold;
            let spec = SweepSpec::new(grid.variable, grid.values()?, cfg)?;
            let rows = run_sweep(&spec, run.execution())?;
            if let Some(path) = &run.out {
                let mut out = open_out(Some(path))?;
                write_sweep(&mut out, &rows)?;
                out.flush()?;
            }
            match find_critical(&rows, threshold)? {
                Some(v) => println!("{}_cr = {v:.6}", grid.variable),
                None => println!(
                    "{} never exceeds threshold {threshold} on this grid",
                    grid.variable
                ),
            }
        }
        Command::Verify => {
            let checks = run_checks()?;
            let mut failed = 0;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag}  {:<55} {}", c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                println!("{failed} of {} checks failed", checks.len());
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
