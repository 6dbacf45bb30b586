//! `enpt`: error-versus-lambda sweeps, box level diagrams and the per-order
//! cost benchmark, written as CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use enpt_core::experiment::{
    benchmark_order_scaling, default_lambda_range, lambda_grid, run_levels, run_sweep,
    write_bench_csv, write_levels_csv, write_sweep_csv, BenchConfig, LevelsConfig, Method,
    SweepConfig,
};
use enpt_core::nondegenerate::{DEFAULT_K_MAX, DEFAULT_TOL};
use enpt_core::{Error, Scheme, SystemKind};

#[derive(Debug, Parser)]
#[command(
    name = "enpt",
    version,
    about = "Perturbation-theory experiments on model Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energies and errors over a lambda grid, one row per (lambda, method, order).
    Sweep(SweepArgs),
    /// Lowest box levels over a lambda grid from dense diagonalization.
    Levels(LevelsArgs),
    /// Per-order timing of the iteration against the nested Brillouin-Wigner sums.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Model system: oscillator or box.
    #[arg(long)]
    system: Option<SystemKind>,
    /// Partitioning: en or standard.
    #[arg(long)]
    partition: Option<Scheme>,
    /// Comma-separated methods: iterative, rspt, bwpt_sc, bwpt_prior, qd_iterative, qd_second.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Comma-separated orders (iterate indices for the iterative methods).
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    lambda_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda_max: Option<f64>,
    /// Number of grid intervals; 0 gives the single point lambda-min.
    #[arg(long)]
    lambda_steps: Option<usize>,
    #[arg(long)]
    n_basis: Option<usize>,
    /// Target state label (oscillator from 0, box from 1).
    #[arg(long)]
    target_state: Option<usize>,
    /// Comma-separated model-space labels for the quasi-degenerate methods.
    #[arg(long, value_delimiter = ',')]
    model_space: Option<Vec<usize>>,
    /// Early-stop tolerance of the iterative methods.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration budget; also the largest iterate index accepted in --orders.
    #[arg(long)]
    k_max: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for compatibility; every run is deterministic already.
    #[arg(long)]
    seedless: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct LevelsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of lowest levels per lambda.
    #[arg(long, default_value_t = 4)]
    levels: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coupling strength used for the timing runs.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Highest nested-sum order timed (order 5 scales as N^4).
    #[arg(long, default_value_t = 4)]
    bw_max_order: usize,
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
}

impl CommonArgs {
    fn system(&self) -> SystemKind {
        self.system.unwrap_or(SystemKind::Oscillator)
    }

    fn lambdas(&self, system: SystemKind) -> Result<Vec<f64>, Error> {
        let (min, max, steps) = default_lambda_range(system);
        lambda_grid(
            self.lambda_min.unwrap_or(min),
            self.lambda_max.unwrap_or(max),
            self.lambda_steps.unwrap_or(steps),
        )
    }

    fn open_output(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn reject(&self, flags: &[(&str, bool)]) -> Result<(), Error> {
        match flags.iter().find(|(_, set)| *set) {
            Some((name, _)) => Err(Error::InvalidInput(format!("--{name} does not apply here"))),
            None => Ok(()),
        }
    }
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let c = args.common;
    let system = c.system();
    let defaults = SweepConfig::new(system);
    let config = SweepConfig {
        partition: c.partition.unwrap_or(defaults.partition),
        methods: c.methods.clone().unwrap_or(defaults.methods),
        orders: c.orders.clone().unwrap_or_else(|| vec![1, 2, 3, 4]),
        lambdas: c.lambdas(system)?,
        n_basis: c.n_basis.unwrap_or(defaults.n_basis),
        target: c.target_state.unwrap_or(defaults.target),
        model_space: c.model_space.clone(),
        tol: c.tol.unwrap_or(DEFAULT_TOL),
        k_max: c.k_max.unwrap_or(DEFAULT_K_MAX),
        ..defaults
    };
    let rows = run_sweep(&config)?;
    write_sweep_csv(c.open_output()?, &rows)?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    eprintln!("sweep: {} rows, {failed} failed", rows.len());
    Ok(if !rows.is_empty() && failed == rows.len() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn levels(args: LevelsArgs) -> Result<ExitCode, Error> {
    let c = args.common;
    if c.system.is_some_and(|s| s != SystemKind::CosineBox) {
        return Err(Error::InvalidInput(
            "level diagrams are only produced for the box".into(),
        ));
    }
    c.reject(&[
        ("partition", c.partition.is_some()),
        ("methods", c.methods.is_some()),
        ("orders", c.orders.is_some()),
        ("target-state", c.target_state.is_some()),
        ("model-space", c.model_space.is_some()),
        ("tol", c.tol.is_some()),
        ("k-max", c.k_max.is_some()),
    ])?;
    let defaults = LevelsConfig::default();
    let config = LevelsConfig {
        lambdas: c.lambdas(SystemKind::CosineBox)?,
        levels: args.levels,
        n_basis: c.n_basis.unwrap_or(defaults.n_basis),
    };
    let rows = run_levels(&config)?;
    write_levels_csv(c.open_output()?, &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let c = args.common;
    c.reject(&[
        ("methods", c.methods.is_some()),
        ("orders", c.orders.is_some()),
        ("lambda-min", c.lambda_min.is_some()),
        ("lambda-max", c.lambda_max.is_some()),
        ("lambda-steps", c.lambda_steps.is_some()),
        ("model-space", c.model_space.is_some()),
        ("tol", c.tol.is_some()),
    ])?;
    let system = c.system();
    let defaults = BenchConfig::default();
    let config = BenchConfig {
        system,
        partition: c.partition.unwrap_or(defaults.partition),
        lambda: args.lambda,
        n_basis: c.n_basis.unwrap_or(defaults.n_basis),
        target: c.target_state.unwrap_or(system.ground_label()),
        k_max: c.k_max.unwrap_or(defaults.k_max),
        bw_max_order: args.bw_max_order,
        repetitions: args.repetitions,
    };
    let rows = benchmark_order_scaling(&config)?;
    write_bench_csv(c.open_output()?, &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Levels(args) => levels(args),
        Command::Bench(args) => bench(args),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
