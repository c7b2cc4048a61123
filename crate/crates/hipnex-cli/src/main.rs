//! Command-line runner for the variational-inequality solvers: single runs
//! with trace output, benchmark grids, verification suites, and table
//! rendering.

mod bench;
mod check;
mod config;
mod instance;
mod metrics;
mod run;
mod table;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{parse_backend, FileConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "hipnex",
    version,
    about = "Solvers and benchmarks for smooth monotone variational inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance; writes trace.csv and summary.json
    Run(RunArgs),
    /// Run a methods x sizes x seeds grid with shared initial points
    Bench(BenchArgs),
    /// Run verification suites (params, operators, invariants, rates,
    /// budgets, subproblem, hpe, ergodic, all)
    Check {
        #[arg(default_value = "all")]
        suite: String,
        /// Print per-case details for passing suites too
        #[arg(long)]
        verbose: bool,
    },
    /// Re-render stored JSON summaries as an aligned text table
    Table {
        #[arg(default_value = "out")]
        dir: PathBuf,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Flat TOML config; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rho: Option<f64>,
    /// hipnex | npe | hpe
    #[arg(long)]
    method: Option<String>,
    /// auto | direct | krylov | tseng
    #[arg(long)]
    backend: Option<String>,
    /// Problem size parameter
    #[arg(long)]
    n: Option<usize>,
    /// cubic | affine | box
    #[arg(long)]
    problem: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Invariant breaches abort the run instead of warning
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    sigma_hat: Option<f64>,
    #[arg(long)]
    max_iter: Option<u64>,
    /// Fault injection for monitor tests: perturb lambda at iteration K
    #[arg(long, hide = true)]
    corrupt_lambda: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Parallel workers (0 = one per cell, capped at available cores)
    #[arg(long)]
    jobs: Option<usize>,
}

fn resolve(common: &CommonArgs) -> Result<(RunConfig, FileConfig)> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut config = RunConfig::default();
    config.apply_file(&file)?;
    if let Some(v) = common.seed {
        config.seed = v;
    }
    if let Some(v) = common.rho {
        config.rho = v;
    }
    if let Some(v) = &common.method {
        config.method = v.parse()?;
    }
    if let Some(v) = &common.backend {
        config.backend = parse_backend(v)?;
    }
    if let Some(v) = common.n {
        config.n = v;
    }
    if let Some(v) = &common.problem {
        config.problem = v.parse()?;
    }
    if let Some(v) = &common.out {
        config.out = v.clone();
    }
    if common.strict {
        config.strict = true;
    }
    if let Some(v) = common.sigma_hat {
        config.sigma_hat = v;
    }
    if let Some(v) = common.max_iter {
        config.max_iter = v;
    }
    config.corrupt_lambda_at = common.corrupt_lambda;
    config.validate()?;
    Ok((config, file))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let (config, _) = resolve(&args.common)?;
            run::command(&config)
        }
        Command::Bench(args) => {
            let (config, mut file) = resolve(&args.common)?;
            if let Some(jobs) = args.jobs {
                file.jobs = Some(jobs);
            }
            let plan = bench::plan(config, &file)?;
            bench::command(&plan)
        }
        Command::Check { suite, verbose } => check::command(&suite, verbose),
        Command::Table { dir } => table::command(&dir),
    }
}
