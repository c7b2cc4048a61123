//! `run`: one solve, one trace CSV, one JSON summary.

use anyhow::{bail, Context, Result};
use hipnex::baselines::{hpe_run_timed, npe_run, ExactResolventOracle, HpeConfig, NpeConfig};
use hipnex::clock::WallClock;
use hipnex::hipnex::{HipnexSolver, SolverOptions, StopRule};
use hipnex::linalg;
use hipnex::params::derive_params;
use hipnex::problem::VIProblem;
use hipnex::problems::standard_initial_point;
use hipnex::subproblem::SubproblemOptions;

use crate::config::{Method, RunConfig};
use crate::instance::{ambient_dim, ProblemInstance};
use crate::metrics::{
    hash_vector, trace_csv, write_atomic, JevalBreakdown, MetricsSummary, TraceRow,
};

pub struct RunArtifacts {
    pub summary: MetricsSummary,
    pub rows: Vec<TraceRow>,
}

/// Execute one configured solve and return the trace plus summary.
pub fn execute(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let problem = ProblemInstance::build(config);
    let dim = ambient_dim(config.problem, config.n);
    let x0 = problem.project(&standard_initial_point(dim, config.seed));
    let x0_hash = hash_vector(&x0);
    let clock = WallClock::start();

    let (rows, termination, best_residual, final_x, counters, warnings, time_s) = match config
        .method
    {
        Method::Hipnex => {
            let params = derive_params(
                config.sigma_hat,
                problem.lipschitz(),
                config.theta,
                config.eta,
            )?;
            let opts = SolverOptions {
                rho: config.rho,
                max_iter: config.max_iter,
                backend: config.backend,
                subproblem: SubproblemOptions {
                    sigma_hat: config.sigma_hat,
                    max_inner: config.max_inner,
                    ..SubproblemOptions::default()
                },
                strict: config.strict,
                record_vectors: false,
                stop: StopRule::FirstSuccess,
                lambda1: config.lambda1,
                corrupt_lambda_at: config.corrupt_lambda_at,
                ..SolverOptions::default()
            };
            let result = HipnexSolver::new(&problem, &x0, params, opts, &clock)?.run()?;
            let rows: Vec<TraceRow> = result
                .trace
                .iter()
                .map(|r| TraceRow {
                    k: r.k,
                    wall_time_s: r.wall_time_s,
                    lambda: r.lambda,
                    residual_norm: r.residual,
                    step_class: r.step_class(),
                    inner_iters: r.subproblem_inner,
                    cum_linear_solves: r.cum.linear_solves,
                    cum_f_evals: r.cum.f_evals,
                    cum_j_evals: r.cum.j_evals(),
                })
                .collect();
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            (
                rows,
                result.termination.as_str(),
                result.best.residual,
                result.final_x,
                result.counters,
                result.warnings.len() as u64,
                result.wall_time_s,
            )
        }
        Method::Npe => {
            let cfg = NpeConfig {
                sigma_l: config.npe_sigma_l,
                sigma_u: config.npe_sigma_u,
                backend: config.backend,
                subproblem: SubproblemOptions {
                    sigma_hat: config.sigma_hat,
                    max_inner: config.max_inner,
                    ..SubproblemOptions::default()
                },
                ..NpeConfig::default()
            };
            let result = npe_run(&problem, &cfg, &x0, config.rho, config.max_iter, &clock)?;
            let mut prev_inner = 0;
            let rows = result
                .trace
                .iter()
                .map(|r| {
                    let inner = r.cum.inner_iterations - prev_inner;
                    prev_inner = r.cum.inner_iterations;
                    TraceRow {
                        k: r.k,
                        wall_time_s: r.wall_time_s,
                        lambda: r.lambda,
                        residual_norm: r.residual,
                        step_class: "large",
                        inner_iters: inner,
                        cum_linear_solves: r.cum.linear_solves,
                        cum_f_evals: r.cum.f_evals,
                        cum_j_evals: r.cum.j_evals(),
                    }
                })
                .collect();
            (
                rows,
                result.termination.as_str(),
                result.best.residual,
                result.final_x,
                result.counters,
                0,
                result.wall_time_s,
            )
        }
        Method::Hpe => {
            let affine = match problem.as_affine() {
                Some(p) => p,
                None => bail!("hpe requires an affine problem"),
            };
            let cfg = HpeConfig::new(config.hpe_tau, 0.0, config.hpe_eta);
            let mut oracle = ExactResolventOracle::new(cfg.eta);
            let steps = config.hpe_steps.min(config.max_iter);
            let result = hpe_run_timed(affine, &mut oracle, &cfg, &x0, steps, &clock)?;
            if let Some(report) = &result.bound_report {
                if !report.passed(1e-9) {
                    eprintln!("warning: rate-bound conformance violated: {report:?}");
                }
            }
            let rows = result
                .iterations
                .iter()
                .map(|r| TraceRow {
                    k: r.k,
                    wall_time_s: r.wall_time_s,
                    lambda: r.lambda,
                    residual_norm: r.residual,
                    step_class: "large",
                    inner_iters: 0,
                    cum_linear_solves: r.cum.linear_solves,
                    cum_f_evals: r.cum.f_evals,
                    cum_j_evals: r.cum.j_evals(),
                })
                .collect();
            let best = result
                .best
                .as_ref()
                .map(|b| b.residual)
                .unwrap_or_else(|| linalg::norm(&problem.eval_f(&x0)));
            let wall = result
                .iterations
                .last()
                .map(|r| r.wall_time_s)
                .unwrap_or(0.0);
            (
                rows,
                "step-count",
                best,
                result.final_x,
                result.counters,
                0,
                wall,
            )
        }
    };

    let final_residual = linalg::norm(&problem.eval_f(&final_x));
    let summary = MetricsSummary {
        method: config.method.as_str().into(),
        backend: format!("{}", config.backend),
        problem: config.problem.as_str().into(),
        n: config.n,
        seed: config.seed,
        rho: config.rho,
        time_s,
        iterations: rows.len() as u64,
        final_residual,
        best_residual,
        linear_solves: counters.linear_solves,
        f_evals: counters.f_evals,
        j_evals: counters.j_evals(),
        j_evals_breakdown: JevalBreakdown {
            materializations: counters.j_materializations,
            jv_products: counters.jv_products,
        },
        inner_iterations: counters.inner_iterations,
        termination: termination.into(),
        warnings,
        x0_hash,
    };
    Ok(RunArtifacts { summary, rows })
}

/// `run` subcommand: execute and persist `trace.csv` + `summary.json`.
pub fn command(config: &RunConfig) -> Result<()> {
    let artifacts = execute(config)?;
    let trace_path = config.out.join("trace.csv");
    write_atomic(&trace_path, &trace_csv(&artifacts.rows))?;
    let summary_path = config.out.join("summary.json");
    let json =
        serde_json::to_string_pretty(&artifacts.summary).context("serializing summary")?;
    write_atomic(&summary_path, &json)?;
    if artifacts.summary.termination == "max-iterations" {
        eprintln!(
            "note: iteration cap {} reached before tolerance {:.1e}",
            config.max_iter, config.rho
        );
    }
    println!(
        "{} {} n={} seed={}: {} after {} iterations, best residual {:.3e}, {} linear solves, {:.2}s",
        artifacts.summary.method,
        artifacts.summary.backend,
        artifacts.summary.n,
        artifacts.summary.seed,
        artifacts.summary.termination,
        artifacts.summary.iterations,
        artifacts.summary.best_residual,
        artifacts.summary.linear_solves,
        artifacts.summary.time_s,
    );
    println!("wrote {}", trace_path.display());
    println!("wrote {}", summary_path.display());
    Ok(())
}
