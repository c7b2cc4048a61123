//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with its measured runtime (visible under
//! `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use hipnex::checks::{
    budget_suite, ergodic_suite, hpe_suite, invariant_suite, params_suite, rate_suite,
    subproblem_suite, CheckReport,
};
use hipnex::clock::WallClock;
use hipnex::hipnex::{run, SolverOptions};
use hipnex::linalg;
use hipnex::params::derive_params;
use hipnex::problem::VIProblem;
use hipnex::problems::{gen_cubic_minmax, standard_initial_point, CubicMinMaxSpec};
use hipnex::subproblem::Backend;

fn report_line(id: u32, name: &str, passed: bool, started: Instant, limit_s: f64) -> bool {
    let elapsed = started.elapsed().as_secs_f64();
    let in_time = elapsed <= limit_s;
    println!(
        "acceptance {id} ({name}): {} [{elapsed:.2}s / limit {limit_s:.0}s]",
        if passed && in_time { "PASS" } else { "FAIL" }
    );
    passed && in_time
}

fn assert_reports(id: u32, name: &str, reports: &[CheckReport], started: Instant, limit_s: f64) {
    for r in reports {
        if !r.passed {
            println!("  {r}");
            for d in &r.details {
                println!("    {d}");
            }
        }
    }
    let ok = report_line(id, name, reports.iter().all(|r| r.passed), started, limit_s);
    assert!(ok, "{name}: {reports:#?}");
}

#[test]
fn acceptance_1_parameter_pack() {
    let t = Instant::now();
    let report = params_suite(1000, 20240811);
    assert_reports(1, "parameter pack", &[report], t, 1.0);
}

#[test]
fn acceptance_2_invariant_suite() {
    let t = Instant::now();
    let reports = invariant_suite();
    assert_reports(2, "per-iteration invariants", &reports, t, 30.0);
}

#[test]
fn acceptance_3_rate_bounds() {
    let t = Instant::now();
    let reports = rate_suite();
    assert_reports(3, "rate bounds", &reports, t, 60.0);
}

#[test]
fn acceptance_4_budget_conformance() {
    let t = Instant::now();
    let reports = budget_suite();
    assert_reports(4, "iteration budgets", &reports, t, 60.0);
}

#[test]
fn acceptance_5_subproblem_contracts() {
    let t = Instant::now();
    let reports = subproblem_suite(100, 99);
    assert_reports(5, "subproblem contracts", &reports, t, 60.0);
}

#[test]
fn acceptance_6_hpe_driver() {
    let t = Instant::now();
    let report = hpe_suite();
    assert_reports(6, "HPE driver bounds", &[report], t, 10.0);
}

/// Benchmark direction: the homotopy method against NPE on the cubic saddle
/// instance at n = 200 over three seeds with shared start points, both with
/// the Krylov back-end at matched inexactness, compared on completed
/// subproblem solves at `rho = 1e-6`. The homotopy method must need no more
/// solves on at least two of the three seeds.
#[test]
fn acceptance_7_benchmark_direction() {
    use hipnex::baselines::{npe_run, NpeConfig};
    let t = Instant::now();
    let n = 200;
    let rho = 1e-6;
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in [1u64, 2, 3] {
        let p = gen_cubic_minmax(&CubicMinMaxSpec::new(n, seed));
        let x0 = standard_initial_point(2 * n, seed);

        let params = derive_params(0.25, p.lipschitz(), None, None).unwrap();
        let mut opts = SolverOptions {
            rho,
            backend: Backend::Krylov,
            max_iter: 200_000,
            ..SolverOptions::default()
        };
        opts.subproblem.sigma_hat = 0.25;
        let clock = WallClock::start();
        let h = run(&p, &x0, params, opts, &clock).expect("homotopy run");

        let mut cfg = NpeConfig {
            backend: Backend::Krylov,
            ..NpeConfig::default()
        };
        cfg.subproblem.sigma_hat = 0.25;
        let clock = WallClock::start();
        let np = npe_run(&p, &cfg, &x0, rho, 200_000, &clock).expect("npe run");

        assert!(h.best.residual <= rho, "homotopy missed tolerance");
        assert!(np.best.residual <= rho, "npe missed tolerance");
        if h.counters.linear_solves <= np.counters.linear_solves {
            wins += 1;
        }
        lines.push(format!(
            "  seed {seed}: hipnex {} solves vs npe {} solves",
            h.counters.linear_solves, np.counters.linear_solves
        ));
    }
    for line in &lines {
        println!("{line}");
    }
    let ok = report_line(7, "benchmark direction", wins >= 2, t, 300.0);
    assert!(
        ok,
        "homotopy method needed more subproblem solves than NPE on {} of 3 seeds;\n{}\n\
         a warm-started bracketing search makes the NPE baseline cheaper per solve\n\
         than the homotopy schedule at this scale; see the decisions ledger",
        3 - wins,
        lines.join("\n")
    );
}

#[test]
fn acceptance_8_end_to_end_solution() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for seed in [1u64, 2, 3] {
        let p = gen_cubic_minmax(&CubicMinMaxSpec::new(50, seed));
        let x0 = standard_initial_point(100, seed);
        let params = derive_params(0.25, p.lipschitz(), None, None).unwrap();
        let mut opts = SolverOptions {
            rho: 1e-8,
            backend: Backend::Krylov,
            max_iter: 200_000,
            ..SolverOptions::default()
        };
        opts.subproblem.sigma_hat = 0.25;
        let clock = WallClock::start();
        let result = run(&p, &x0, params, opts, &clock).expect("solver run");
        let err = linalg::dist(&result.best.y, p.known_solution().unwrap());
        println!("  seed {seed}: distance to closed-form solution {err:.3e}");
        worst = worst.max(err);
    }
    let ok = report_line(8, "end-to-end solution accuracy", worst <= 1e-4, t, 30.0);
    assert!(ok, "worst distance {worst:.3e} > 1e-4");
}

#[test]
fn acceptance_9_ergodic_streaming_identity() {
    let t = Instant::now();
    let report = ergodic_suite();
    assert_reports(9, "ergodic streaming identity", &[report], t, 10.0);
}
