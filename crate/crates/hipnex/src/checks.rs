//! Runnable verification suites.
//!
//! Each suite exercises one guarantee family on standard seeded instances and
//! returns a [`CheckReport`] with the worst observed violation, normalized so
//! that any value `<= 0` means the property held with margin and anything
//! positive is a real breach. The CLI `check` subcommand prints these; the
//! acceptance tests assert on them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::clock::NullClock;
use crate::cost::CostCounters;
use crate::ergodic::{ergodic_direct, ErgodicAccumulator};
use crate::hipnex::{
    check_hpe_subsequence, check_rate_bounds, run, RunResult, SolverOptions, StopRule,
};
use crate::linalg;
use crate::math;
use crate::params::{
    budget_ergodic, budget_pointwise, budget_pointwise_exactness_free, derive_params,
};
use crate::problem::{
    check_normal_cone, eval_linearization, sample_linearization_bound_violation,
    sample_monotonicity_violation, sample_projection_violation, VIProblem,
};
use crate::problems::{
    gen_affine, gen_box, gen_cubic_minmax, standard_initial_point, AffineMonotoneSpec, BoxVipSpec,
    CubicMinMaxSpec,
};
use crate::rng::{self, Stream};
use crate::subproblem::{
    solve_direct, solve_krylov, solve_tseng, Backend, SubproblemContext,
};

/// Outcome of one suite (or one instance within a suite).
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    /// Worst normalized violation; `<= 0` means every case held with margin.
    pub max_violation: f64,
    pub details: Vec<String>,
}

impl CheckReport {
    fn new(name: String, cases: u64, max_violation: f64) -> Self {
        Self {
            name,
            passed: max_violation <= 0.0,
            cases,
            max_violation,
            details: Vec::new(),
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.details.push(detail);
        self
    }
}

impl core::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{}: {} ({} cases, max violation {:.3e})",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.cases,
            self.max_violation
        )
    }
}

/// `lambda F(anchor) + anchor - center`, recomputed here so the suites do not
/// lean on the solver's internal arithmetic.
fn anchor_residual(ctx: &SubproblemContext<'_>) -> Vec<f64> {
    let mut r = linalg::scale(ctx.lambda, ctx.f_anchor);
    for ((ri, ai), ci) in r.iter_mut().zip(ctx.anchor).zip(ctx.center) {
        *ri += ai - ci;
    }
    r
}

// ---------------------------------------------------------------------------
// Standard instances
// ---------------------------------------------------------------------------

/// The fixed instance set used by the invariant, rate, and budget suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardInstance {
    Cubic { n: usize, seed: u64 },
    Affine { n: usize, seed: u64 },
    Box { n: usize, seed: u64 },
}

impl StandardInstance {
    pub fn label(&self) -> String {
        match self {
            StandardInstance::Cubic { n, seed } => format!("cubic(n={n},seed={seed})"),
            StandardInstance::Affine { n, seed } => format!("affine(n={n},seed={seed})"),
            StandardInstance::Box { n, seed } => format!("box(n={n},seed={seed})"),
        }
    }
}

/// Default roster: cubic at three seeds plus one affine and one box instance.
pub fn standard_roster() -> Vec<StandardInstance> {
    vec![
        StandardInstance::Cubic { n: 50, seed: 1 },
        StandardInstance::Cubic { n: 50, seed: 2 },
        StandardInstance::Cubic { n: 50, seed: 3 },
        StandardInstance::Affine { n: 20, seed: 4 },
        StandardInstance::Box { n: 20, seed: 5 },
    ]
}

/// Solve one roster instance with vector recording on; returns the run, the
/// distance from the start point to the known solution, and a label.
pub fn run_standard_instance(
    inst: StandardInstance,
    rho: f64,
    stop: StopRule,
) -> (RunResult, f64, String) {
    let opts = |sigma_hat: f64, backend: Backend| {
        let mut o = SolverOptions {
            rho,
            backend,
            record_vectors: true,
            stop,
            max_iter: 500_000,
            ..SolverOptions::default()
        };
        o.subproblem.sigma_hat = sigma_hat;
        o
    };
    match inst {
        StandardInstance::Cubic { n, seed } => {
            let p = gen_cubic_minmax(&CubicMinMaxSpec::new(n, seed));
            let x0 = standard_initial_point(2 * n, seed);
            let params = derive_params(0.25, p.lipschitz(), None, None).unwrap();
            let result = run(&p, &x0, params, opts(0.25, Backend::Krylov), &NullClock).unwrap();
            let d0 = linalg::dist(&result.x0, p.known_solution().unwrap());
            (result, d0, inst.label())
        }
        StandardInstance::Affine { n, seed } => {
            let p = gen_affine(&AffineMonotoneSpec::new(n, seed));
            let x0 = standard_initial_point(n, seed);
            let params = derive_params(0.0, p.lipschitz(), None, None).unwrap();
            let result = run(&p, &x0, params, opts(0.0, Backend::Direct), &NullClock).unwrap();
            let d0 = linalg::dist(&result.x0, p.known_solution().unwrap());
            (result, d0, inst.label())
        }
        StandardInstance::Box { n, seed } => {
            let p = gen_box(&BoxVipSpec::new(n, seed));
            let x0 = p.project(&standard_initial_point(n, seed));
            let params = derive_params(0.25, p.lipschitz(), None, None).unwrap();
            let result = run(&p, &x0, params, opts(0.25, Backend::Tseng), &NullClock).unwrap();
            let d0 = linalg::dist(&result.x0, p.known_solution().unwrap());
            (result, d0, inst.label())
        }
    }
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Parameter-pack validity over random `(sigma_hat, L)` draws, the
/// zero-inexactness specializations, and the closed-form budget ordering.
pub fn params_suite(samples: u64, seed: u64) -> CheckReport {
    let mut rng = rng::seeded(seed, Stream::Sampling);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let sh = rng::uniform(&mut rng, 0.0, 0.49);
        let l = math::powf(10.0, rng::uniform(&mut rng, -4.0, 4.0));
        let p = match derive_params(sh, l, None, None) {
            Ok(p) => p,
            Err(_) => {
                worst = worst.max(1.0);
                continue;
            }
        };
        worst = worst.max(p.max_invariant_violation());
        // root residual within 1e-10 relative
        worst = worst.max(p.q(p.tau).abs() / p.q_scale() - 1e-10);
        worst = worst.max(p.tau - 1.0);
    }
    // zero-inexactness identities: theta_hat = theta^2 = (1 - 2*0)/4
    let p0 = derive_params(0.0, 1.0, None, None).unwrap();
    worst = worst.max((p0.theta_hat - p0.theta * p0.theta).abs() - 1e-15);
    worst = worst.max((p0.theta_hat - 0.25).abs() - 1e-15);
    // exact budget never exceeds the closed-form budget
    let mut budget_checked = 0;
    for &d0 in &[0.5, 2.0, 25.0] {
        for &rho in &[1e-2, 1e-6] {
            let exact = budget_pointwise(&p0, d0, rho);
            let closed = budget_pointwise_exactness_free(1.0, p0.lambda1, d0, rho);
            worst = worst.max((exact as f64 - closed as f64) / closed.max(1) as f64);
            budget_checked += 1;
        }
    }
    CheckReport::new(String::from("params"), samples + budget_checked, worst)
}

/// Operator-level sampling checks on each generator family: monotonicity,
/// the quadratic linearization bound with the instance's own Lipschitz
/// constant, and projection idempotence/nonexpansiveness.
pub fn operator_suite() -> Vec<CheckReport> {
    let mut reports = Vec::new();
    let cubic = gen_cubic_minmax(&CubicMinMaxSpec::new(20, 1));
    let affine = gen_affine(&AffineMonotoneSpec::new(20, 2));
    let boxed = gen_box(&BoxVipSpec::new(20, 3));
    let mut push = |name: &str, violation: f64| {
        reports.push(CheckReport::new(
            format!("operators/{name}"),
            1000,
            violation,
        ));
    };
    push(
        "cubic-monotone",
        sample_monotonicity_violation(&cubic, 1000, 11, 3.0) - 1e-10,
    );
    push(
        "cubic-linearization-bound",
        sample_linearization_bound_violation(&cubic, 1000, 12, 3.0) - 1e-10,
    );
    push(
        "affine-monotone",
        sample_monotonicity_violation(&affine, 1000, 13, 3.0) - 1e-10,
    );
    push(
        "affine-linearization-bound",
        sample_linearization_bound_violation(&affine, 1000, 16, 3.0) - 1e-10,
    );
    push(
        "box-monotone",
        sample_monotonicity_violation(&boxed, 1000, 14, 3.0) - 1e-10,
    );
    push(
        "box-linearization-bound",
        sample_linearization_bound_violation(&boxed, 1000, 17, 3.0) - 1e-10,
    );
    push(
        "box-projection",
        sample_projection_violation(&boxed, 1000, 15) - 1e-12,
    );
    reports
}

/// Per-iteration invariants on the standard roster: the carried-pair residual
/// bounded by `theta`, the accepted-pair residual bounded by `theta_hat`
/// (slack `1e-8 (1 + theta)`), and the closed-form parameter law within
/// `1e-10` relative.
pub fn invariant_suite() -> Vec<CheckReport> {
    standard_roster()
        .into_iter()
        .map(|inst| {
            let (result, _, label) = run_standard_instance(inst, 1e-6, StopRule::FirstSuccess);
            let p = &result.params_used;
            let slack = 1e-8 * (1.0 + p.theta);
            let mut worst = f64::NEG_INFINITY;
            let mut a = 0i64;
            let mut b = 0i64;
            for rec in &result.trace {
                worst = worst.max((rec.invariant_a - p.theta - slack) / (1.0 + p.theta));
                worst = worst.max((rec.invariant_b - p.theta_hat - slack) / (1.0 + p.theta_hat));
                if rec.large {
                    a += 1;
                } else {
                    b += 1;
                }
                let expected = math::powi(1.0 - p.tau, (a - b) as i32) * p.lambda1;
                if let Some(next) = result.trace.get(rec.k as usize) {
                    worst = worst.max((next.lambda - expected).abs() / expected - 1e-10);
                }
            }
            CheckReport::new(format!("invariants/{label}"), result.iterations, worst)
                .with_detail(format!("{} warnings", result.warnings.len()))
        })
        .collect()
}

/// Large-step subsequence identities plus the proven pointwise and averaged
/// rate bounds on the known-solution roster.
pub fn rate_suite() -> Vec<CheckReport> {
    standard_roster()
        .into_iter()
        .map(|inst| {
            let (result, d0, label) = run_standard_instance(inst, 1e-6, StopRule::FirstSuccess);
            let sub = check_hpe_subsequence(&result, &result.params_used);
            let rates = check_rate_bounds(&result, d0, &result.params_used);
            // subsequence identities within 1e-8 relative; rate bounds are
            // proven inequalities, so only fp dust (1e-10) is tolerated.
            let worst = (sub.max_violation() - 1e-8).max(rates.max_violation() - 1e-10);
            CheckReport::new(format!("rates/{label}"), sub.large_steps, worst).with_detail(
                format!(
                    "subsequence {:.2e}, rates {:.2e} over {} large steps",
                    sub.max_violation(),
                    rates.max_violation(),
                    rates.large_steps
                ),
            )
        })
        .collect()
}

/// Iteration counts to pointwise and averaged success against the worst-case
/// budgets, at `rho` = 1e-3 and 1e-6.
pub fn budget_suite() -> Vec<CheckReport> {
    standard_roster()
        .into_iter()
        .map(|inst| {
            let (result, d0, label) = run_standard_instance(inst, 1e-6, StopRule::BothCriteria);
            let mut worst = f64::NEG_INFINITY;
            let mut details = Vec::new();
            for &rho in &[1e-3, 1e-6] {
                let first_pw = result.trace.iter().find(|r| r.residual <= rho).map(|r| r.k);
                let first_erg = result
                    .trace
                    .iter()
                    .find(|r| {
                        r.residual <= rho
                            || (r.ergodic_v_norm.is_some_and(|v| v <= rho)
                                && r.ergodic_eps.is_some_and(|e| e <= rho))
                    })
                    .map(|r| r.k);
                let pw_budget = budget_pointwise(&result.params_used, d0, rho);
                let erg_budget = budget_ergodic(&result.params_used, d0, rho);
                match (first_pw, first_erg) {
                    (Some(pw), Some(erg)) => {
                        worst = worst.max((pw as f64 - pw_budget as f64) / pw_budget as f64);
                        worst = worst.max((erg as f64 - erg_budget as f64) / erg_budget as f64);
                        details.push(format!(
                            "rho={rho:.0e}: pointwise {pw}/{pw_budget}, averaged {erg}/{erg_budget}"
                        ));
                    }
                    _ => {
                        worst = worst.max(1.0);
                        details.push(format!("rho={rho:.0e}: tolerance never reached"));
                    }
                }
            }
            let mut report = CheckReport::new(format!("budgets/{label}"), 2, worst);
            for d in details {
                report = report.with_detail(d);
            }
            report
        })
        .collect()
}

/// Back-end certificates on random subproblem instances: the recomputed
/// residual against the relative-error bound, normal-cone membership, the
/// step bound relative to the anchor residual, and the Tseng iteration cap.
pub fn subproblem_suite(instances_per_backend: u64, seed: u64) -> Vec<CheckReport> {
    let sigma_hat = 0.25;
    let mut reports = Vec::new();
    for backend in [Backend::Direct, Backend::Krylov, Backend::Tseng] {
        let mut rng = rng::seeded(seed ^ backend as u64, Stream::Sampling);
        let mut worst = f64::NEG_INFINITY;
        for case in 0..instances_per_backend {
            // Alternate problem families; Tseng additionally sees boxes.
            let pick = case % 3;
            let worst_case = if backend == Backend::Tseng && pick == 2 {
                let p = gen_box(&BoxVipSpec::new(16, seed + case));
                subproblem_case(&p, backend, sigma_hat, &mut rng)
            } else if pick == 1 {
                let p = gen_cubic_minmax(&CubicMinMaxSpec::new(8, seed + case));
                subproblem_case(&p, backend, sigma_hat, &mut rng)
            } else {
                let p = gen_affine(&AffineMonotoneSpec::new(18, seed + case));
                subproblem_case(&p, backend, sigma_hat, &mut rng)
            };
            worst = worst.max(worst_case);
        }
        reports.push(CheckReport::new(
            format!("subproblem/{backend}"),
            instances_per_backend,
            worst,
        ));
    }
    reports
}

fn subproblem_case(
    problem: &impl VIProblem,
    backend: Backend,
    sigma_hat: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> f64 {
    let n = problem.dim();
    let lambda = math::powf(10.0, rng::uniform(rng, -2.0, 2.0));
    let anchor = problem.project(&linalg::scale(2.0, &rng::standard_normal_vec(rng, n)));
    let center = linalg::scale(2.0, &rng::standard_normal_vec(rng, n));
    let f_anchor = problem.eval_f(&anchor);
    let ctx = SubproblemContext::new(lambda, &anchor, &center, &f_anchor);
    let mut counters = CostCounters::new();
    let sol = match backend {
        Backend::Direct => solve_direct(problem, &ctx, &mut counters),
        Backend::Krylov => solve_krylov(problem, &ctx, sigma_hat, 200_000, 50, &mut counters),
        Backend::Tseng => solve_tseng(problem, &ctx, sigma_hat, 2.0, 100, &mut counters),
        Backend::Auto => unreachable!(),
    };
    let sol = match sol {
        Ok(s) => s,
        Err(_) => return 1.0,
    };
    let mut worst = f64::NEG_INFINITY;
    // Independent residual recomputation through the linearization helper.
    let lin = eval_linearization(problem, &anchor, &sol.y).expect("valid candidate");
    let mut e = vec![0.0; n];
    for i in 0..n {
        e[i] = lambda * (lin[i] + sol.nu[i]) + sol.y[i] - center[i];
    }
    let res = linalg::norm(&e);
    let step = linalg::dist(&sol.y, &anchor);
    let scale = 1.0 + linalg::norm(&anchor_residual(&ctx)) + step;
    worst = worst.max((res - sigma_hat * step - 1e-12 * scale) / scale);
    if backend == Backend::Direct {
        // exact-solve contract: residual at factorization accuracy
        worst = worst.max((res - 1e-12 * scale) / scale);
    }
    // normal-cone certificate
    if !check_normal_cone(problem, &sol.y, &sol.nu, 1e-8 * (1.0 + linalg::norm(&sol.y))) {
        worst = worst.max(1.0);
    }
    // step bound against the anchor residual (previous certificate = 0)
    let bound = linalg::norm(&anchor_residual(&ctx)) / (1.0 - sigma_hat);
    worst = worst.max((step - bound - 1e-9 * (1.0 + bound)) / (1.0 + bound));
    // Tseng: explicit iteration bound (cap is twice the theoretical count)
    if let Some(jhat) = sol.tseng_jhat {
        worst = worst.max((sol.inner_iterations as f64 - 2.0 * jhat as f64) / jhat as f64);
    }
    worst
}

/// HPE driver conformance: exact-resolvent oracle on an affine instance with
/// `sigma = 0`, rate bounds at every step count up to 200.
pub fn hpe_suite() -> CheckReport {
    use crate::baselines::{hpe_run, ExactResolventOracle, HpeConfig};
    let p = gen_affine(&AffineMonotoneSpec::new(20, 7));
    let x0 = standard_initial_point(20, 7);
    let cfg = HpeConfig::new(0.5, 0.0, 0.5);
    let mut oracle = ExactResolventOracle::new(cfg.eta);
    match hpe_run(&p, &mut oracle, &cfg, &x0, 200) {
        Ok(result) => {
            let report = result.bound_report.expect("known solution");
            CheckReport::new(String::from("hpe"), 200, report.max_violation() - 1e-9)
        }
        Err(e) => {
            CheckReport::new(String::from("hpe"), 0, 1.0).with_detail(format!("driver failed: {e}"))
        }
    }
}

/// Streaming ergodic identity against the two-pass definition on a long
/// synthetic trace, plus nonnegativity of the accumulated `eps` on a real run.
pub fn ergodic_suite() -> CheckReport {
    let mut rng = rng::seeded(31, Stream::Sampling);
    let dim = 8;
    let mut acc = ErgodicAccumulator::new(dim);
    let mut triples = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        let l = math::powf(10.0, rng::uniform(&mut rng, -3.0, 1.0));
        let y = rng::standard_normal_vec(&mut rng, dim);
        let w = rng::standard_normal_vec(&mut rng, dim);
        acc.ingest(l, &y, &w);
        triples.push((l, y, w));
    }
    let streamed = acc.certificate().expect("nonempty");
    let direct = ergodic_direct(&triples).expect("nonempty");
    let scale = direct.eps_a.abs().max(1e-30);
    let mut worst = (streamed.eps_a - direct.eps_a).abs() / scale - 1e-8;
    worst = worst.max(linalg::dist(&streamed.y_a, &direct.y_a) - 1e-10);
    worst = worst.max(linalg::dist(&streamed.v_a, &direct.v_a) - 1e-10);
    // eps nonnegativity on a real solver trace
    let (result, _, _) = run_standard_instance(
        StandardInstance::Cubic { n: 30, seed: 9 },
        1e-6,
        StopRule::FirstSuccess,
    );
    if let Some(cert) = &result.ergodic {
        worst = worst.max((-cert.eps_a - 1e-10 * cert.eps_scale()) / cert.eps_scale());
    }
    // sampled enlargement diagnostic on a constrained run's certificate
    let boxed = gen_box(&BoxVipSpec::new(20, 5));
    let (result, _, _) =
        run_standard_instance(StandardInstance::Box { n: 20, seed: 5 }, 1e-6, StopRule::FirstSuccess);
    if let Some(cert) = &result.ergodic {
        worst = worst.max(
            crate::ergodic::sample_enlargement_violation(&boxed, cert, 500, 13, 3.0) - 1e-9,
        );
    }
    CheckReport::new(String::from("ergodic"), 10_501, worst)
}

/// Every suite, in a stable order.
pub fn all_suites() -> Vec<CheckReport> {
    let mut reports = vec![params_suite(1000, 20240811)];
    reports.extend(operator_suite());
    reports.extend(invariant_suite());
    reports.extend(rate_suite());
    reports.extend(budget_suite());
    reports.extend(subproblem_suite(100, 99));
    reports.push(hpe_suite());
    reports.push(ergodic_suite());
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_suite_passes() {
        let report = params_suite(200, 1);
        assert!(report.passed, "{report}");
    }

    #[test]
    fn quick_subproblem_suite_passes() {
        for report in subproblem_suite(12, 5) {
            assert!(report.passed, "{report}");
        }
    }

    #[test]
    fn ergodic_suite_passes() {
        let report = ergodic_suite();
        assert!(report.passed, "{report}");
    }
}
