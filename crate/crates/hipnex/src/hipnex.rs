//! The homotopy inexact proximal-Newton extragradient solver.
//!
//! Each iteration, with carried pair `(y, nu)`, base point `x` and proximal
//! parameter `lambda`:
//!
//! 1. return `y` if `F(y) + nu` already vanishes (to rounding);
//! 2. if `(lambda L/2) ||lambda (F(y) + nu) + y - x|| <= theta_hat`, keep the
//!    carried pair (no subproblem solve this iteration);
//! 3. otherwise obtain a relative-error solution of the linearized proximal
//!    inclusion anchored at `y` with center `x` (see [`crate::subproblem`]);
//! 4. if the large-step test `lambda ||y_new - x|| >= eta` passes (ties taken
//!    as large), move `x` by the under-relaxed extragradient step
//!    `x <- x - tau lambda (F(y_new) + nu_new)` and shrink
//!    `lambda <- (1 - tau) lambda`; otherwise keep `x` and grow
//!    `lambda <- lambda / (1 - tau)`.
//!
//! Averaged certificates accumulate over the large-step subsequence only;
//! restricted to those indices the iterates form a large-step under-relaxed
//! HPE sequence with relative error `sigma = 2 theta_hat/(eta L)`, which is
//! what the rate and budget guarantees attach to. Two quantities are monitored
//! every iteration because the analysis proves them invariant:
//!
//! - invariant A: `(lambda L/2) ||lambda (F(y_prev) + nu_prev) + y_prev - x||
//!   <= theta`;
//! - invariant B: the same expression at the accepted pair, bounded by
//!   `theta_hat`;
//!
//! plus the closed form `lambda_{k+1} = (1-tau)^(a_k - b_k) lambda_1`. A
//! breach beyond slack is a bug somewhere, so strict mode turns it into an
//! error while lenient mode records a warning.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::clock::Clock;
use crate::cost::CostCounters;
use crate::ergodic::{ErgodicAccumulator, ErgodicCertificate};
use crate::linalg;
use crate::math;
use crate::params::{init_lambda, ParamError, Params};
use crate::problem::{ProblemError, VIProblem};
use crate::subproblem::{self, Backend, SubproblemContext, SubproblemError, SubproblemOptions};

/// When to stop a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Stop at the first certificate (pointwise or averaged) within `rho`.
    FirstSuccess,
    /// Keep iterating until both certificate families have reached `rho`
    /// (used to measure per-family hitting times against the budgets).
    BothCriteria,
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Some iterate carries `||F(y) + nu|| <= rho`.
    PointwiseTolerance,
    /// The averaged certificate satisfies `max(||v_a||, eps_a) <= rho`.
    ErgodicTolerance,
    /// `F(y) + nu` vanished to working precision.
    OperatorZero,
    /// Iteration cap reached without the requested certificate.
    MaxIterations,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::PointwiseTolerance => "pointwise",
            Termination::ErgodicTolerance => "ergodic",
            Termination::OperatorZero => "operator-zero",
            Termination::MaxIterations => "max-iterations",
        }
    }
}

/// Options for one solver run.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Target tolerance `rho`.
    pub rho: f64,
    pub max_iter: u64,
    pub backend: Backend,
    pub subproblem: SubproblemOptions,
    /// Errors on invariant breaches instead of recording warnings.
    pub strict: bool,
    /// Keep per-large-step vectors for post-hoc certificate checks
    /// (memory grows with dimension times large-step count).
    pub record_vectors: bool,
    /// Also accumulate a diagnostic average over *every* iteration. Unlike
    /// the large-step certificate it carries no rate guarantee.
    pub all_iterations_ergodic: bool,
    pub stop: StopRule,
    /// Initial proximal parameter override; the default is the largest value
    /// admissible at the start point.
    pub lambda1: Option<f64>,
    /// Scale factor for the exact-zero return test.
    pub return_tol: f64,
    /// Slack factor for the invariant monitors, applied as
    /// `slack * (1 + theta)`.
    pub invariant_slack: f64,
    /// Relative tolerance for the closed-form parameter law.
    pub lambda_law_rtol: f64,
    /// Fault injection for monitor tests: multiplies `lambda` by 1.5 at the
    /// given iteration. Never set outside tests.
    pub corrupt_lambda_at: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rho: 1e-6,
            max_iter: 1_000_000,
            backend: Backend::Auto,
            subproblem: SubproblemOptions::default(),
            strict: false,
            record_vectors: false,
            all_iterations_ergodic: false,
            stop: StopRule::FirstSuccess,
            lambda1: None,
            return_tol: 1e-14,
            invariant_slack: 1e-8,
            lambda_law_rtol: 1e-10,
            corrupt_lambda_at: None,
        }
    }
}

/// Scalar view of one iteration.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub k: u64,
    /// `lambda_k` in effect during the iteration.
    pub lambda: f64,
    /// Large-step test outcome (`lambda ||y - x_prev|| >= eta`).
    pub large: bool,
    /// True when the carried pair was reused without a subproblem solve.
    pub skipped: bool,
    /// `||F(y_k) + nu_k||`.
    pub residual: f64,
    pub invariant_a: f64,
    pub invariant_b: f64,
    /// `||v_a||` of the running averaged certificate, once one exists.
    pub ergodic_v_norm: Option<f64>,
    pub ergodic_eps: Option<f64>,
    /// Inner iterations spent by this iteration's subproblem solve.
    pub subproblem_inner: u64,
    /// Counter snapshot after the iteration.
    pub cum: CostCounters,
    pub wall_time_s: f64,
}

impl IterationRecord {
    /// Step class label: large/small, with a skip prefix when the carried
    /// pair was reused.
    pub fn step_class(&self) -> &'static str {
        match (self.skipped, self.large) {
            (false, true) => "large",
            (false, false) => "small",
            (true, true) => "skip-large",
            (true, false) => "skip-small",
        }
    }

    fn ergodic_merit(&self) -> Option<f64> {
        match (self.ergodic_v_norm, self.ergodic_eps) {
            (Some(v), Some(e)) => Some(v.max(e)),
            _ => None,
        }
    }
}

/// Full state of one large step, for post-hoc verification.
#[derive(Debug, Clone)]
pub struct LargeStepRecord {
    pub k: u64,
    pub lambda: f64,
    pub y: Vec<f64>,
    pub nu: Vec<f64>,
    /// `F(y) + nu`.
    pub w: Vec<f64>,
    pub x_before: Vec<f64>,
    pub x_after: Vec<f64>,
}

/// Best pointwise certificate seen during a run.
#[derive(Debug, Clone)]
pub struct PointwiseCertificate {
    pub y: Vec<f64>,
    pub nu: Vec<f64>,
    pub residual: f64,
    /// Iteration that produced it (`0` for the start point).
    pub at_iteration: u64,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub termination: Termination,
    /// Iterations executed (the terminating operator-zero probe included).
    pub iterations: u64,
    pub best: PointwiseCertificate,
    pub ergodic: Option<ErgodicCertificate>,
    /// Diagnostic all-iterations average (no guarantee attached); present
    /// only when requested.
    pub ergodic_all_iterations: Option<ErgodicCertificate>,
    pub trace: Vec<IterationRecord>,
    /// Populated only when `record_vectors` was set.
    pub large_steps: Vec<LargeStepRecord>,
    pub x0: Vec<f64>,
    pub final_x: Vec<f64>,
    pub final_y: Vec<f64>,
    pub counters: CostCounters,
    /// Parameter pack actually used (with the finalized `lambda1`).
    pub params_used: Params,
    pub warnings: Vec<String>,
    /// First iteration whose iterate satisfied `||F(y)+nu|| <= rho`.
    pub first_pointwise_success: Option<u64>,
    /// First iteration with an enlargement certificate within `rho` (an
    /// averaged certificate, or any pointwise one, which certifies with
    /// `eps = 0`).
    pub first_ergodic_success: Option<u64>,
    pub wall_time_s: f64,
}

/// Run failures.
#[derive(Debug, Clone)]
pub enum SolverError {
    Param(ParamError),
    Start(ProblemError),
    Subproblem {
        at_iteration: u64,
        source: SubproblemError,
    },
    InvariantBreach {
        at_iteration: u64,
        which: &'static str,
        value: f64,
        bound: f64,
    },
}

impl core::fmt::Display for SolverError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolverError::Param(e) => write!(f, "parameter error: {e}"),
            SolverError::Start(e) => write!(f, "invalid start point: {e}"),
            SolverError::Subproblem {
                at_iteration,
                source,
            } => write!(f, "subproblem failure at iteration {at_iteration}: {source}"),
            SolverError::InvariantBreach {
                at_iteration,
                which,
                value,
                bound,
            } => write!(
                f,
                "{which} breached at iteration {at_iteration}: {value:.17e} > {bound:.17e}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}

impl From<ParamError> for SolverError {
    fn from(e: ParamError) -> Self {
        SolverError::Param(e)
    }
}

/// What a single [`HipnexSolver::step`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// State advanced by one iteration (a record was appended).
    Advanced,
    /// `F(y) + nu` vanished at the carried point; the state is final.
    OperatorZero,
}

/// Incremental solver; [`run`] wraps it for the common case.
pub struct HipnexSolver<'a, P: VIProblem> {
    problem: &'a P,
    params: Params,
    opts: SolverOptions,
    clock: &'a dyn Clock,
    // state
    k: u64,
    x: Vec<f64>,
    y: Vec<f64>,
    nu: Vec<f64>,
    f_y: Vec<f64>,
    w: Vec<f64>,
    lambda: f64,
    a_count: u64,
    b_count: u64,
    res_scale: f64,
    // output under construction
    ergodic: ErgodicAccumulator,
    ergodic_all: Option<ErgodicAccumulator>,
    counters: CostCounters,
    trace: Vec<IterationRecord>,
    large_steps: Vec<LargeStepRecord>,
    best: PointwiseCertificate,
    warnings: Vec<String>,
    x0: Vec<f64>,
}

impl<'a, P: VIProblem> HipnexSolver<'a, P> {
    /// Set up a run from `x0` (projected onto `C` if it is not feasible).
    pub fn new(
        problem: &'a P,
        x0: &[f64],
        params: Params,
        opts: SolverOptions,
        clock: &'a dyn Clock,
    ) -> Result<Self, SolverError> {
        if x0.len() != problem.dim() {
            return Err(SolverError::Start(ProblemError::DimensionMismatch {
                expected: problem.dim(),
                got: x0.len(),
            }));
        }
        if !linalg::all_finite(x0) {
            return Err(SolverError::Start(ProblemError::NonFinite));
        }
        let x = problem.project(x0);
        let y = x.clone();
        let nu = vec![0.0; x.len()];
        let mut counters = CostCounters::new();
        let f_y = problem.eval_f(&y);
        counters.f_evals += 1;
        let w = f_y.clone(); // nu = 0
        let res0 = linalg::norm(&w);
        let params = match opts.lambda1 {
            Some(l1) => params.with_lambda1(l1, res0)?,
            None => {
                let l1 = init_lambda(res0, params.theta, params.lipschitz);
                params.with_lambda1(l1, res0)?
            }
        };
        let best = PointwiseCertificate {
            y: y.clone(),
            nu: nu.clone(),
            residual: res0,
            at_iteration: 0,
        };
        let ergodic_all = opts
            .all_iterations_ergodic
            .then(|| ErgodicAccumulator::new(problem.dim()));
        Ok(Self {
            problem,
            params,
            opts,
            clock,
            k: 1,
            x0: x.clone(),
            lambda: params.lambda1,
            x,
            y,
            nu,
            f_y,
            w,
            a_count: 0,
            b_count: 0,
            res_scale: 1.0 + res0,
            ergodic: ErgodicAccumulator::new(problem.dim()),
            ergodic_all,
            counters,
            trace: Vec::new(),
            large_steps: Vec::new(),
            best,
            warnings: Vec::new(),
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    fn monitor(
        &mut self,
        which: &'static str,
        value: f64,
        bound: f64,
        slack: f64,
    ) -> Result<(), SolverError> {
        if value > bound + slack {
            if self.opts.strict {
                return Err(SolverError::InvariantBreach {
                    at_iteration: self.k,
                    which,
                    value,
                    bound,
                });
            }
            self.warnings.push(format!(
                "iteration {}: {which} {value:.12e} exceeds bound {bound:.12e}",
                self.k
            ));
        }
        Ok(())
    }

    /// Iteration counter of the next step (1-based).
    pub fn iteration(&self) -> u64 {
        self.k
    }

    /// Current proximal parameter.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Best pointwise certificate so far.
    pub fn best(&self) -> &PointwiseCertificate {
        &self.best
    }

    /// One iteration of the main loop.
    pub fn step(&mut self) -> Result<StepOutcome, SolverError> {
        if self.opts.corrupt_lambda_at == Some(self.k) {
            self.lambda *= 1.5;
        }
        let lambda = self.lambda;
        let theta = self.params.theta;
        let theta_hat = self.params.theta_hat;
        let half_ll = 0.5 * lambda * self.params.lipschitz;
        let slack = self.opts.invariant_slack * (1.0 + theta);

        // Exact-zero return test on the carried pair.
        if linalg::norm(&self.w) <= self.opts.return_tol * self.res_scale {
            return Ok(StepOutcome::OperatorZero);
        }

        // Proximal residual of the carried pair; doubles as invariant A and
        // as the skip test.
        let mut prox = linalg::scale(lambda, &self.w);
        for ((p, yi), xi) in prox.iter_mut().zip(&self.y).zip(&self.x) {
            *p += yi - xi;
        }
        let invariant_a = half_ll * linalg::norm(&prox);
        self.monitor("invariant-A", invariant_a, theta, slack)?;
        let skipped = invariant_a <= theta_hat;

        let mut inner = 0;
        if !skipped {
            let ctx = SubproblemContext::new(lambda, &self.y, &self.x, &self.f_y);
            let sol = subproblem::solve(
                self.problem,
                &ctx,
                self.opts.backend,
                &self.opts.subproblem,
                &mut self.counters,
            )
            .map_err(|source| SolverError::Subproblem {
                at_iteration: self.k,
                source,
            })?;
            inner = sol.inner_iterations;
            let f_y_new = self.problem.eval_f(&sol.y);
            self.counters.f_evals += 1;
            self.w = linalg::add(&f_y_new, &sol.nu);
            self.y = sol.y;
            self.nu = sol.nu;
            self.f_y = f_y_new;
        }

        // Invariant B at the accepted pair (on a skip it equals invariant A).
        let invariant_b = if skipped {
            invariant_a
        } else {
            let mut prox_b = linalg::scale(lambda, &self.w);
            for ((p, yi), xi) in prox_b.iter_mut().zip(&self.y).zip(&self.x) {
                *p += yi - xi;
            }
            half_ll * linalg::norm(&prox_b)
        };
        self.monitor("invariant-B", invariant_b, theta_hat, slack)?;

        if let Some(acc) = self.ergodic_all.as_mut() {
            acc.ingest(lambda, &self.y, &self.w);
        }

        // Large-step test; ties count as large.
        let large = lambda * linalg::dist(&self.y, &self.x) >= self.params.eta;
        if large {
            let x_before = self.opts.record_vectors.then(|| self.x.clone());
            linalg::axpy(-self.params.tau * lambda, &self.w, &mut self.x);
            self.a_count += 1;
            self.lambda = (1.0 - self.params.tau) * lambda;
            self.ergodic.ingest(lambda, &self.y, &self.w);
            if let Some(x_before) = x_before {
                self.large_steps.push(LargeStepRecord {
                    k: self.k,
                    lambda,
                    y: self.y.clone(),
                    nu: self.nu.clone(),
                    w: self.w.clone(),
                    x_before,
                    x_after: self.x.clone(),
                });
            }
        } else {
            self.b_count += 1;
            self.lambda = lambda / (1.0 - self.params.tau);
        }

        // Closed-form parameter law.
        let diff = self.a_count as i64 - self.b_count as i64;
        let expected = math::powi(1.0 - self.params.tau, diff as i32) * self.params.lambda1;
        let law_err = (self.lambda - expected).abs();
        self.monitor(
            "lambda-law",
            law_err,
            0.0,
            self.opts.lambda_law_rtol * self.lambda,
        )?;

        let residual = linalg::norm(&self.w);
        if residual < self.best.residual {
            self.best = PointwiseCertificate {
                y: self.y.clone(),
                nu: self.nu.clone(),
                residual,
                at_iteration: self.k,
            };
        }
        let cert = self.ergodic.certificate();
        self.trace.push(IterationRecord {
            k: self.k,
            lambda,
            large,
            skipped,
            residual,
            invariant_a,
            invariant_b,
            ergodic_v_norm: cert.as_ref().map(|c| linalg::norm(&c.v_a)),
            ergodic_eps: cert.as_ref().map(|c| c.eps_a),
            subproblem_inner: inner,
            cum: self.counters,
            wall_time_s: self.clock.elapsed_secs(),
        });
        self.k += 1;
        Ok(StepOutcome::Advanced)
    }

    /// Iterate to termination and package the result.
    pub fn run(mut self) -> Result<RunResult, SolverError> {
        let rho = self.opts.rho;
        let mut first_pointwise: Option<u64> = None;
        let mut first_ergodic: Option<u64> = None;
        let res0 = self.best.residual;
        if res0 <= rho {
            first_pointwise = Some(0);
            first_ergodic = Some(0);
        }

        let mut termination = Termination::MaxIterations;
        let zero_at_start = res0 <= self.opts.return_tol * self.res_scale;
        if first_pointwise.is_some() && !zero_at_start && self.opts.stop == StopRule::FirstSuccess
        {
            termination = Termination::PointwiseTolerance;
        } else {
            while (self.trace.len() as u64) < self.opts.max_iter {
                match self.step()? {
                    StepOutcome::OperatorZero => {
                        termination = Termination::OperatorZero;
                        if first_pointwise.is_none() {
                            first_pointwise = Some(self.trace.len() as u64);
                        }
                        if first_ergodic.is_none() {
                            first_ergodic = first_pointwise;
                        }
                        break;
                    }
                    StepOutcome::Advanced => {
                        let rec = self.trace.last().expect("step pushes a record");
                        let pointwise_hit = rec.residual <= rho;
                        let ergodic_hit = rec.ergodic_merit().is_some_and(|m| m <= rho);
                        if pointwise_hit && first_pointwise.is_none() {
                            first_pointwise = Some(rec.k);
                        }
                        if (ergodic_hit || pointwise_hit) && first_ergodic.is_none() {
                            first_ergodic = Some(rec.k);
                        }
                        let done = match self.opts.stop {
                            StopRule::FirstSuccess => pointwise_hit || ergodic_hit,
                            StopRule::BothCriteria => {
                                first_pointwise.is_some() && first_ergodic.is_some()
                            }
                        };
                        if done {
                            termination = if pointwise_hit {
                                Termination::PointwiseTolerance
                            } else {
                                Termination::ErgodicTolerance
                            };
                            break;
                        }
                    }
                }
            }
        }

        // `iterations` executed equals the records pushed, except the
        // operator-zero probe which pushes none.
        let executed = match termination {
            Termination::OperatorZero => self.trace.len() as u64 + 1,
            _ => self.trace.len() as u64,
        };
        Ok(RunResult {
            termination,
            iterations: executed,
            best: self.best,
            ergodic: self.ergodic.certificate(),
            ergodic_all_iterations: self.ergodic_all.as_ref().and_then(|a| a.certificate()),
            trace: self.trace,
            large_steps: self.large_steps,
            x0: self.x0,
            final_x: self.x,
            final_y: self.y,
            counters: self.counters,
            params_used: self.params,
            warnings: self.warnings,
            first_pointwise_success: first_pointwise,
            first_ergodic_success: first_ergodic,
            wall_time_s: self.clock.elapsed_secs(),
        })
    }
}

/// Solve `0 in F(x) + N_C(x)` from `x0`.
pub fn run<P: VIProblem>(
    problem: &P,
    x0: &[f64],
    params: Params,
    opts: SolverOptions,
    clock: &dyn Clock,
) -> Result<RunResult, SolverError> {
    HipnexSolver::new(problem, x0, params, opts, clock)?.run()
}

// ---------------------------------------------------------------------------
// Post-hoc certificate checks
// ---------------------------------------------------------------------------

/// Rate bounds for a large-step under-relaxed HPE sequence after `k` steps at
/// distance `d0`: pointwise, averaged-operator, and averaged-eps bounds.
pub fn hpe_rate_bounds(tau: f64, sigma: f64, eta: f64, d0: f64, k: u64) -> (f64, f64, f64) {
    let kf = k as f64;
    let pointwise = d0 * d0 / (tau * eta * (1.0 - sigma) * kf);
    let k32 = kf * math::sqrt(kf);
    let t32 = tau * math::sqrt(tau);
    let v_bound = 2.0 * d0 * d0 / (t32 * eta * math::sqrt(1.0 - sigma * sigma) * k32);
    let eps_bound = 2.0 * d0 * d0 * d0 / (t32 * eta * (1.0 - sigma * sigma) * k32);
    (pointwise, v_bound, eps_bound)
}

/// Verification that the large-step subsequence of a run is a valid
/// under-relaxed HPE trajectory.
#[derive(Debug, Clone, Default)]
pub struct SubsequenceReport {
    pub large_steps: u64,
    /// Worst relative excess of `||lambda w + y - x_prev||` over
    /// `sigma ||y - x_prev||`.
    pub relative_error_violation: f64,
    /// Worst relative shortfall of `lambda ||y - x_prev||` below `eta`.
    pub large_step_violation: f64,
    /// Worst relative mismatch of `x_after` against the extragradient update.
    pub extragradient_violation: f64,
    /// Worst mismatch between consecutive base points (`x` must be frozen
    /// between large steps).
    pub frozen_x_violation: f64,
}

impl SubsequenceReport {
    pub fn max_violation(&self) -> f64 {
        self.relative_error_violation
            .max(self.large_step_violation)
            .max(self.extragradient_violation)
            .max(self.frozen_x_violation)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Check the four large-step identities on a recorded run
/// (requires `record_vectors`).
///
/// For each logged large step, with `x_prev` the base point before it:
/// relative error `||lambda w + y - x_prev|| <= sigma ||y - x_prev||`, the
/// large-step inequality, the extragradient identity
/// `x_after = x_prev - tau lambda w`, and the freeze of `x` since the
/// previous large step.
pub fn check_hpe_subsequence(result: &RunResult, params: &Params) -> SubsequenceReport {
    let mut report = SubsequenceReport {
        large_steps: result.large_steps.len() as u64,
        ..Default::default()
    };
    let mut prev_after: &[f64] = &result.x0;
    for rec in &result.large_steps {
        // x frozen between large steps: the base point this step started from
        // must be exactly the previous large step's output.
        report.frozen_x_violation = report
            .frozen_x_violation
            .max(linalg::dist(&rec.x_before, prev_after) / (1.0 + linalg::norm(prev_after)));

        let mut res = linalg::scale(rec.lambda, &rec.w);
        for ((r, yi), xi) in res.iter_mut().zip(&rec.y).zip(&rec.x_before) {
            *r += yi - xi;
        }
        let lhs = linalg::norm(&res);
        let rhs = params.sigma * linalg::dist(&rec.y, &rec.x_before);
        report.relative_error_violation = report
            .relative_error_violation
            .max((lhs - rhs) / (rhs + f64::MIN_POSITIVE));

        let step_measure = rec.lambda * linalg::dist(&rec.y, &rec.x_before);
        report.large_step_violation = report
            .large_step_violation
            .max((params.eta - step_measure) / params.eta);

        let mut x_expect = rec.x_before.clone();
        linalg::axpy(-params.tau * rec.lambda, &rec.w, &mut x_expect);
        report.extragradient_violation = report
            .extragradient_violation
            .max(linalg::dist(&x_expect, &rec.x_after) / (1.0 + linalg::norm(&x_expect)));

        prev_after = &rec.x_after;
    }
    report
}

/// Proven-rate conformance of a run against a known solution distance.
#[derive(Debug, Clone, Default)]
pub struct RateBoundReport {
    pub large_steps: u64,
    /// Worst relative excess of the running-best pointwise residual over its
    /// bound, across all large-step counts.
    pub pointwise_violation: f64,
    pub ergodic_v_violation: f64,
    pub ergodic_eps_violation: f64,
    /// Worst negative excursion of `eps_a` relative to its natural scale.
    pub eps_negativity: f64,
}

impl RateBoundReport {
    pub fn max_violation(&self) -> f64 {
        self.pointwise_violation
            .max(self.ergodic_v_violation)
            .max(self.ergodic_eps_violation)
            .max(self.eps_negativity)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Replay the large-step log and check, at every large-step count `k`, the
/// pointwise `O(1/k)` and averaged `O(1/k^{3/2})` bounds with distance `d0`
/// from the start point to the solution set (requires `record_vectors`).
pub fn check_rate_bounds(result: &RunResult, d0: f64, params: &Params) -> RateBoundReport {
    let mut report = RateBoundReport {
        large_steps: result.large_steps.len() as u64,
        ..Default::default()
    };
    if result.large_steps.is_empty() {
        return report;
    }
    let dim = result.x0.len();
    let mut acc = ErgodicAccumulator::new(dim);
    let mut best_res = f64::INFINITY;
    for (idx, rec) in result.large_steps.iter().enumerate() {
        let k = (idx + 1) as u64;
        best_res = best_res.min(linalg::norm(&rec.w));
        acc.ingest(rec.lambda, &rec.y, &rec.w);
        let cert = acc.certificate().expect("nonempty accumulator");
        let (p_bound, v_bound, e_bound) =
            hpe_rate_bounds(params.tau, params.sigma, params.eta, d0, k);
        report.pointwise_violation = report
            .pointwise_violation
            .max((best_res - p_bound) / p_bound);
        let v_norm = linalg::norm(&cert.v_a);
        report.ergodic_v_violation = report.ergodic_v_violation.max((v_norm - v_bound) / v_bound);
        report.ergodic_eps_violation = report
            .ergodic_eps_violation
            .max((cert.eps_a - e_bound) / e_bound);
        report.eps_negativity = report
            .eps_negativity
            .max((-cert.eps_a - 1e-10 * cert.eps_scale()) / cert.eps_scale());
    }
    report
}

#[cfg(test)]
mod tests {
    #![allow(clippy::type_complexity)]

    use super::*;
    use crate::clock::NullClock;
    use crate::params::derive_params;
    use crate::problem::FnProblem;

    fn options(rho: f64) -> SolverOptions {
        SolverOptions {
            rho,
            strict: true,
            record_vectors: true,
            ..SolverOptions::default()
        }
    }

    fn scalar_identity(
    ) -> FnProblem<impl Fn(&[f64]) -> Vec<f64>, impl Fn(&[f64], &[f64]) -> Vec<f64>> {
        FnProblem {
            dim: 1,
            lipschitz: 1.0,
            f: |x: &[f64]| x.to_vec(),
            jacobian: |_: &[f64], d: &[f64]| d.to_vec(),
        }
    }

    #[test]
    fn zero_operator_returns_immediately() {
        let p = FnProblem {
            dim: 3,
            lipschitz: 1.0,
            f: |_: &[f64]| vec![0.0; 3],
            jacobian: |_: &[f64], _: &[f64]| vec![0.0; 3],
        };
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let result = run(&p, &[1.0, 2.0, 3.0], params, options(1e-6), &NullClock).unwrap();
        assert_eq!(result.termination, Termination::OperatorZero);
        assert_eq!(result.iterations, 1);
        assert_eq!(result.counters.linear_solves, 0);
        assert_eq!(result.final_y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn hand_simulated_first_iterations_on_scalar_problem() {
        // F(t) = t with x0 = y0 = 1, sigma_hat = 0, L = 1. Hand derivation:
        // lambda1 = 1; iteration 1 solves (1+1)(y-1) = -1 so y1 = 0.5, the
        // large-step test 1*|0.5-1| = 0.5 < eta = 2 makes it small, so
        // lambda2 = 1/(1-tau) = 1.148331477354788; iteration 2 then skips
        // (carried residual 0.0426 <= theta_hat) and stays small.
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-12);
        opts.max_iter = 2;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        assert_eq!(result.params_used.lambda1, 1.0);
        let r1 = &result.trace[0];
        assert!(!r1.skipped);
        assert!(!r1.large);
        assert!((result.final_y[0] - 0.5).abs() < 1e-15);
        assert!((result.trace[1].lambda - 1.148_331_477_354_788).abs() < 1e-12);
        let r2 = &result.trace[1];
        assert!(r2.skipped);
        assert!(!r2.large);
        assert!((r2.invariant_a - 0.042_583_426_132_260_6).abs() < 1e-12);
    }

    #[test]
    fn scalar_problem_solves_to_tolerance() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let result = run(&p, &[1.0], params, options(1e-10), &NullClock).unwrap();
        assert!(matches!(
            result.termination,
            Termination::PointwiseTolerance | Termination::ErgodicTolerance
        ));
        assert!(result.warnings.is_empty());
    }

    #[test]
    fn lambda_follows_closed_form_law() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-9);
        opts.max_iter = 200;
        opts.stop = StopRule::BothCriteria;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        let tau = result.params_used.tau;
        let lambda1 = result.params_used.lambda1;
        let mut a = 0i64;
        let mut b = 0i64;
        for rec in &result.trace {
            if rec.large {
                a += 1;
            } else {
                b += 1;
            }
            // lambda recorded at iteration k+1 equals the law after k steps
            let expected = math::powi(1.0 - tau, (a - b) as i32) * lambda1;
            if let Some(next) = result.trace.get(rec.k as usize) {
                assert!(
                    (next.lambda - expected).abs() <= 1e-10 * expected.abs(),
                    "lambda law at k={}",
                    rec.k
                );
            }
        }
        // explicit instance of the law: a=3, b=1 gives (1-tau)^2 lambda1
        assert!((math::powi(1.0 - 0.1, 3 - 1) - 0.81).abs() < 1e-15);
    }

    #[test]
    fn small_steps_never_move_x() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-9);
        opts.stop = StopRule::BothCriteria;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        // reconstruct: x changes exactly at large steps
        let mut x = result.x0.clone();
        let mut log_iter = result.large_steps.iter();
        for rec in &result.trace {
            if rec.large {
                let ls = log_iter.next().unwrap();
                assert_eq!(ls.k, rec.k);
                assert_eq!(ls.x_before, x, "x moved on a small step before k={}", rec.k);
                x = ls.x_after.clone();
            }
        }
        assert_eq!(x, result.final_x);
    }

    #[test]
    fn skip_iterations_do_no_subproblem_work() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-9);
        opts.stop = StopRule::BothCriteria;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        let mut prev_solves = 0;
        for rec in &result.trace {
            if rec.skipped {
                assert_eq!(
                    rec.cum.linear_solves, prev_solves,
                    "skip at k={} did subproblem work",
                    rec.k
                );
            }
            prev_solves = rec.cum.linear_solves;
        }
        assert!(result.trace.iter().any(|r| r.skipped));
    }

    #[test]
    fn subsequence_checks_pass_and_detect_corruption() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-9);
        opts.stop = StopRule::BothCriteria;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        assert!(!result.large_steps.is_empty());
        let report = check_hpe_subsequence(&result, &result.params_used);
        assert!(
            report.passed(1e-8),
            "max violation {}",
            report.max_violation()
        );

        // Negative control: perturb one lambda and the checks must notice.
        let mut corrupted = result.clone();
        corrupted.large_steps[0].lambda *= 1.5;
        let bad = check_hpe_subsequence(&corrupted, &corrupted.params_used);
        assert!(!bad.passed(1e-8));
    }

    #[test]
    fn subsequence_check_vacuous_without_large_steps() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-3);
        opts.max_iter = 1;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        let report = check_hpe_subsequence(&result, &result.params_used);
        assert_eq!(report.large_steps, 0);
        assert!(report.passed(1e-8));
    }

    #[test]
    fn rate_bounds_hold_on_scalar_problem() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-10);
        opts.stop = StopRule::BothCriteria;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        let d0 = 1.0; // solution is 0, x0 = 1
        let report = check_rate_bounds(&result, d0, &result.params_used);
        assert!(report.large_steps > 0);
        assert!(report.passed(1e-10), "violations {report:?}");
    }

    #[test]
    fn all_iterations_accumulator_is_optional_diagnostic() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-8);
        opts.all_iterations_ergodic = true;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        let all = result.ergodic_all_iterations.expect("requested diagnostic");
        assert_eq!(all.count, result.iterations);
        // the guaranteed certificate averages only the large-step subsequence
        let guaranteed = result.ergodic.expect("large steps occurred");
        assert!(guaranteed.count < all.count);

        let mut opts = options(1e-8);
        opts.all_iterations_ergodic = false;
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        assert!(result.ergodic_all_iterations.is_none());
    }

    #[test]
    fn terminating_certificate_is_normal() {
        use crate::problem::check_normal_cone;
        use crate::problems::{gen_box, BoxVipSpec};
        use crate::subproblem::Backend;
        let p = gen_box(&BoxVipSpec::new(15, 11));
        let params = derive_params(0.25, 1.0, None, None).unwrap();
        let mut opts = options(1e-7);
        opts.backend = Backend::Tseng;
        opts.subproblem.sigma_hat = 0.25;
        let x0 = p.project(&[2.0; 15]);
        let result = run(&p, &x0, params, opts, &NullClock).unwrap();
        assert_eq!(result.termination, Termination::PointwiseTolerance);
        assert!(check_normal_cone(
            &p,
            &result.best.y,
            &result.best.nu,
            1e-8 * (1.0 + linalg::norm(&result.best.y))
        ));
        // the averaged certificate survives the sampled enlargement check
        let cert = result.ergodic.as_ref().expect("large steps occurred");
        let v = crate::ergodic::sample_enlargement_violation(&p, cert, 300, 5, 3.0);
        assert!(v <= 1e-9, "enlargement diagnostic violated: {v}");
    }

    #[test]
    fn fault_injection_trips_strict_mode() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-9);
        opts.corrupt_lambda_at = Some(2);
        let err = run(&p, &[1.0], params, opts, &NullClock).unwrap_err();
        assert!(matches!(err, SolverError::InvariantBreach { .. }), "{err}");
    }

    #[test]
    fn fault_injection_warns_in_lenient_mode() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-9);
        opts.strict = false;
        opts.corrupt_lambda_at = Some(2);
        let result = run(&p, &[1.0], params, opts, &NullClock).unwrap();
        assert!(!result.warnings.is_empty());
    }

    #[test]
    fn start_point_within_tolerance_short_circuits() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let result = run(&p, &[1e-8], params, options(1e-6), &NullClock).unwrap();
        assert_eq!(result.termination, Termination::PointwiseTolerance);
        assert_eq!(result.iterations, 0);
        assert_eq!(result.first_pointwise_success, Some(0));
    }

    #[test]
    fn rejects_bad_start() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        assert!(matches!(
            run(&p, &[1.0, 2.0], params, options(1e-6), &NullClock),
            Err(SolverError::Start(_))
        ));
        assert!(matches!(
            run(&p, &[f64::NAN], params, options(1e-6), &NullClock),
            Err(SolverError::Start(_))
        ));
    }

    #[test]
    fn lambda1_override_validated() {
        let p = scalar_identity();
        let params = derive_params(0.0, 1.0, None, None).unwrap();
        let mut opts = options(1e-6);
        opts.lambda1 = Some(10.0); // far above sqrt(2 theta / (L * 1))
        assert!(matches!(
            run(&p, &[1.0], params, opts, &NullClock),
            Err(SolverError::Param(_))
        ));
    }
}
