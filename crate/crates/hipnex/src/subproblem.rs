//! Relative-error solutions of the linearized proximal inclusion.
//!
//! One outer iteration asks for a pair `(y, nu)` with `nu in N_C(y)` and
//!
//! ```text
//! || lambda (F_a(y) + nu) + y - center || <= sigma_hat ||y - anchor||
//! ```
//!
//! where `F_a` is the linearization of `F` at `anchor`. Three back-ends:
//!
//! - [`solve_direct`]: `C` is the whole space, so the inclusion is the linear
//!   system `(lambda F'(anchor) + I)(y - anchor) = -(lambda F(anchor) +
//!   anchor - center)`; factor it densely and solve to machine accuracy.
//! - [`solve_krylov`]: same system, matrix-free restarted GMRES with the
//!   relative stopping rule above evaluated on the current iterate after
//!   every inner step.
//! - [`solve_tseng`]: general `C` through a projection oracle, running the
//!   forward-backward-forward iteration on the strongly monotone affine
//!   operator `G(y) = lambda F_a(y) + y - center`, with the normal-cone
//!   certificate extracted from the projection step.
//!
//! Every back-end recomputes its residual from the definition before
//! returning, so the certificate in [`ApproxSolution`] never relies on solver
//! internals.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::CostCounters;
use crate::linalg::{self, DenseMatrix, SingularMatrix};
use crate::math;
use crate::problem::VIProblem;

/// One proximal subproblem: minimize over the linearization at `anchor` with
/// proximal center `center` and parameter `lambda`.
///
/// `f_anchor` is the cached operator value `F(anchor)`; the outer loops always
/// have it on hand and the back-ends must not recompute it.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemContext<'a> {
    pub lambda: f64,
    pub anchor: &'a [f64],
    pub center: &'a [f64],
    pub f_anchor: &'a [f64],
}

impl<'a> SubproblemContext<'a> {
    pub fn new(lambda: f64, anchor: &'a [f64], center: &'a [f64], f_anchor: &'a [f64]) -> Self {
        assert!(lambda > 0.0, "proximal parameter must be positive");
        assert_eq!(anchor.len(), center.len());
        assert_eq!(anchor.len(), f_anchor.len());
        Self {
            lambda,
            anchor,
            center,
            f_anchor,
        }
    }

    fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// `lambda F(anchor) + anchor - center`, the residual of the inclusion at
    /// the anchor itself (also the negated right-hand side of the linear
    /// system form).
    fn anchor_residual(&self) -> Vec<f64> {
        let mut r = linalg::scale(self.lambda, self.f_anchor);
        for ((ri, ai), ci) in r.iter_mut().zip(self.anchor).zip(self.center) {
            *ri += ai - ci;
        }
        r
    }
}

/// An inexact subproblem answer with its certificate.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub y: Vec<f64>,
    pub nu: Vec<f64>,
    /// `|| lambda (F_a(y) + nu) + y - center ||`, recomputed from scratch.
    pub residual_norm: f64,
    /// `||y - anchor||`.
    pub step_norm: f64,
    /// Inner iterations spent (Krylov matrix-vector products, or Tseng
    /// forward-backward iterations).
    pub inner_iterations: u64,
    /// Complete linear-system solves performed (1 for direct and Krylov).
    pub linear_solves: u64,
    /// Theoretical iteration bound for the Tseng back-end, when applicable.
    pub tseng_jhat: Option<u64>,
}

/// Subproblem back-end selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Direct for unconstrained problems up to dimension 500 (and whenever
    /// `sigma_hat = 0`), Krylov for larger unconstrained problems, Tseng as
    /// soon as a real projection is involved.
    Auto,
    Direct,
    Krylov,
    Tseng,
}

impl Backend {
    /// Resolve `Auto` against a concrete problem and tolerance.
    pub fn resolve(self, problem: &impl VIProblem, sigma_hat: f64) -> Backend {
        match self {
            Backend::Auto => {
                if !problem.unconstrained() {
                    Backend::Tseng
                } else if sigma_hat == 0.0 || problem.dim() <= 500 {
                    Backend::Direct
                } else {
                    Backend::Krylov
                }
            }
            other => other,
        }
    }
}

impl core::fmt::Display for Backend {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Backend::Auto => "auto",
            Backend::Direct => "direct",
            Backend::Krylov => "krylov",
            Backend::Tseng => "tseng",
        };
        f.write_str(s)
    }
}

/// Tuning knobs shared by the iterative back-ends.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemOptions {
    /// Relative-error tolerance `sigma_hat` in `[0, 1/2)`.
    pub sigma_hat: f64,
    /// Cap on Krylov matrix-vector products per solve; `0` means
    /// `max(500, 4 * dim)`.
    pub max_inner: u64,
    /// GMRES restart cycle length.
    pub restart: usize,
    /// Multiplier on the theoretical Tseng iteration bound before giving up.
    /// The bound is computed from an *estimated* operator norm, so a factor
    /// of 2 absorbs the estimation slack.
    pub safety_factor: f64,
    /// Power-iteration steps for operator-norm estimates.
    pub norm_iters: usize,
}

impl Default for SubproblemOptions {
    fn default() -> Self {
        Self {
            sigma_hat: 0.25,
            max_inner: 0,
            restart: 50,
            safety_factor: 2.0,
            norm_iters: 100,
        }
    }
}

impl SubproblemOptions {
    fn effective_max_inner(&self, dim: usize) -> u64 {
        if self.max_inner > 0 {
            self.max_inner
        } else {
            (4 * dim as u64).max(500)
        }
    }
}

/// Back-end failures.
#[derive(Debug, Clone)]
pub enum SubproblemError {
    /// Direct or Krylov requested on a problem with a nontrivial feasible set.
    RequiresUnconstrained,
    /// `sigma_hat = 0` requested from an iterative back-end.
    RequiresExactBackend,
    /// Dense factorization failed.
    Singular(SingularMatrix),
    /// Krylov budget exhausted; carries the best iterate seen.
    KrylovBudgetExhausted {
        best_y: Vec<f64>,
        best_residual: f64,
        best_step_norm: f64,
        matvecs: u64,
    },
    /// Tseng exceeded its safety cap, which signals a bad Lipschitz or
    /// operator-norm estimate rather than a convergence failure.
    TsengCapExceeded {
        cap: u64,
        jhat: u64,
        last_residual: f64,
        last_step_norm: f64,
    },
}

impl core::fmt::Display for SubproblemError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SubproblemError::RequiresUnconstrained => {
                write!(f, "back-end requires an unconstrained problem (C = R^n)")
            }
            SubproblemError::RequiresExactBackend => {
                write!(f, "sigma_hat = 0 needs the direct back-end")
            }
            SubproblemError::Singular(e) => write!(f, "direct solve failed: {e}"),
            SubproblemError::KrylovBudgetExhausted {
                best_residual,
                best_step_norm,
                matvecs,
                ..
            } => write!(
                f,
                "Krylov budget exhausted after {matvecs} products \
                 (best residual {best_residual:.3e} vs step {best_step_norm:.3e})"
            ),
            SubproblemError::TsengCapExceeded {
                cap,
                jhat,
                last_residual,
                last_step_norm,
            } => write!(
                f,
                "Tseng cap {cap} (bound {jhat}) exceeded; residual {last_residual:.3e} \
                 vs step {last_step_norm:.3e}; check the Lipschitz/operator-norm data"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SubproblemError {}

/// Dispatch on a (resolved) back-end.
pub fn solve(
    problem: &impl VIProblem,
    ctx: &SubproblemContext<'_>,
    backend: Backend,
    opts: &SubproblemOptions,
    counters: &mut CostCounters,
) -> Result<ApproxSolution, SubproblemError> {
    match backend.resolve(problem, opts.sigma_hat) {
        Backend::Direct => solve_direct(problem, ctx, counters),
        Backend::Krylov => solve_krylov(
            problem,
            ctx,
            opts.sigma_hat,
            opts.effective_max_inner(ctx.dim()),
            opts.restart,
            counters,
        ),
        Backend::Tseng => solve_tseng(
            problem,
            ctx,
            opts.sigma_hat,
            opts.safety_factor,
            opts.norm_iters,
            counters,
        ),
        Backend::Auto => unreachable!("resolve() never returns Auto"),
    }
}

/// Recompute `e = lambda (F_a(y) + nu) + y - center` from its definition.
fn residual_vector(
    problem: &impl VIProblem,
    ctx: &SubproblemContext<'_>,
    y: &[f64],
    nu: &[f64],
    counters: &mut CostCounters,
) -> Vec<f64> {
    let d = linalg::sub(y, ctx.anchor);
    let jd = problem.apply_jacobian(ctx.anchor, &d);
    counters.jv_products += 1;
    let mut e = vec![0.0; y.len()];
    for i in 0..y.len() {
        e[i] = ctx.lambda * (ctx.f_anchor[i] + jd[i] + nu[i]) + y[i] - ctx.center[i];
    }
    e
}

/// Dense Jacobian at `anchor`: the problem's own materialization when it has
/// one, otherwise column probes through the matrix-free action.
pub fn dense_jacobian(
    problem: &impl VIProblem,
    anchor: &[f64],
    counters: &mut CostCounters,
) -> DenseMatrix {
    if let Some(m) = problem.jacobian_matrix(anchor) {
        counters.j_materializations += 1;
        return m;
    }
    let n = problem.dim();
    let mut cols = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = problem.apply_jacobian(anchor, &e);
        counters.jv_products += 1;
        e[j] = 0.0;
        for i in 0..n {
            cols[(i, j)] = col[i];
        }
    }
    cols
}

// ---------------------------------------------------------------------------
// Direct back-end
// ---------------------------------------------------------------------------

/// Exact solve of the linear system
/// `(lambda F'(anchor) + I)(y - anchor) = -(lambda F(anchor) + anchor - center)`;
/// requires `C` to be the whole space. Returns `nu = 0` and a residual at
/// factorization accuracy.
pub fn solve_direct(
    problem: &impl VIProblem,
    ctx: &SubproblemContext<'_>,
    counters: &mut CostCounters,
) -> Result<ApproxSolution, SubproblemError> {
    if !problem.unconstrained() {
        return Err(SubproblemError::RequiresUnconstrained);
    }
    let n = ctx.dim();
    let jac = dense_jacobian(problem, ctx.anchor, counters);
    let mut system = jac.scaled(ctx.lambda);
    for i in 0..n {
        system[(i, i)] += 1.0;
    }
    let rhs = linalg::scale(-1.0, &ctx.anchor_residual());
    let d = system
        .solve_into(rhs)
        .map_err(SubproblemError::Singular)?;
    counters.linear_solves += 1;
    let y = linalg::add(ctx.anchor, &d);
    let nu = vec![0.0; n];
    let e = residual_vector(problem, ctx, &y, &nu, counters);
    Ok(ApproxSolution {
        residual_norm: linalg::norm(&e),
        step_norm: linalg::norm(&d),
        y,
        nu,
        inner_iterations: 0,
        linear_solves: 1,
        tseng_jhat: None,
    })
}

// ---------------------------------------------------------------------------
// Krylov back-end
// ---------------------------------------------------------------------------

/// Matrix-free restarted GMRES on the same system as [`solve_direct`],
/// stopping at the first inner iterate whose *true* residual satisfies the
/// relative criterion against its own step length.
///
/// The rotation-recurrence residual estimate is used as a cheap screen; any
/// candidate it admits is re-verified with one extra product before being
/// accepted, so stagnation of the estimate cannot produce a false
/// certificate. `inner_iterations` counts every matrix-vector product,
/// verification and restart products included.
pub fn solve_krylov(
    problem: &impl VIProblem,
    ctx: &SubproblemContext<'_>,
    sigma_hat: f64,
    max_inner: u64,
    restart: usize,
    counters: &mut CostCounters,
) -> Result<ApproxSolution, SubproblemError> {
    if !problem.unconstrained() {
        return Err(SubproblemError::RequiresUnconstrained);
    }
    if sigma_hat <= 0.0 {
        return Err(SubproblemError::RequiresExactBackend);
    }
    let n = ctx.dim();
    let restart = restart.max(2).min(n.max(2));
    let lambda = ctx.lambda;

    let mut matvecs: u64 = 0;
    let apply = |v: &[f64], counters: &mut CostCounters, matvecs: &mut u64| -> Vec<f64> {
        let mut out = problem.apply_jacobian(ctx.anchor, v);
        counters.jv_products += 1;
        *matvecs += 1;
        linalg::scale_in_place(lambda, &mut out);
        linalg::axpy(1.0, v, &mut out);
        out
    };

    let rhs = linalg::scale(-1.0, &ctx.anchor_residual());
    let rhs_norm = linalg::norm(&rhs);
    let finish = |d: Vec<f64>, residual: f64, matvecs: u64, counters: &mut CostCounters| {
        counters.linear_solves += 1;
        counters.inner_iterations += matvecs;
        ApproxSolution {
            step_norm: linalg::norm(&d),
            y: linalg::add(ctx.anchor, &d),
            nu: vec![0.0; n],
            residual_norm: residual,
            inner_iterations: matvecs,
            linear_solves: 1,
            tseng_jhat: None,
        }
    };

    if rhs_norm == 0.0 {
        // The anchor already solves the proximal inclusion exactly.
        return Ok(finish(vec![0.0; n], 0.0, 0, counters));
    }

    let mut d_base = vec![0.0; n];
    let mut best: Option<(Vec<f64>, f64, f64)> = None; // (d, residual, step)
    let mut best_score = f64::INFINITY;

    'outer: loop {
        // Residual of the running solution (free while it is still zero).
        let r0 = if d_base.iter().all(|&v| v == 0.0) {
            rhs.clone()
        } else {
            let ad = apply(&d_base, counters, &mut matvecs);
            linalg::sub(&rhs, &ad)
        };
        let beta = linalg::norm(&r0);
        let noise_floor = 1e-13 * (rhs_norm + linalg::norm(&d_base));
        if beta <= noise_floor.max(f64::MIN_POSITIVE) {
            return Ok(finish(d_base, beta, matvecs, counters));
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(restart + 1);
        basis.push(linalg::scale(1.0 / beta, &r0));
        let mut h_cols: Vec<Vec<f64>> = Vec::with_capacity(restart);
        let mut cs: Vec<f64> = Vec::with_capacity(restart);
        let mut sn: Vec<f64> = Vec::with_capacity(restart);
        let mut g = vec![beta];
        let mut cycle_len = 0;

        for j in 0..restart {
            if matvecs >= max_inner {
                break 'outer;
            }
            let w = apply(&basis[j], counters, &mut matvecs);
            let mut w_orth = w;
            let mut h_col = Vec::with_capacity(j + 2);
            for v in basis.iter().take(j + 1) {
                let hij = linalg::dot(v, &w_orth);
                linalg::axpy(-hij, v, &mut w_orth);
                h_col.push(hij);
            }
            let h_next = linalg::norm(&w_orth);
            h_col.push(h_next);
            for i in 0..j {
                let (a, b) = (h_col[i], h_col[i + 1]);
                h_col[i] = cs[i] * a + sn[i] * b;
                h_col[i + 1] = -sn[i] * a + cs[i] * b;
            }
            let r = math::hypot(h_col[j], h_col[j + 1]);
            let (c_j, s_j) = if r == 0.0 {
                (1.0, 0.0)
            } else {
                (h_col[j] / r, h_col[j + 1] / r)
            };
            cs.push(c_j);
            sn.push(s_j);
            h_col[j] = r;
            h_col[j + 1] = 0.0;
            let g_j = g[j];
            g[j] = c_j * g_j;
            g.push(-s_j * g_j);
            h_cols.push(h_col);
            cycle_len = j + 1;

            let res_est = g[j + 1].abs();
            // Candidate iterate: always formed, because the acceptance test is
            // relative to the candidate's own step length.
            let y_small = solve_hessenberg(&h_cols, &g, cycle_len);
            let mut d = d_base.clone();
            for (coef, v) in y_small.iter().zip(basis.iter()) {
                linalg::axpy(*coef, v, &mut d);
            }
            let step = linalg::norm(&d);
            let target = sigma_hat * step;
            let floor = 1e-13 * (rhs_norm + step);
            if res_est <= target.max(floor) {
                let ad = apply(&d, counters, &mut matvecs);
                let res_true = linalg::dist(&ad, &rhs);
                if res_true <= target * (1.0 + 1e-9) + floor {
                    return Ok(finish(d, res_true, matvecs, counters));
                }
                let score = res_true / target.max(f64::MIN_POSITIVE);
                if score < best_score {
                    best_score = score;
                    best = Some((d.clone(), res_true, step));
                }
            }
            if h_next <= 1e-14 * beta {
                // Exact solution inside the current subspace; verify and
                // either accept or restart from it.
                let ad = apply(&d, counters, &mut matvecs);
                let res_true = linalg::dist(&ad, &rhs);
                if res_true <= target * (1.0 + 1e-9) + floor {
                    return Ok(finish(d, res_true, matvecs, counters));
                }
                d_base = d;
                continue 'outer;
            }
            basis.push(linalg::scale(1.0 / h_next, &w_orth));
        }

        // Restart from the cycle's least-squares solution.
        let y_small = solve_hessenberg(&h_cols, &g, cycle_len);
        for (coef, v) in y_small.iter().zip(basis.iter()) {
            linalg::axpy(*coef, v, &mut d_base);
        }
        if matvecs >= max_inner {
            break 'outer;
        }
    }

    let (best_y, best_residual, best_step_norm) = match best {
        Some((d, r, s)) => (linalg::add(ctx.anchor, &d), r, s),
        None => {
            let ad = apply(&d_base, counters, &mut matvecs);
            let r = linalg::dist(&ad, &rhs);
            let s = linalg::norm(&d_base);
            (linalg::add(ctx.anchor, &d_base), r, s)
        }
    };
    counters.inner_iterations += matvecs;
    Err(SubproblemError::KrylovBudgetExhausted {
        best_y,
        best_residual,
        best_step_norm,
        matvecs,
    })
}

/// Back-substitute the Givens-reduced least-squares system.
fn solve_hessenberg(h_cols: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h_cols[j][i] * y[j];
        }
        y[i] = s / h_cols[i][i];
    }
    y
}

// ---------------------------------------------------------------------------
// Tseng back-end
// ---------------------------------------------------------------------------

/// Forward-backward-forward iterations on `G(y) = lambda F_a(y) + y - center`
/// with step `s = 1/(2 L_G)`, `L_G = lambda ||F'(anchor)|| + 1`.
///
/// Each iteration projects once and produces a candidate pair
/// `(y~, nu)` with `nu in N_C(y~)` by construction; the first pair passing
/// the relative criterion is returned. Since `G` is 1-strongly monotone the
/// iteration bound below is explicit, and the solve is capped at
/// `safety_factor` times that bound: overrunning the cap means the operator
/// norm estimate (or the problem's Lipschitz data) is wrong, and is reported
/// instead of looped through.
pub fn solve_tseng(
    problem: &impl VIProblem,
    ctx: &SubproblemContext<'_>,
    sigma_hat: f64,
    safety_factor: f64,
    norm_iters: usize,
    counters: &mut CostCounters,
) -> Result<ApproxSolution, SubproblemError> {
    if sigma_hat <= 0.0 {
        return Err(SubproblemError::RequiresExactBackend);
    }
    let jac_norm = operator_norm_estimate(problem, ctx.anchor, norm_iters, counters);
    let l_g = ctx.lambda * jac_norm + 1.0;
    let s = 1.0 / (2.0 * l_g);
    let (jhat, _omega) = tseng_iteration_bound(sigma_hat, s, l_g);
    let cap = math::ceil_count(safety_factor * jhat as f64).max(jhat);
    tseng_loop(problem, ctx, sigma_hat, s, cap, jhat, counters, None)
}

/// Iteration bound and contraction coefficient for the forward-backward
/// iteration with step `s` on an operator with Lipschitz constant `l_g` and
/// strong-monotonicity modulus 1.
pub fn tseng_iteration_bound(sigma_hat: f64, s: f64, l_g: f64) -> (u64, f64) {
    let sl = s * l_g;
    let omega = 2.0 * s * (1.0 - sl * sl) / (2.0 * s + 1.0 - sl * sl);
    let contraction = if 2.0 * s < 1.0 {
        1.0 / math::sqrt(2.0 * s)
    } else {
        1.0
    }
    .min(1.0 + 1.0 / math::sqrt(1.0 - sl * sl));
    let first = math::ln(2.0 * contraction);
    let second = math::ln(2.0 / (sigma_hat * s) * math::sqrt((1.0 + sl) / (1.0 - sl)));
    let jhat = 1 + math::ceil_count(2.0 / omega * first.max(second));
    (jhat, omega)
}

#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn tseng_loop(
    problem: &impl VIProblem,
    ctx: &SubproblemContext<'_>,
    sigma_hat: f64,
    s: f64,
    cap: u64,
    jhat: u64,
    counters: &mut CostCounters,
    mut observer: Option<&mut dyn FnMut(&[f64])>,
) -> Result<ApproxSolution, SubproblemError> {
    let lambda = ctx.lambda;
    let eval_g = |y: &[f64], counters: &mut CostCounters| -> Vec<f64> {
        let d = linalg::sub(y, ctx.anchor);
        let jd = problem.apply_jacobian(ctx.anchor, &d);
        counters.jv_products += 1;
        let mut g = vec![0.0; y.len()];
        for i in 0..y.len() {
            g[i] = lambda * (ctx.f_anchor[i] + jd[i]) + y[i] - ctx.center[i];
        }
        g
    };

    let mut y_prev = ctx.anchor.to_vec();
    // G(anchor) needs no Jacobian product.
    let mut g_prev = ctx.anchor_residual();
    let noise_floor = 1e-14 * (1.0 + linalg::norm(&g_prev));
    let mut last_residual = f64::INFINITY;
    let mut last_step = 0.0;

    for j in 1..=cap {
        counters.inner_iterations += 1;
        // u = y_prev - s G(y_prev); y~ = P_C(u); nu = (u - y~)/(lambda s)
        let mut u = y_prev.clone();
        linalg::axpy(-s, &g_prev, &mut u);
        let y_tilde = problem.project(&u);
        counters.projections += 1;
        let nu = linalg::scale(1.0 / (lambda * s), &linalg::sub(&u, &y_tilde));
        if let Some(obs) = observer.as_deref_mut() {
            obs(&y_tilde);
        }
        let g_tilde = eval_g(&y_tilde, counters);
        // residual of the candidate pair: lambda (F_a(y~) + nu) + y~ - center
        // = G(y~) + lambda nu
        let mut e = g_tilde.clone();
        linalg::axpy(lambda, &nu, &mut e);
        let residual = linalg::norm(&e);
        let step = linalg::dist(&y_tilde, ctx.anchor);
        last_residual = residual;
        last_step = step;
        if residual <= sigma_hat * step + noise_floor {
            return Ok(ApproxSolution {
                y: y_tilde,
                nu,
                residual_norm: residual,
                step_norm: step,
                inner_iterations: j,
                linear_solves: 0,
                tseng_jhat: Some(jhat),
            });
        }
        // y_next = y~ - s (G(y~) - G(y_prev))
        let mut y_next = y_tilde;
        linalg::axpy(-s, &g_tilde, &mut y_next);
        linalg::axpy(s, &g_prev, &mut y_next);
        g_prev = eval_g(&y_next, counters);
        y_prev = y_next;
    }
    Err(SubproblemError::TsengCapExceeded {
        cap,
        jhat,
        last_residual,
        last_step_norm: last_step,
    })
}

// ---------------------------------------------------------------------------
// Operator norm estimation
// ---------------------------------------------------------------------------

/// Upper estimate of `||F'(anchor)||` by power iteration on the Gram operator
/// of a dense materialization, inflated by a fixed 5% and clipped to cheap
/// certified upper bounds (Frobenius, and the 1-/inf-norm geometric mean).
/// If the iteration produces nothing usable the certified bound itself is
/// returned.
pub fn operator_norm_estimate(
    problem: &impl VIProblem,
    anchor: &[f64],
    iters: usize,
    counters: &mut CostCounters,
) -> f64 {
    let m = dense_jacobian(problem, anchor, counters);
    let upper = m
        .frobenius_norm()
        .min(math::sqrt(m.norm_one() * m.norm_inf()));
    let est = m.spectral_norm_estimate(iters);
    if est.is_finite() && est > 0.0 {
        (1.05 * est).min(upper).max(est)
    } else {
        upper
    }
}
