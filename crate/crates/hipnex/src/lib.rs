//! Solvers for smooth monotone variational inequality problems.
//!
//! The problem solved throughout is: find `x` in a closed convex set `C` with
//! `<F(x), y - x> >= 0` for all `y` in `C`, where `F` is monotone and
//! continuously differentiable with an `L`-Lipschitz derivative. Equivalently,
//! `0 in F(x) + N_C(x)` with `N_C` the normal cone of `C`.
//!
//! The main solver ([`hipnex`]) is a homotopy inexact proximal-Newton
//! extragradient method: each iteration inexactly solves one strongly monotone
//! *linear* variational inequality (the proximal subproblem for the operator
//! linearized at an auxiliary point) and then either performs an under-relaxed
//! extragradient step while shrinking the proximal parameter, or keeps the
//! base point and grows the parameter. No line search or per-iteration
//! bracketing is needed; the multiplicative parameter updates play that role.
//!
//! Module map:
//!
//! - [`problem`]: the [`problem::VIProblem`] abstraction (operator values,
//!   Jacobian actions, projections) and linearization / normal-cone helpers.
//! - [`params`]: derivation and validation of the solver parameter pack, and
//!   worst-case iteration budgets.
//! - [`subproblem`]: relative-error solutions of the linearized proximal
//!   inclusion via a dense direct solve, a matrix-free Krylov method, or a
//!   projected forward-backward (Tseng) method.
//! - [`hipnex`]: the main loop, per-iteration trace, invariant monitors, and
//!   post-hoc certificate checks.
//! - [`ergodic`]: streaming weighted-average certificates.
//! - [`baselines`]: a large-step under-relaxed HPE driver and an NPE method
//!   with per-iteration step-size search, for validation and benchmarks.
//! - [`problems`]: seeded generators for test and benchmark instances with
//!   known solutions.
//! - [`checks`]: runnable verification suites over all of the above.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only enables wall-clock timing and `std::error::Error` impls.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod baselines;
pub mod checks;
pub mod clock;
pub mod cost;
pub mod ergodic;
pub mod hipnex;
pub mod linalg;
pub mod math;
pub mod params;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod subproblem;

pub use clock::{Clock, NullClock};
pub use cost::CostCounters;
pub use ergodic::{ErgodicAccumulator, ErgodicCertificate};
pub use hipnex::{run, HipnexSolver, IterationRecord, RunResult, SolverOptions, Termination};
pub use params::Params;
pub use problem::VIProblem;
pub use subproblem::{ApproxSolution, Backend};

#[cfg(feature = "std")]
pub use clock::WallClock;
