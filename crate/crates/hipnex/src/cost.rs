//! Oracle-call accounting shared by all solvers.
//!
//! The counters pin down what the benchmark tables mean:
//!
//! - `linear_solves`: one direct factorize-and-solve, or one complete Krylov
//!   subproblem solve (however many inner iterations it took).
//! - `inner_iterations`: Krylov matrix-vector products plus Tseng
//!   forward-backward iterations.
//! - Jacobian work is split into full materializations and individual
//!   Jacobian-vector products; reports usually show the combined count with
//!   this breakdown attached.

/// Monotone counters for operator and linear-algebra work.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostCounters {
    /// Evaluations of the operator `F`.
    pub f_evals: u64,
    /// Jacobian-vector products (matrix-free applications of `F'`).
    pub jv_products: u64,
    /// Full Jacobian materializations.
    pub j_materializations: u64,
    /// Completed linear-system solves (direct or one whole Krylov solve).
    pub linear_solves: u64,
    /// Inner iterations across subproblem solvers.
    pub inner_iterations: u64,
    /// Projections onto the feasible set.
    pub projections: u64,
}

impl CostCounters {
    pub fn new() -> Self {
        Self::default()
    }

    /// Combined Jacobian evaluation count (materializations + products).
    pub fn j_evals(&self) -> u64 {
        self.jv_products + self.j_materializations
    }
}
