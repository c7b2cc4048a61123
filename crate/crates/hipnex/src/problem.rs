//! Problem and operator abstractions.
//!
//! A [`VIProblem`] bundles everything the solvers may ask of an instance:
//! operator values `F(x)`, Jacobian actions `F'(anchor) d`, an optional dense
//! Jacobian, the orthogonal projection onto the feasible set `C`, and a
//! Lipschitz constant for `F'`. Implementations must be pure: evaluation never
//! mutates the problem, so instances can be shared across threads.

use alloc::vec::Vec;

use crate::linalg::{self, DenseMatrix};
use crate::rng::{self, Stream};

/// A smooth monotone variational inequality instance over `R^dim`.
///
/// Required properties (checked by the sampling validators below, not
/// enforceable by the type system):
///
/// - monotonicity: `<F(a) - F(b), a - b> >= 0` on `C`;
/// - `lipschitz()` bounds the Lipschitz constant of `F'` on `C`;
/// - `project` is the orthogonal projection onto a closed convex set.
pub trait VIProblem {
    fn dim(&self) -> usize;

    /// Upper bound on the Lipschitz constant of the derivative `F'`.
    fn lipschitz(&self) -> f64;

    /// Operator value `F(x)`.
    fn eval_f(&self, x: &[f64]) -> Vec<f64>;

    /// Jacobian action `F'(anchor) * dir`.
    fn apply_jacobian(&self, anchor: &[f64], dir: &[f64]) -> Vec<f64>;

    /// Dense Jacobian at `anchor`, when cheaply available.
    fn jacobian_matrix(&self, _anchor: &[f64]) -> Option<DenseMatrix> {
        None
    }

    /// Orthogonal projection onto the feasible set `C`.
    fn project(&self, z: &[f64]) -> Vec<f64>;

    /// True when `C` is the whole space (projection is the identity).
    fn unconstrained(&self) -> bool {
        false
    }

    /// A known solution of `0 in F(x) + N_C(x)`, for test instances.
    fn known_solution(&self) -> Option<&[f64]> {
        None
    }
}

/// Errors raised by the operator-level helpers.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    DimensionMismatch { expected: usize, got: usize },
    NonFinite,
}

impl core::fmt::Display for ProblemError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProblemError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            ProblemError::NonFinite => write!(f, "vector contains NaN or infinite entries"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ProblemError {}

fn check_dim(problem: &impl VIProblem, v: &[f64]) -> Result<(), ProblemError> {
    if v.len() != problem.dim() {
        return Err(ProblemError::DimensionMismatch {
            expected: problem.dim(),
            got: v.len(),
        });
    }
    if !linalg::all_finite(v) {
        return Err(ProblemError::NonFinite);
    }
    Ok(())
}

/// Value of the linearization of `F` at `anchor`, evaluated at `x`:
/// `F(anchor) + F'(anchor)(x - anchor)`.
pub fn eval_linearization(
    problem: &impl VIProblem,
    anchor: &[f64],
    x: &[f64],
) -> Result<Vec<f64>, ProblemError> {
    check_dim(problem, anchor)?;
    check_dim(problem, x)?;
    let mut out = problem.eval_f(anchor);
    if x != anchor {
        let d = linalg::sub(x, anchor);
        let jd = problem.apply_jacobian(anchor, &d);
        linalg::axpy(1.0, &jd, &mut out);
    }
    Ok(out)
}

/// `||F(x) - (F(anchor) + F'(anchor)(x - anchor))||`.
///
/// For an operator whose derivative is `L`-Lipschitz this never exceeds
/// `(L/2) ||x - anchor||^2`; the sampling suites assert exactly that.
pub fn linearization_error(
    problem: &impl VIProblem,
    anchor: &[f64],
    x: &[f64],
) -> Result<f64, ProblemError> {
    let lin = eval_linearization(problem, anchor, x)?;
    let exact = problem.eval_f(x);
    Ok(linalg::dist(&exact, &lin))
}

/// Normal-cone membership via the projection fixed point: `nu` lies in
/// `N_C(y)` exactly when `project(y + nu) = y`. Checked within `tol`.
pub fn check_normal_cone(problem: &impl VIProblem, y: &[f64], nu: &[f64], tol: f64) -> bool {
    debug_assert_eq!(y.len(), nu.len());
    let shifted = linalg::add(y, nu);
    let back = problem.project(&shifted);
    linalg::dist(&back, y) <= tol
}

// ---------------------------------------------------------------------------
// Sampling validators
// ---------------------------------------------------------------------------

/// Worst observed violation of `<F(a)-F(b), a-b> >= -tol_scale` over sampled
/// pairs in `C`. Nonpositive result means monotonicity held on every pair.
pub fn sample_monotonicity_violation(
    problem: &impl VIProblem,
    pairs: usize,
    seed: u64,
    radius: f64,
) -> f64 {
    let mut rng = rng::seeded(seed, Stream::Sampling);
    let n = problem.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let a = problem.project(&linalg::scale(radius, &rng::standard_normal_vec(&mut rng, n)));
        let b = problem.project(&linalg::scale(radius, &rng::standard_normal_vec(&mut rng, n)));
        let df = linalg::sub(&problem.eval_f(&a), &problem.eval_f(&b));
        let dx = linalg::sub(&a, &b);
        let inner = linalg::dot(&df, &dx);
        let scale = 1.0 + linalg::norm(&a) * linalg::norm(&b);
        worst = worst.max(-inner / scale);
    }
    worst
}

/// Worst relative excess of the linearization error over the quadratic bound
/// `(L/2)||x-y||^2` on sampled pairs. Values `<= tol` certify the bound.
pub fn sample_linearization_bound_violation(
    problem: &impl VIProblem,
    pairs: usize,
    seed: u64,
    radius: f64,
) -> f64 {
    let mut rng = rng::seeded(seed, Stream::Sampling);
    let n = problem.dim();
    let l = problem.lipschitz();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let anchor =
            problem.project(&linalg::scale(radius, &rng::standard_normal_vec(&mut rng, n)));
        let x = problem.project(&linalg::scale(radius, &rng::standard_normal_vec(&mut rng, n)));
        let err = linearization_error(problem, &anchor, &x).expect("sampled points are valid");
        let d = linalg::dist(&x, &anchor);
        let bound = 0.5 * l * d * d;
        worst = worst.max((err - bound) / (1.0 + bound));
    }
    worst
}

/// Finite-difference consistency of `apply_jacobian` with `eval_f`:
/// returns the worst relative mismatch over sampled anchors/directions.
pub fn sample_jacobian_consistency(
    problem: &impl VIProblem,
    samples: usize,
    seed: u64,
    step: f64,
) -> f64 {
    let mut rng = rng::seeded(seed, Stream::Sampling);
    let n = problem.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let anchor = problem.project(&rng::standard_normal_vec(&mut rng, n));
        let mut dir = rng::standard_normal_vec(&mut rng, n);
        let nd = linalg::norm(&dir);
        if nd == 0.0 {
            continue;
        }
        linalg::scale_in_place(1.0 / nd, &mut dir);
        let mut shifted = anchor.clone();
        linalg::axpy(step, &dir, &mut shifted);
        let fd = linalg::scale(1.0 / step, &linalg::sub(&problem.eval_f(&shifted), &problem.eval_f(&anchor)));
        let jd = problem.apply_jacobian(&anchor, &dir);
        let scale = 1.0 + linalg::norm(&jd);
        worst = worst.max(linalg::dist(&fd, &jd) / scale);
    }
    worst
}

/// Worst violation of projection idempotence and nonexpansiveness over
/// sampled points.
pub fn sample_projection_violation(problem: &impl VIProblem, samples: usize, seed: u64) -> f64 {
    let mut rng = rng::seeded(seed, Stream::Sampling);
    let n = problem.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = linalg::scale(3.0, &rng::standard_normal_vec(&mut rng, n));
        let b = linalg::scale(3.0, &rng::standard_normal_vec(&mut rng, n));
        let pa = problem.project(&a);
        let pb = problem.project(&b);
        // idempotence
        worst = worst.max(linalg::dist(&problem.project(&pa), &pa));
        // nonexpansiveness
        worst = worst.max(linalg::dist(&pa, &pb) - linalg::dist(&a, &b));
    }
    worst
}

// ---------------------------------------------------------------------------
// A closure-backed problem, mostly for tests and tiny instances
// ---------------------------------------------------------------------------

/// Problem defined by closures; the projection defaults to the identity.
pub struct FnProblem<F, J> {
    pub dim: usize,
    pub lipschitz: f64,
    pub f: F,
    pub jacobian: J,
}

impl<F, J> VIProblem for FnProblem<F, J>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64], &[f64]) -> Vec<f64>,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn eval_f(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
    fn apply_jacobian(&self, anchor: &[f64], dir: &[f64]) -> Vec<f64> {
        (self.jacobian)(anchor, dir)
    }
    fn project(&self, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }
    fn unconstrained(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    #![allow(clippy::type_complexity)]

    use super::*;
    use alloc::vec;

    /// 1-D F(t) = t^2, F'(t) d = 2 t d; derivative is 2-Lipschitz.
    fn square_problem() -> FnProblem<impl Fn(&[f64]) -> Vec<f64>, impl Fn(&[f64], &[f64]) -> Vec<f64>>
    {
        FnProblem {
            dim: 1,
            lipschitz: 2.0,
            f: |x: &[f64]| vec![x[0] * x[0]],
            jacobian: |y: &[f64], d: &[f64]| vec![2.0 * y[0] * d[0]],
        }
    }

    #[test]
    fn linearization_at_anchor_is_f() {
        let p = square_problem();
        let out = eval_linearization(&p, &[1.5], &[1.5]).unwrap();
        assert_eq!(out, vec![2.25]);
    }

    #[test]
    fn linearization_hand_value() {
        // F(t)=t^2, anchor 1, x=3: 1 + 2*(3-1) = 5
        let p = square_problem();
        let out = eval_linearization(&p, &[1.0], &[3.0]).unwrap();
        assert!((out[0] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn linearization_of_affine_is_exact() {
        // F(z) = M z + q in 2-D
        let p = FnProblem {
            dim: 2,
            lipschitz: 1.0,
            f: |x: &[f64]| vec![2.0 * x[0] - x[1] + 1.0, x[0] + 3.0 * x[1] - 2.0],
            jacobian: |_: &[f64], d: &[f64]| vec![2.0 * d[0] - d[1], d[0] + 3.0 * d[1]],
        };
        let anchor = [0.3, -0.7];
        let x = [-1.2, 2.5];
        let lin = eval_linearization(&p, &anchor, &x).unwrap();
        let exact = p.eval_f(&x);
        assert!(linalg::dist(&lin, &exact) < 1e-14);
        assert!(linearization_error(&p, &anchor, &x).unwrap() < 1e-14);
    }

    #[test]
    fn linearization_error_equality_case() {
        // F(t)=t^2 (L=2), anchor 1, x 3: |9 - 5| = 4 = (L/2)*2^2
        let p = square_problem();
        let err = linearization_error(&p, &[1.0], &[3.0]).unwrap();
        assert!((err - 4.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = square_problem();
        assert!(matches!(
            eval_linearization(&p, &[1.0, 2.0], &[3.0]),
            Err(ProblemError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            eval_linearization(&p, &[1.0], &[f64::NAN]),
            Err(ProblemError::NonFinite)
        ));
    }

    struct BoxOnly {
        n: usize,
    }
    impl VIProblem for BoxOnly {
        fn dim(&self) -> usize {
            self.n
        }
        fn lipschitz(&self) -> f64 {
            1.0
        }
        fn eval_f(&self, x: &[f64]) -> Vec<f64> {
            x.to_vec()
        }
        fn apply_jacobian(&self, _anchor: &[f64], dir: &[f64]) -> Vec<f64> {
            dir.to_vec()
        }
        fn project(&self, z: &[f64]) -> Vec<f64> {
            z.iter().map(|v| v.clamp(0.0, 1.0)).collect()
        }
    }

    #[test]
    fn normal_cone_full_space_zero_only() {
        let p = square_problem();
        assert!(check_normal_cone(&p, &[0.4], &[0.0], 1e-12));
        assert!(!check_normal_cone(&p, &[0.4], &[0.1], 1e-12));
    }

    #[test]
    fn normal_cone_box_faces() {
        let p = BoxOnly { n: 3 };
        // On the face y_1 = 1, the outward coordinate vector is normal.
        assert!(check_normal_cone(&p, &[1.0, 0.5, 0.5], &[1.0, 0.0, 0.0], 1e-12));
        // Interior point: only zero is normal.
        assert!(!check_normal_cone(&p, &[0.5, 0.5, 0.5], &[1.0, 0.0, 0.0], 1e-12));
        assert!(check_normal_cone(&p, &[0.5, 0.5, 0.5], &[0.0, 0.0, 0.0], 1e-12));
    }

    #[test]
    fn samplers_accept_well_behaved_problem() {
        let p = BoxOnly { n: 4 };
        assert!(sample_monotonicity_violation(&p, 200, 1, 2.0) <= 1e-10);
        assert!(sample_projection_violation(&p, 200, 2) <= 1e-12);
        assert!(sample_jacobian_consistency(&p, 50, 3, 1e-6) <= 1e-6);
    }
}
