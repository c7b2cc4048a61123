//! Seeded generators for test and benchmark instances.
//!
//! Three families, all deterministic functions of `(spec, seed)` through the
//! ChaCha streams in [`crate::rng`]:
//!
//! - [`gen_cubic_minmax`]: the saddle operator of
//!   `min_x max_y (L/6)||x||^3 + y'(Ax - b)` over `R^{2n}`, with `A = U S V'`
//!   built from Haar-orthogonal factors and a geometric singular-value grid;
//!   the unique saddle point is known in closed form.
//! - [`gen_affine`]: `F(z) = M z + q` with `M` a positive-definite-plus-skew
//!   matrix and `q` chosen so a sampled `z*` solves `F(z*) = 0`; the exact
//!   resolvent `(lambda M + I)^{-1}` is available for oracle-driven baselines.
//! - [`gen_box`]: the same affine operator family constrained to a box, with
//!   a constructed primal-dual pair `(z*, nu*)` satisfying
//!   `F(z*) + nu* = 0`, active coordinates carrying strictly signed normals.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, householder_qr_q, DenseMatrix};
use crate::math;
use crate::problem::VIProblem;
use crate::rng::{self, Stream};

/// Haar-distributed orthogonal matrix: QR of an i.i.d. Gaussian matrix with
/// the sign of `diag(R)` absorbed into `Q`.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = rng::seeded(seed, Stream::ProblemData);
    random_orthogonal_from(n, &mut rng)
}

fn random_orthogonal_from(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> DenseMatrix {
    let gauss = DenseMatrix::from_rows(n, n, rng::standard_normal_vec(rng, n * n));
    let (mut q, signs) = householder_qr_q(&gauss);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] *= signs[j];
        }
    }
    q
}

// ---------------------------------------------------------------------------
// Cubic min-max saddle problem
// ---------------------------------------------------------------------------

/// Spec for the cubic-regularized bilinear saddle instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicMinMaxSpec {
    /// Primal (and dual) block dimension; the operator lives on `R^{2n}`.
    pub n: usize,
    pub seed: u64,
    /// Lipschitz constant of the derivative (the cubic term's modulus).
    pub l: f64,
    /// Condition number of `A` (hit exactly by the singular-value grid).
    pub cond: f64,
}

impl CubicMinMaxSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            l: 1e-3,
            cond: 20.0,
        }
    }
}

/// Saddle operator of `(L/6)||x||^3 + y'(Ax - b)`:
/// `F(x, y) = ((L/2)||x|| x + A' y, -(A x - b))`.
#[derive(Debug, Clone)]
pub struct CubicMinMax {
    n: usize,
    l: f64,
    a: DenseMatrix,
    a_t: DenseMatrix,
    b: Vec<f64>,
    solution: Vec<f64>,
}

impl CubicMinMax {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }
}

/// Build the instance; `x* = A^{-1} b`, `y* = -(L/2)||x*|| A^{-T} x*`.
pub fn gen_cubic_minmax(spec: &CubicMinMaxSpec) -> CubicMinMax {
    assert!(spec.n >= 1);
    assert!(spec.l > 0.0 && spec.cond >= 1.0);
    let n = spec.n;
    let mut rng = rng::seeded(spec.seed, Stream::ProblemData);
    let u = random_orthogonal_from(n, &mut rng);
    let v = random_orthogonal_from(n, &mut rng);
    // Geometric grid from 1 down to 1/cond: the ratio of the extreme
    // singular values (the condition number) is exactly `cond`.
    let singular: Vec<f64> = if n == 1 {
        vec![1.0]
    } else {
        (0..n)
            .map(|i| math::powf(spec.cond, -(i as f64) / (n as f64 - 1.0)))
            .collect()
    };
    let mut us = u;
    for i in 0..n {
        for j in 0..n {
            us[(i, j)] *= singular[j];
        }
    }
    let a = us.matmul(&v.transpose());
    let b = rng::standard_normal_vec(&mut rng, n);
    let x_star = a.solve(&b).expect("A is invertible by construction");
    let at_inv_x = a
        .transpose()
        .solve(&x_star)
        .expect("A' is invertible by construction");
    let y_star = linalg::scale(-0.5 * spec.l * linalg::norm(&x_star), &at_inv_x);
    let mut solution = x_star;
    solution.extend_from_slice(&y_star);
    CubicMinMax {
        n,
        l: spec.l,
        a_t: a.transpose(),
        a,
        b,
        solution,
    }
}

impl VIProblem for CubicMinMax {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn lipschitz(&self) -> f64 {
        self.l
    }

    fn eval_f(&self, z: &[f64]) -> Vec<f64> {
        let (x, y) = z.split_at(self.n);
        let xnorm = linalg::norm(x);
        let aty = self.a_t.matvec(y);
        let ax = self.a.matvec(x);
        let mut out = vec![0.0; 2 * self.n];
        for i in 0..self.n {
            out[i] = 0.5 * self.l * xnorm * x[i] + aty[i];
            out[self.n + i] = -(ax[i] - self.b[i]);
        }
        out
    }

    fn apply_jacobian(&self, anchor: &[f64], dir: &[f64]) -> Vec<f64> {
        let (x, _) = anchor.split_at(self.n);
        let (u, v) = dir.split_at(self.n);
        let xnorm = linalg::norm(x);
        let atv = self.a_t.matvec(v);
        let au = self.a.matvec(u);
        let mut out = vec![0.0; 2 * self.n];
        if xnorm > 0.0 {
            // d/dx [(L/2)||x|| x] u = (L/2)(||x|| u + (x.u/||x||) x);
            // the map is differentiable at 0 with zero derivative.
            let coef = linalg::dot(x, u) / xnorm;
            for i in 0..self.n {
                out[i] = 0.5 * self.l * (xnorm * u[i] + coef * x[i]);
            }
        }
        for i in 0..self.n {
            out[i] += atv[i];
            out[self.n + i] = -au[i];
        }
        out
    }

    fn jacobian_matrix(&self, anchor: &[f64]) -> Option<DenseMatrix> {
        let (x, _) = anchor.split_at(self.n);
        let xnorm = linalg::norm(x);
        let n = self.n;
        let mut m = DenseMatrix::zeros(2 * n, 2 * n);
        if xnorm > 0.0 {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.5 * self.l * x[i] * x[j] / xnorm;
                    if i == j {
                        v += 0.5 * self.l * xnorm;
                    }
                    m[(i, j)] = v;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                m[(i, n + j)] = self.a_t[(i, j)];
                m[(n + i, j)] = -self.a[(i, j)];
            }
        }
        Some(m)
    }

    fn project(&self, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }

    fn unconstrained(&self) -> bool {
        true
    }

    fn known_solution(&self) -> Option<&[f64]> {
        Some(&self.solution)
    }
}

// ---------------------------------------------------------------------------
// Affine monotone problems
// ---------------------------------------------------------------------------

/// Spec for the unconstrained affine family `F(z) = M z + q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMonotoneSpec {
    pub n: usize,
    pub seed: u64,
    /// Strong-monotonicity floor added to the symmetric part.
    pub spd_shift: f64,
    /// Nominal positive Lipschitz bound for `F'` (any upper bound on the
    /// exact value 0 is valid; the solver needs it positive).
    pub nominal_l: f64,
}

impl AffineMonotoneSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            spd_shift: 0.1,
            nominal_l: 1.0,
        }
    }
}

/// `F(z) = M z + q` with `M = S + K`, `S` positive definite, `K` skew.
#[derive(Debug, Clone)]
pub struct AffineVip {
    m: DenseMatrix,
    q: Vec<f64>,
    nominal_l: f64,
    solution: Option<Vec<f64>>,
}

impl AffineVip {
    /// Explicit instance; `solution` may be supplied when `F(z*) = 0` is
    /// known.
    pub fn new(m: DenseMatrix, q: Vec<f64>, nominal_l: f64, solution: Option<Vec<f64>>) -> Self {
        assert_eq!(m.rows(), m.cols());
        assert_eq!(m.rows(), q.len());
        Self {
            m,
            q,
            nominal_l,
            solution,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.m
    }

    /// Exact proximal step: the unique solution of
    /// `lambda (M y + q) + y - x = 0`.
    pub fn resolvent(&self, lambda: f64, x: &[f64]) -> Vec<f64> {
        let n = self.q.len();
        let mut sys = self.m.scaled(lambda);
        for i in 0..n {
            sys[(i, i)] += 1.0;
        }
        let mut rhs = x.to_vec();
        linalg::axpy(-lambda, &self.q, &mut rhs);
        sys.solve_into(rhs).expect("lambda M + I is nonsingular")
    }
}

/// Random monotone matrix `M = G'G/n + shift I + skew` and `q = -M z*` for a
/// sampled solution `z*`.
pub fn gen_affine(spec: &AffineMonotoneSpec) -> AffineVip {
    let n = spec.n;
    let mut rng = rng::seeded(spec.seed, Stream::ProblemData);
    let g = DenseMatrix::from_rows(n, n, rng::standard_normal_vec(&mut rng, n * n));
    let mut m = g.transpose().matmul(&g).scaled(1.0 / n as f64);
    for i in 0..n {
        m[(i, i)] += spec.spd_shift;
    }
    let r = DenseMatrix::from_rows(n, n, rng::standard_normal_vec(&mut rng, n * n));
    let skew = r
        .add_scaled(-1.0, &r.transpose())
        .scaled(0.5 / math::sqrt(n as f64));
    let m = m.add_scaled(1.0, &skew);
    let z_star = rng::standard_normal_vec(&mut rng, n);
    let q = linalg::scale(-1.0, &m.matvec(&z_star));
    AffineVip::new(m, q, spec.nominal_l, Some(z_star))
}

impl VIProblem for AffineVip {
    fn dim(&self) -> usize {
        self.q.len()
    }
    fn lipschitz(&self) -> f64 {
        self.nominal_l
    }
    fn eval_f(&self, z: &[f64]) -> Vec<f64> {
        linalg::add(&self.m.matvec(z), &self.q)
    }
    fn apply_jacobian(&self, _anchor: &[f64], dir: &[f64]) -> Vec<f64> {
        self.m.matvec(dir)
    }
    fn jacobian_matrix(&self, _anchor: &[f64]) -> Option<DenseMatrix> {
        Some(self.m.clone())
    }
    fn project(&self, z: &[f64]) -> Vec<f64> {
        z.to_vec()
    }
    fn unconstrained(&self) -> bool {
        true
    }
    fn known_solution(&self) -> Option<&[f64]> {
        self.solution.as_deref()
    }
}

// ---------------------------------------------------------------------------
// Box-constrained problems
// ---------------------------------------------------------------------------

/// Spec for the box-constrained affine family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxVipSpec {
    pub n: usize,
    pub seed: u64,
    pub spd_shift: f64,
    pub nominal_l: f64,
}

impl BoxVipSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            spd_shift: 0.1,
            nominal_l: 1.0,
        }
    }
}

/// `F(z) = M z + q` over the box `[lo, hi]`, with a constructed solution.
#[derive(Debug, Clone)]
pub struct BoxVip {
    m: DenseMatrix,
    q: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    nominal_l: f64,
    solution: Vec<f64>,
    nu_star: Vec<f64>,
}

impl BoxVip {
    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// The constructed normal-cone certificate at the known solution.
    pub fn known_certificate(&self) -> (&[f64], &[f64]) {
        (&self.solution, &self.nu_star)
    }
}

/// Sample bounds, a solution with a mix of interior and active coordinates,
/// a normal vector supported on the active set, then back out
/// `q = -M z* - nu*` so that `F(z*) + nu* = 0`.
pub fn gen_box(spec: &BoxVipSpec) -> BoxVip {
    let n = spec.n;
    let mut rng = rng::seeded(spec.seed, Stream::ProblemData);
    let g = DenseMatrix::from_rows(n, n, rng::standard_normal_vec(&mut rng, n * n));
    let mut m = g.transpose().matmul(&g).scaled(1.0 / n as f64);
    for i in 0..n {
        m[(i, i)] += spec.spd_shift;
    }
    let r = DenseMatrix::from_rows(n, n, rng::standard_normal_vec(&mut rng, n * n));
    let skew = r
        .add_scaled(-1.0, &r.transpose())
        .scaled(0.5 / math::sqrt(n as f64));
    let m = m.add_scaled(1.0, &skew);

    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    for i in 0..n {
        lo[i] = -1.0 - rng::uniform(&mut rng, 0.0, 1.0);
        hi[i] = 1.0 + rng::uniform(&mut rng, 0.0, 1.0);
    }
    let mut z_star = vec![0.0; n];
    let mut nu_star = vec![0.0; n];
    for i in 0..n {
        // roughly a third of the coordinates on each face, the rest interior
        let draw = rng::uniform(&mut rng, 0.0, 3.0);
        if draw < 1.0 {
            z_star[i] = lo[i];
            nu_star[i] = -(0.1 + rng::uniform(&mut rng, 0.0, 1.0));
        } else if draw < 2.0 {
            z_star[i] = hi[i];
            nu_star[i] = 0.1 + rng::uniform(&mut rng, 0.0, 1.0);
        } else {
            z_star[i] = rng::uniform(&mut rng, 0.6 * lo[i], 0.6 * hi[i]);
            nu_star[i] = 0.0;
        }
    }
    let mut q = linalg::scale(-1.0, &m.matvec(&z_star));
    linalg::axpy(-1.0, &nu_star, &mut q);
    BoxVip {
        m,
        q,
        lo,
        hi,
        nominal_l: spec.nominal_l,
        solution: z_star,
        nu_star,
    }
}

impl VIProblem for BoxVip {
    fn dim(&self) -> usize {
        self.q.len()
    }
    fn lipschitz(&self) -> f64 {
        self.nominal_l
    }
    fn eval_f(&self, z: &[f64]) -> Vec<f64> {
        linalg::add(&self.m.matvec(z), &self.q)
    }
    fn apply_jacobian(&self, _anchor: &[f64], dir: &[f64]) -> Vec<f64> {
        self.m.matvec(dir)
    }
    fn jacobian_matrix(&self, _anchor: &[f64]) -> Option<DenseMatrix> {
        Some(self.m.clone())
    }
    fn project(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .enumerate()
            .map(|(i, v)| v.clamp(self.lo[i], self.hi[i]))
            .collect()
    }
    fn known_solution(&self) -> Option<&[f64]> {
        Some(&self.solution)
    }
}

/// Shared standard-normal initial point for benchmark cells; drawn from its
/// own stream so it is identical across methods for a given `(dim, seed)`.
pub fn standard_initial_point(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::seeded(seed, Stream::InitialPoint);
    rng::standard_normal_vec(&mut rng, dim)
}
