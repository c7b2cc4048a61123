//! Streaming weighted-average certificates.
//!
//! Over a sequence of triples `(lambda_i, y_i, w_i)` with `w_i = F(y_i) +
//! nu_i`, the averaged certificate is
//!
//! ```text
//! y_a = (1/Lam) sum lambda_i y_i,       Lam = sum lambda_i,
//! v_a = (1/Lam) sum lambda_i w_i,
//! eps_a = (1/Lam) sum lambda_i <y_i - y_a, w_i - v_a>.
//! ```
//!
//! `eps_a` certifies `v_a` as an element of the eps-enlargement of `F + N_C`
//! at `y_a`, so it is nonnegative up to rounding. The accumulator keeps the
//! algebraically equivalent one-pass form `eps_a = S/Lam - <y_a, v_a>` with
//! `S = sum lambda_i <y_i, w_i>`; `S` and `Lam` use compensated summation
//! because that difference is exactly the kind of cancellation that destroys
//! small certificates. The equivalence against the definition above is
//! cross-validated by the test suites on long traces before anything relies
//! on it.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::math::CompensatedSum;

/// Averaged certificate `(y_a, v_a, eps_a)` over the ingested triples.
#[derive(Debug, Clone)]
pub struct ErgodicCertificate {
    pub y_a: Vec<f64>,
    pub v_a: Vec<f64>,
    pub eps_a: f64,
    /// Total weight `Lam` behind the average.
    pub lambda_sum: f64,
    /// Number of ingested triples.
    pub count: u64,
}

impl ErgodicCertificate {
    /// `max(||v_a||, eps_a)`, the quantity tested against the tolerance.
    pub fn merit(&self) -> f64 {
        linalg::norm(&self.v_a).max(self.eps_a)
    }

    /// Natural magnitude for judging tiny negative `eps_a` values.
    pub fn eps_scale(&self) -> f64 {
        1.0_f64
            .max(self.eps_a.abs())
            .max(linalg::dot(&self.y_a, &self.v_a).abs())
    }
}

/// One-pass accumulator for the averaged certificate.
#[derive(Debug, Clone)]
pub struct ErgodicAccumulator {
    dim: usize,
    lambda_sum: CompensatedSum,
    inner_sum: CompensatedSum,
    weighted_y: Vec<f64>,
    weighted_w: Vec<f64>,
    count: u64,
}

impl ErgodicAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            lambda_sum: CompensatedSum::new(),
            inner_sum: CompensatedSum::new(),
            weighted_y: vec![0.0; dim],
            weighted_w: vec![0.0; dim],
            count: 0,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Fold one `(lambda, y, w)` triple into the running sums.
    pub fn ingest(&mut self, lambda: f64, y: &[f64], w: &[f64]) {
        debug_assert!(lambda > 0.0);
        debug_assert_eq!(y.len(), self.dim);
        debug_assert_eq!(w.len(), self.dim);
        self.lambda_sum.add(lambda);
        self.inner_sum.add(lambda * linalg::dot(y, w));
        linalg::axpy(lambda, y, &mut self.weighted_y);
        linalg::axpy(lambda, w, &mut self.weighted_w);
        self.count += 1;
    }

    /// Current certificate; `None` until something has been ingested.
    pub fn certificate(&self) -> Option<ErgodicCertificate> {
        if self.count == 0 {
            return None;
        }
        let lam = self.lambda_sum.value();
        let y_a = linalg::scale(1.0 / lam, &self.weighted_y);
        let v_a = linalg::scale(1.0 / lam, &self.weighted_w);
        let eps_a = self.inner_sum.value() / lam - linalg::dot(&y_a, &v_a);
        Some(ErgodicCertificate {
            y_a,
            v_a,
            eps_a,
            lambda_sum: lam,
            count: self.count,
        })
    }
}

/// Sampled necessary condition for `v_a` to lie in the `eps_a`-enlargement
/// of `F + N_C` at `y_a`: for each sampled `z` in `C` and `u` in `N_C(z)`,
/// `<v_a - F(z) - u, y_a - z> >= -eps_a` must hold. Returns the worst
/// normalized violation (nonpositive means every sample passed).
///
/// `u` is produced from the projection itself: `z = P(raw)` makes
/// `raw - z` a normal vector at `z`. This is only a spot check — the
/// defining inequality quantifies over all of `C` and cannot be certified
/// by sampling — but a positive violation conclusively disqualifies a
/// certificate.
pub fn sample_enlargement_violation(
    problem: &impl crate::problem::VIProblem,
    cert: &ErgodicCertificate,
    samples: usize,
    seed: u64,
    radius: f64,
) -> f64 {
    use crate::rng::{self, Stream};
    let mut rng = rng::seeded(seed, Stream::Sampling);
    let n = problem.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let raw = linalg::scale(radius, &rng::standard_normal_vec(&mut rng, n));
        let z = problem.project(&raw);
        let u = linalg::sub(&raw, &z);
        let fz = problem.eval_f(&z);
        let mut gap = vec![0.0; n];
        for i in 0..n {
            gap[i] = cert.v_a[i] - fz[i] - u[i];
        }
        let dy = linalg::sub(&cert.y_a, &z);
        let inner = linalg::dot(&gap, &dy);
        let scale = 1.0 + linalg::norm(&gap) * linalg::norm(&dy) + cert.eps_a.abs();
        worst = worst.max((-inner - cert.eps_a) / scale);
    }
    worst
}

/// Two-pass evaluation straight from the definition; the independent route
/// the streaming accumulator is validated against.
pub fn ergodic_direct(triples: &[(f64, Vec<f64>, Vec<f64>)]) -> Option<ErgodicCertificate> {
    let (_, first_y, _) = triples.first()?;
    let dim = first_y.len();
    let mut lam = 0.0;
    let mut y_a = vec![0.0; dim];
    let mut v_a = vec![0.0; dim];
    for (l, y, w) in triples {
        lam += l;
        linalg::axpy(*l, y, &mut y_a);
        linalg::axpy(*l, w, &mut v_a);
    }
    linalg::scale_in_place(1.0 / lam, &mut y_a);
    linalg::scale_in_place(1.0 / lam, &mut v_a);
    let mut eps = 0.0;
    for (l, y, w) in triples {
        let dy = linalg::sub(y, &y_a);
        let dw = linalg::sub(w, &v_a);
        eps += l * linalg::dot(&dy, &dw);
    }
    Some(ErgodicCertificate {
        y_a,
        v_a,
        eps_a: eps / lam,
        lambda_sum: lam,
        count: triples.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, standard_normal_vec, uniform, Stream};

    #[test]
    fn single_triple_is_its_own_average() {
        let mut acc = ErgodicAccumulator::new(3);
        assert!(acc.certificate().is_none());
        let y = vec![1.0, -2.0, 0.5];
        let w = vec![0.3, 0.1, -0.4];
        acc.ingest(0.7, &y, &w);
        let c = acc.certificate().unwrap();
        assert!(linalg::dist(&c.y_a, &y) < 1e-15);
        assert!(linalg::dist(&c.v_a, &w) < 1e-15);
        assert!(c.eps_a.abs() < 1e-15);
        assert_eq!(c.count, 1);
    }

    #[test]
    fn two_equal_weight_triples_match_direct_sum() {
        // Hand value: eps = (1/4) <y1 - y2, w1 - w2> = 1.25 for this data.
        let mut acc = ErgodicAccumulator::new(2);
        let t = [
            (1.0, vec![1.0, 0.0], vec![2.0, 0.0]),
            (1.0, vec![0.0, 1.0], vec![0.0, 3.0]),
        ];
        for (l, y, w) in &t {
            acc.ingest(*l, y, w);
        }
        let streamed = acc.certificate().unwrap();
        let direct = ergodic_direct(&t).unwrap();
        assert!((streamed.eps_a - 1.25).abs() < 1e-14);
        assert!((direct.eps_a - 1.25).abs() < 1e-14);
        assert!((streamed.eps_a - direct.eps_a).abs() < 1e-14);
    }

    #[test]
    fn streaming_matches_direct_on_long_random_trace() {
        let mut rng = seeded(99, Stream::Sampling);
        let dim = 6;
        let mut acc = ErgodicAccumulator::new(dim);
        let mut triples = Vec::new();
        for _ in 0..10_000 {
            let l = uniform(&mut rng, 1e-3, 10.0);
            let y = standard_normal_vec(&mut rng, dim);
            let w = standard_normal_vec(&mut rng, dim);
            acc.ingest(l, &y, &w);
            triples.push((l, y, w));
        }
        let streamed = acc.certificate().unwrap();
        let direct = ergodic_direct(&triples).unwrap();
        let scale = direct.eps_a.abs().max(1e-30);
        assert!(
            (streamed.eps_a - direct.eps_a).abs() / scale <= 1e-8,
            "streaming {} vs direct {}",
            streamed.eps_a,
            direct.eps_a
        );
        assert!(linalg::dist(&streamed.y_a, &direct.y_a) < 1e-10);
        assert!(linalg::dist(&streamed.v_a, &direct.v_a) < 1e-10);
    }

    #[test]
    fn monotone_data_gives_nonnegative_eps() {
        // w_i = F(y_i) with F = identity (monotone): eps is a weighted
        // variance and must be nonnegative.
        let mut rng = seeded(7, Stream::Sampling);
        let mut acc = ErgodicAccumulator::new(4);
        for _ in 0..500 {
            let l = uniform(&mut rng, 0.1, 2.0);
            let y = standard_normal_vec(&mut rng, 4);
            let w = y.clone();
            acc.ingest(l, &y, &w);
        }
        let c = acc.certificate().unwrap();
        assert!(c.eps_a >= -1e-10 * c.eps_scale());
        assert!(c.eps_a > 0.0);
    }
}
