//! Derivation and validation of the solver parameter pack, plus worst-case
//! iteration budgets.
//!
//! Everything is driven by two inputs: the subproblem inexactness
//! `sigma_hat` in `[0, 1/2)` and the Lipschitz constant `L` of the operator's
//! derivative. The remaining scalars are tied together:
//!
//! ```text
//! 0 < theta < (1 - sigma_hat)(1 - 2 sigma_hat)
//! theta_hat = theta (sigma_hat/(1-sigma_hat) + theta/(1-sigma_hat)^2)
//! eta > 2 theta_hat / L
//! tau = smallest root of q(t) = theta t^2 - (2 theta + eta L / 2) t + theta - theta_hat
//! sigma = 2 theta_hat / (eta L) < 1
//! lambda1 > 0 with lambda1^2 ||F(y0)|| <= 2 theta / L
//! ```
//!
//! Defaults take `theta = (1-sigma_hat)(1-2 sigma_hat)/2` and
//! `eta = 4 theta / L`, the choice under which the closed-form budget
//! constants below are valid. `tau` is computed by the explicit stable
//! quadratic formula, never by an iterative root finder, so packs are
//! bit-reproducible.

use crate::math;

/// Fully derived parameter pack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Relative-error tolerance of the subproblem oracle, in `[0, 1/2)`.
    pub sigma_hat: f64,
    /// Aggressiveness bound for the proximal residual, in
    /// `(0, (1-sigma_hat)(1-2 sigma_hat))`.
    pub theta: f64,
    /// Derived contraction level; satisfies `0 < theta_hat < theta`.
    pub theta_hat: f64,
    /// Large-step threshold: steps with `lambda ||y - x|| >= eta` trigger the
    /// extragradient update.
    pub eta: f64,
    /// Homotopy rate: `lambda` shrinks by `(1 - tau)` after large steps and
    /// grows by `1/(1 - tau)` otherwise.
    pub tau: f64,
    /// Effective relative error of the induced HPE steps, `2 theta_hat/(eta L)`.
    pub sigma: f64,
    /// Lipschitz constant of `F'`.
    pub lipschitz: f64,
    /// Initial proximal parameter.
    pub lambda1: f64,
}

/// Rejected parameter inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamError {
    SigmaHatOutOfRange { value: f64 },
    LipschitzNotPositive { value: f64 },
    ThetaOutOfRange { value: f64, upper: f64 },
    EtaTooSmall { value: f64, lower: f64 },
    Lambda1Invalid { value: f64, upper: f64 },
}

impl core::fmt::Display for ParamError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ParamError::SigmaHatOutOfRange { value } => {
                write!(f, "sigma_hat must lie in [0, 1/2), got {value}")
            }
            ParamError::LipschitzNotPositive { value } => {
                write!(f, "Lipschitz constant must be positive, got {value}")
            }
            ParamError::ThetaOutOfRange { value, upper } => {
                write!(f, "theta must lie in (0, {upper}), got {value}")
            }
            ParamError::EtaTooSmall { value, lower } => {
                write!(f, "eta must exceed {lower}, got {value}")
            }
            ParamError::Lambda1Invalid { value, upper } => {
                write!(f, "lambda1 must lie in (0, {upper}], got {value}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParamError {}

/// Derive a full pack from `(sigma_hat, L)` with optional `theta`/`eta`
/// overrides. Overrides are validated against their admissible ranges.
pub fn derive_params(
    sigma_hat: f64,
    lipschitz: f64,
    theta_override: Option<f64>,
    eta_override: Option<f64>,
) -> Result<Params, ParamError> {
    if !(0.0..0.5).contains(&sigma_hat) || !sigma_hat.is_finite() {
        return Err(ParamError::SigmaHatOutOfRange { value: sigma_hat });
    }
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(ParamError::LipschitzNotPositive { value: lipschitz });
    }
    let theta_upper = (1.0 - sigma_hat) * (1.0 - 2.0 * sigma_hat);
    let theta = theta_override.unwrap_or(0.5 * theta_upper);
    if !(theta > 0.0 && theta < theta_upper) {
        return Err(ParamError::ThetaOutOfRange {
            value: theta,
            upper: theta_upper,
        });
    }
    let one_minus = 1.0 - sigma_hat;
    let theta_hat = theta * (sigma_hat / one_minus + theta / (one_minus * one_minus));
    let eta_lower = 2.0 * theta_hat / lipschitz;
    let eta = eta_override.unwrap_or(4.0 * theta / lipschitz);
    if !(eta > eta_lower) || !eta.is_finite() {
        return Err(ParamError::EtaTooSmall {
            value: eta,
            lower: eta_lower,
        });
    }
    let tau = smallest_root_of_q(theta, theta_hat, eta * lipschitz);
    let sigma = 2.0 * theta_hat / (eta * lipschitz);
    Ok(Params {
        sigma_hat,
        theta,
        theta_hat,
        eta,
        tau,
        sigma,
        lipschitz,
        lambda1: 1.0,
    })
}

/// Smallest root of `q(t) = theta t^2 - (2 theta + eta L / 2) t
/// + theta - theta_hat`, by the cancellation-free quadratic formula.
fn smallest_root_of_q(theta: f64, theta_hat: f64, eta_l: f64) -> f64 {
    let b = 2.0 * theta + 0.5 * eta_l;
    let c = theta - theta_hat;
    2.0 * c / (b + math::sqrt(b * b - 4.0 * theta * c))
}

impl Params {
    /// Value of the coupling polynomial at `t`.
    pub fn q(&self, t: f64) -> f64 {
        self.theta * t * t - (2.0 * self.theta + 0.5 * self.eta * self.lipschitz) * t
            + (self.theta - self.theta_hat)
    }

    /// Natural magnitude of `q` near `tau`, for relative comparisons.
    pub fn q_scale(&self) -> f64 {
        let b = 2.0 * self.theta + 0.5 * self.eta * self.lipschitz;
        self.theta * self.tau * self.tau + b * self.tau + (self.theta - self.theta_hat).abs()
    }

    /// Largest admissible `lambda1` for a run starting at residual
    /// `||F(y0)|| = norm_f_y0` (any positive value when the residual is zero).
    pub fn lambda1_upper(&self, norm_f_y0: f64) -> f64 {
        if norm_f_y0 > 0.0 {
            math::sqrt(2.0 * self.theta / (self.lipschitz * norm_f_y0))
        } else {
            f64::INFINITY
        }
    }

    /// Replace `lambda1`, validating it against the start residual.
    pub fn with_lambda1(mut self, lambda1: f64, norm_f_y0: f64) -> Result<Params, ParamError> {
        let upper = self.lambda1_upper(norm_f_y0);
        // Tiny relative headroom: the maximal admissible value itself must
        // round-trip through the validation.
        if !(lambda1 > 0.0) || lambda1 > upper * (1.0 + 1e-12) {
            return Err(ParamError::Lambda1Invalid {
                value: lambda1,
                upper,
            });
        }
        self.lambda1 = lambda1;
        Ok(self)
    }

    /// Check every internal relation of the pack; returns the worst relative
    /// violation (nonpositive means all invariants hold).
    pub fn max_invariant_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        let theta_upper = (1.0 - self.sigma_hat) * (1.0 - 2.0 * self.sigma_hat);
        // range constraints, as signed violations
        worst = worst.max(-self.theta); // theta > 0
        worst = worst.max(self.theta - theta_upper); // theta < upper
        worst = worst.max(-self.theta_hat); // theta_hat > 0
        worst = worst.max(self.theta_hat - self.theta); // theta_hat < theta
        worst = worst.max(2.0 * self.theta_hat / self.lipschitz - self.eta); // eta > 2 theta_hat / L
        worst = worst.max(self.sigma - 1.0); // sigma < 1
        worst = worst.max(-self.tau); // tau > 0
        worst = worst.max(self.tau - 1.0); // tau < 1
        let tau_lower =
            (self.theta - self.theta_hat) / (2.0 * self.theta + 0.5 * self.eta * self.lipschitz);
        worst = worst.max(tau_lower - self.tau); // tau above its closed-form lower bound
        // exact identities, relative
        let one_minus = 1.0 - self.sigma_hat;
        let theta_hat_expect =
            self.theta * (self.sigma_hat / one_minus + self.theta / (one_minus * one_minus));
        worst = worst.max(
            (self.theta_hat - theta_hat_expect).abs() / theta_hat_expect.abs().max(f64::MIN_POSITIVE),
        );
        let sigma_expect = 2.0 * self.theta_hat / (self.eta * self.lipschitz);
        worst = worst.max((self.sigma - sigma_expect).abs() / sigma_expect.abs().max(f64::MIN_POSITIVE));
        worst = worst.max(self.q(self.tau).abs() / self.q_scale() - 1e-12);
        worst
    }
}

/// Largest admissible initial proximal parameter
/// `sqrt(2 theta / (L ||F(y0)||))`, or `1.0` when the start residual is zero
/// (the constraint is then vacuous).
pub fn init_lambda(norm_f_y0: f64, theta: f64, lipschitz: f64) -> f64 {
    if norm_f_y0 > 0.0 {
        math::sqrt(2.0 * theta / (lipschitz * norm_f_y0))
    } else {
        1.0
    }
}

// ---------------------------------------------------------------------------
// Iteration budgets
// ---------------------------------------------------------------------------

/// Worst-case iterations until some iterate carries a pointwise certificate
/// `||F(y) + nu|| <= rho`, started at distance `d0` from the solution set:
///
/// `ceil( (2/(tau eta (1-sigma))) d0^2/rho )
///  + ceil( (1/(2 tau)) log+((eta + 2 theta_hat/L) / (lambda1^2 rho)) )`.
pub fn budget_pointwise(params: &Params, d0: f64, rho: f64) -> u64 {
    let p = params;
    let lead = 2.0 / (p.tau * p.eta * (1.0 - p.sigma)) * d0 * d0 / rho;
    let log_arg = (p.eta + 2.0 * p.theta_hat / p.lipschitz) / (p.lambda1 * p.lambda1 * rho);
    let tail = math::log_plus(log_arg) / (2.0 * p.tau);
    math::ceil_count(lead).saturating_add(math::ceil_count(tail))
}

/// Worst-case iterations until an averaged certificate `(y, v, eps)` with
/// `max(||v||, eps) <= rho` exists.
pub fn budget_ergodic(params: &Params, d0: f64, rho: f64) -> u64 {
    let p = params;
    let cbrt4 = math::powf(4.0, 1.0 / 3.0);
    let eta23 = math::powf(p.eta, 2.0 / 3.0);
    let one_minus_s2 = 1.0 - p.sigma * p.sigma;
    let first = 2.0 * cbrt4 / (p.tau * eta23 * math::powf(one_minus_s2, 1.0 / 3.0))
        * math::powf(d0 * d0 / rho, 2.0 / 3.0);
    let second = 2.0 * cbrt4 / (p.tau * eta23 * math::powf(one_minus_s2, 2.0 / 3.0))
        * math::powf(d0 * d0 * d0 / rho, 2.0 / 3.0);
    let log_arg = (p.eta + 2.0 * p.theta_hat / p.lipschitz) / (p.lambda1 * p.lambda1 * rho);
    let tail = math::log_plus(log_arg) / (2.0 * p.tau);
    math::ceil_count(first)
        .max(math::ceil_count(second))
        .saturating_add(math::ceil_count(tail))
}

/// Closed-form pointwise budget in terms of `(sigma_hat, L, lambda1)` only,
/// valid under the default `theta`/`eta` choices:
///
/// ```text
/// ceil( (4/(1-2 sigma_hat))^2 L d0^2/rho )
///   + ceil( (1-sigma_hat)(4/(1-2 sigma_hat))
///           log+((1-2 sigma_hat)(5/2 - 2 sigma_hat)/(lambda1^2 L rho)) )
/// ```
///
/// Always at least as large as [`budget_pointwise`] for a default pack.
pub fn budget_pointwise_closed_form(
    sigma_hat: f64,
    lipschitz: f64,
    lambda1: f64,
    d0: f64,
    rho: f64,
) -> u64 {
    let g = 4.0 / (1.0 - 2.0 * sigma_hat);
    let lead = g * g * lipschitz * d0 * d0 / rho;
    let log_arg = (1.0 - 2.0 * sigma_hat) * (2.5 - 2.0 * sigma_hat)
        / (lambda1 * lambda1 * lipschitz * rho);
    let tail = (1.0 - sigma_hat) * g * math::log_plus(log_arg);
    math::ceil_count(lead).saturating_add(math::ceil_count(tail))
}

/// Closed-form ergodic budget matching [`budget_pointwise_closed_form`].
pub fn budget_ergodic_closed_form(
    sigma_hat: f64,
    lipschitz: f64,
    lambda1: f64,
    d0: f64,
    rho: f64,
) -> u64 {
    let shp = math::powf(1.0 - sigma_hat, 1.0 / 3.0);
    let denom = math::powf(1.0 - 2.0 * sigma_hat, 5.0 / 3.0);
    let first = 16.0 * math::powf(4.0 / 3.0, 1.0 / 3.0) * shp / denom
        * math::powf(lipschitz * d0 * d0 / rho, 2.0 / 3.0);
    let second = 32.0 * math::powf(2.0 / 9.0, 1.0 / 3.0) * shp / denom
        * math::powf(lipschitz * d0 * d0 * d0 / rho, 2.0 / 3.0);
    let g = 4.0 / (1.0 - 2.0 * sigma_hat);
    let log_arg = (1.0 - 2.0 * sigma_hat) * (2.5 - 2.0 * sigma_hat)
        / (lambda1 * lambda1 * lipschitz * rho);
    let tail = (1.0 - sigma_hat) * g * math::log_plus(log_arg);
    math::ceil_count(first)
        .max(math::ceil_count(second))
        .saturating_add(math::ceil_count(tail))
}

/// Exact-arithmetic specialization of the closed-form pointwise budget at
/// `sigma_hat = 0`: `ceil(16 L d0^2/rho) + ceil(4 log+(5/(2 lambda1^2 L rho)))`.
pub fn budget_pointwise_exactness_free(lipschitz: f64, lambda1: f64, d0: f64, rho: f64) -> u64 {
    let lead = 16.0 * lipschitz * d0 * d0 / rho;
    let tail = 4.0 * math::log_plus(5.0 / (2.0 * lambda1 * lambda1 * lipschitz * rho));
    math::ceil_count(lead).saturating_add(math::ceil_count(tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pack(sigma_hat: f64, l: f64) -> Params {
        derive_params(sigma_hat, l, None, None).unwrap()
    }

    #[test]
    fn default_pack_at_zero_inexactness() {
        // Hand-derived: theta = 0.5, theta_hat = 0.25, eta = 2, sigma = 0.25,
        // tau = 0.5/(2 + sqrt(3.5)).
        let p = pack(0.0, 1.0);
        assert_eq!(p.theta, 0.5);
        assert_eq!(p.theta_hat, 0.25);
        assert_eq!(p.eta, 2.0);
        assert_eq!(p.sigma, 0.25);
        assert!((p.tau - 0.129_171_306_613_029_3).abs() < 1e-15);
        assert!(p.max_invariant_violation() <= 0.0);
    }

    #[test]
    fn default_pack_quarter_inexactness() {
        // Hand-derived for sigma_hat = 0.25, L = 2; cross-checked against the
        // simplified identities theta_hat = (1-2 sigma_hat)/4 and
        // sigma = 1/(4(1-sigma_hat)).
        let p = pack(0.25, 2.0);
        assert!((p.theta - 0.1875).abs() < 1e-15);
        assert!((p.theta_hat - 0.125).abs() < 1e-15);
        assert!((p.theta_hat - (1.0 - 2.0 * p.sigma_hat) / 4.0).abs() < 1e-15);
        assert!((p.eta - 0.375).abs() < 1e-15);
        assert!((p.sigma - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.sigma - 1.0 / (4.0 * (1.0 - p.sigma_hat))).abs() < 1e-15);
        assert!((p.tau - 0.085_145_784_487_323_78).abs() < 1e-15);
    }

    #[test]
    fn tau_exceeds_quarter_ratio_bound() {
        // Under default eta, tau > (theta - theta_hat)/(4 theta), which at
        // sigma_hat reads (1-2 sigma_hat)/(8(1-sigma_hat)).
        for &sh in &[0.0, 0.1, 0.25, 0.4, 0.49] {
            for &l in &[1e-4, 1.0, 1e4] {
                let p = pack(sh, l);
                let lower = (1.0 - 2.0 * sh) / (8.0 * (1.0 - sh));
                assert!(p.tau > lower, "tau {} <= bound {lower}", p.tau);
                assert!(p.tau < 1.0);
            }
        }
    }

    #[test]
    fn theta_hat_is_theta_squared_when_exact() {
        for &l in &[0.5, 1.0, 3.0] {
            let p = pack(0.0, l);
            assert_eq!(p.theta_hat, p.theta * p.theta);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            derive_params(0.5, 1.0, None, None),
            Err(ParamError::SigmaHatOutOfRange { .. })
        ));
        assert!(matches!(
            derive_params(-0.1, 1.0, None, None),
            Err(ParamError::SigmaHatOutOfRange { .. })
        ));
        assert!(matches!(
            derive_params(0.0, 0.0, None, None),
            Err(ParamError::LipschitzNotPositive { .. })
        ));
        // theta override outside (0, (1-sh)(1-2sh))
        assert!(matches!(
            derive_params(0.0, 1.0, Some(1.0), None),
            Err(ParamError::ThetaOutOfRange { .. })
        ));
        assert!(matches!(
            derive_params(0.0, 1.0, Some(0.0), None),
            Err(ParamError::ThetaOutOfRange { .. })
        ));
        // eta override at or below 2 theta_hat / L
        assert!(matches!(
            derive_params(0.0, 1.0, None, Some(0.5)),
            Err(ParamError::EtaTooSmall { .. })
        ));
        assert!(derive_params(0.0, 1.0, None, Some(0.6)).is_ok());
    }

    #[test]
    fn init_lambda_values() {
        assert_eq!(init_lambda(0.0, 0.5, 1.0), 1.0);
        assert_eq!(init_lambda(1.0, 0.5, 1.0), 1.0);
        assert_eq!(init_lambda(4.0, 0.5, 1.0), 0.5);
    }

    #[test]
    fn lambda1_validation() {
        let p = pack(0.0, 1.0);
        // upper = sqrt(2*0.5/(1*4)) = 0.5
        assert!(p.with_lambda1(0.5, 4.0).is_ok());
        assert!(p.with_lambda1(0.6, 4.0).is_err());
        assert!(p.with_lambda1(0.0, 4.0).is_err());
        // zero residual: anything positive goes
        assert!(p.with_lambda1(123.0, 0.0).is_ok());
    }

    #[test]
    fn budget_pointwise_frozen_example() {
        // sigma_hat=0, L=1, lambda1=1, d0=1, rho=1:
        // first term ceil(10.3222...) = 11, log term ceil(3.5468...) = 4.
        let p = pack(0.0, 1.0);
        assert_eq!(budget_pointwise(&p, 1.0, 1.0), 15);
    }

    #[test]
    fn budget_pointwise_zero_distance() {
        let p = pack(0.0, 1.0);
        // only the log term survives
        assert_eq!(budget_pointwise(&p, 0.0, 1.0), 4);
    }

    #[test]
    fn budget_log_term_clamps() {
        let p = pack(0.0, 1.0);
        // rho large enough that (eta + 2 theta_hat/L)/rho <= 1: tail is 0.
        let rho = 2.5;
        assert_eq!(budget_pointwise(&p, 0.0, rho), 0);
    }

    #[test]
    fn budget_ergodic_frozen_example() {
        // Same pack, d0=1, rho=1: max(ceil(15.820), ceil(16.164)) + 4 = 21.
        let p = pack(0.0, 1.0);
        assert_eq!(budget_ergodic(&p, 1.0, 1.0), 21);
    }

    #[test]
    fn budget_ergodic_scaling_in_rho() {
        // Doubling 1/rho scales the max term by at most 2^(2/3), plus the
        // ceiling slack of 1 on either side.
        let p = pack(0.0, 1.0);
        for &rho in &[1.0, 0.1, 1e-3] {
            let b1 = budget_ergodic(&p, 1.0, rho) - budget_log_tail(&p, rho);
            let b2 = budget_ergodic(&p, 1.0, rho / 2.0) - budget_log_tail(&p, rho / 2.0);
            let limit = math::powf(2.0, 2.0 / 3.0) * (b1 as f64 + 1.0) + 1.0;
            assert!(
                (b2 as f64) <= limit,
                "rho={rho}: max-term {b2} vs limit {limit}"
            );
        }
    }

    fn budget_log_tail(p: &Params, rho: f64) -> u64 {
        let log_arg = (p.eta + 2.0 * p.theta_hat / p.lipschitz) / (p.lambda1 * p.lambda1 * rho);
        math::ceil_count(math::log_plus(log_arg) / (2.0 * p.tau))
    }

    #[test]
    fn exact_budget_below_closed_forms() {
        let p = pack(0.0, 1.0);
        for &d0 in &[0.0, 0.5, 1.0, 10.0] {
            for &rho in &[1e-1, 1e-3, 1e-6] {
                let exact = budget_pointwise(&p, d0, rho);
                let remark = budget_pointwise_exactness_free(1.0, p.lambda1, d0, rho);
                let closed = budget_pointwise_closed_form(0.0, 1.0, p.lambda1, d0, rho);
                assert!(exact <= remark, "exact {exact} > remark {remark}");
                assert_eq!(remark, closed, "sigma_hat = 0 forms must agree");
                let exact_e = budget_ergodic(&p, d0, rho);
                let closed_e = budget_ergodic_closed_form(0.0, 1.0, p.lambda1, d0, rho);
                assert!(exact_e <= closed_e, "ergodic {exact_e} > {closed_e}");
            }
        }
    }

    #[test]
    fn closed_forms_dominate_for_inexact_packs_too() {
        // The closed-form constants bound the exact-rate budgets for any
        // default pack, not just at zero inexactness.
        for &sh in &[0.1, 0.25, 0.4] {
            for &l in &[0.01, 1.0, 250.0] {
                let p = pack(sh, l);
                for &d0 in &[0.3, 5.0] {
                    for &rho in &[1e-2, 1e-5] {
                        let exact = budget_pointwise(&p, d0, rho);
                        let closed = budget_pointwise_closed_form(sh, l, p.lambda1, d0, rho);
                        assert!(exact <= closed, "pointwise {exact} > {closed}");
                        let exact_e = budget_ergodic(&p, d0, rho);
                        let closed_e = budget_ergodic_closed_form(sh, l, p.lambda1, d0, rho);
                        assert!(exact_e <= closed_e, "ergodic {exact_e} > {closed_e}");
                    }
                }
            }
        }
    }

    #[test]
    fn random_packs_hold_invariants() {
        use crate::rng::{self, Stream};
        let mut rng = rng::seeded(20240811, Stream::Sampling);
        for _ in 0..1000 {
            let sh = rng::uniform(&mut rng, 0.0, 0.49);
            let l = math::powf(10.0, rng::uniform(&mut rng, -4.0, 4.0));
            let p = derive_params(sh, l, None, None).unwrap();
            let v = p.max_invariant_violation();
            assert!(v <= 0.0, "violation {v} at sigma_hat={sh}, L={l}");
            assert!(p.q(p.tau).abs() <= 1e-10 * p.q_scale());
        }
    }
}
