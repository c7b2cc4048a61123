//! Scalar math shims and compensated accumulation.
//!
//! Routes the handful of transcendental functions this crate needs through
//! `std` when available and through `libm` otherwise, so the rest of the code
//! is oblivious to the `no_std` configuration.

#[cfg(feature = "std")]
#[inline]
pub fn sqrt(x: f64) -> f64 {
    x.sqrt()
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn ln(x: f64) -> f64 {
    x.ln()
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn powf(x: f64, e: f64) -> f64 {
    x.powf(e)
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn powf(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[cfg(feature = "std")]
#[inline]
pub fn ceil(x: f64) -> f64 {
    x.ceil()
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    x.hypot(y)
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Integer power by binary exponentiation (`powi` lives in `std`, not
/// `core`); bit-identical across the `std`/`no_std` configurations.
pub fn powi(x: f64, n: i32) -> f64 {
    if n < 0 {
        return 1.0 / powi(x, -n);
    }
    let mut base = x;
    let mut exp = n as u32;
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// `log^+(t) = max(ln t, 0)`.
#[inline]
pub fn log_plus(t: f64) -> f64 {
    let v = ln(t);
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Ceiling of a nonnegative real as an integer count.
///
/// Saturates at `u64::MAX` so absurd budgets (e.g. `rho` near zero) do not
/// wrap around.
#[inline]
pub fn ceil_count(x: f64) -> u64 {
    if !(x > 0.0) {
        return 0;
    }
    let c = ceil(x);
    if c >= u64::MAX as f64 {
        u64::MAX
    } else {
        c as u64
    }
}

/// Neumaier-compensated running sum.
///
/// Keeps a first-order error term so long alternating sums (the ergodic
/// inner-product accumulator in particular) do not lose the cancellation
/// digits that the certificate checks rely on.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_plus_clamps() {
        assert_eq!(log_plus(0.5), 0.0);
        assert_eq!(log_plus(1.0), 0.0);
        assert!((log_plus(core::f64::consts::E) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ceil_count_handles_edges() {
        assert_eq!(ceil_count(0.0), 0);
        assert_eq!(ceil_count(-3.0), 0);
        assert_eq!(ceil_count(2.0), 2);
        assert_eq!(ceil_count(2.0001), 3);
        assert_eq!(ceil_count(f64::INFINITY), u64::MAX);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e-16 repeated: naive summation drops every tiny term.
        let mut c = CompensatedSum::new();
        c.add(1.0);
        for _ in 0..1000 {
            c.add(1e-16);
        }
        assert!((c.value() - (1.0 + 1000.0 * 1e-16)).abs() < 1e-18);
    }
}
