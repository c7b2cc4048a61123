//! Wall-clock abstraction so the solvers can stamp their traces without
//! depending on `std`.

/// Source of elapsed seconds since some fixed origin (monotone).
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// Clock that always reads zero; the `no_std` default.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullClock;

impl Clock for NullClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

/// Monotonic wall clock anchored at construction time.
#[cfg(feature = "std")]
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    start: std::time::Instant,
}

#[cfg(feature = "std")]
impl WallClock {
    pub fn start() -> Self {
        Self {
            start: std::time::Instant::now(),
        }
    }
}

#[cfg(feature = "std")]
impl Default for WallClock {
    fn default() -> Self {
        Self::start()
    }
}

#[cfg(feature = "std")]
impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
