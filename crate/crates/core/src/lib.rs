//! Exact analysis of full quantum revivals in the Jaynes-Cummings model.
//!
//! * [`exact`] and [`surd`]: big rationals and sums of rational multiples of
//!   square roots, the exact layer every decision is made in.
//! * [`model`]: excitation blocks and their closed-form spectra.
//! * [`dynamics`]: floating-point evolution and revival distances.
//! * [`revival`]: gap ratios, revival certificates, the resonance obstruction.
//! * [`diophantine`]: points on `X^2 - Y^2 = K` and parameter synthesis.
//! * [`scan`]: the denominator-LCM scan over unit-hyperbola points.

pub mod diophantine;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod model;
pub mod revival;
pub mod scan;
pub mod surd;

pub use error::{Error, Result};
pub use exact::Rational;
pub use surd::ExactEnergy;

/// Runs `f` on a dedicated rayon pool of `workers` threads; `0` uses the
/// global pool.
pub fn with_workers<T, F>(workers: usize, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
