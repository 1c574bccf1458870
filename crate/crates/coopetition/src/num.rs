//! Scalar abstraction for the core numerics.
//!
//! All model evaluation and solver math is written against [`Real`] so the
//! same code runs at `f32` or `f64` precision. Concrete surfaces (sampling,
//! file IO, the CLI) instantiate everything at `f64` via the default type
//! parameters on the domain types.

use num_traits::{Float, NumAssign, NumCast};

/// Floating-point scalar usable by the engine.
pub trait Real:
    Float + NumAssign + NumCast + std::iter::Sum + std::fmt::Debug + std::fmt::Display + 'static
{
    /// Lossy conversion from `f64`, for constants and counts.
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite f64 converts to Real")
    }

    /// Conversion from an integer sample count.
    fn of_count(x: u64) -> Self {
        Self::of(x as f64)
    }

    /// Widening view for reporting.
    fn as_f64(self) -> f64 {
        <f64 as NumCast>::from(self).expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
