//! Scalar abstraction for the numerical kernels.

use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the library is generic over.
///
/// The associated constants carry the working tolerances of the library.
/// The `f64` values are the contractual ones; the `f32` instantiation exists
/// so that the kernels stay scalar-agnostic and uses correspondingly looser
/// tolerances.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for merging nearby atom values in a law.
    const MERGE_TOL: Self;
    /// Tolerance for row-stochasticity and stationarity checks.
    const STOCH_TOL: Self;
    /// Relative convergence tolerance of the Perron eigenvalue iteration.
    const POWER_TOL: Self;

    /// Conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    /// Conversion from a usize (counts, grid sizes).
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in scalar type")
    }
}

impl Real for f64 {
    const MERGE_TOL: Self = 1e-12;
    const STOCH_TOL: Self = 1e-12;
    const POWER_TOL: Self = 1e-13;
}

impl Real for f32 {
    const MERGE_TOL: Self = 1e-5;
    const STOCH_TOL: Self = 1e-5;
    const POWER_TOL: Self = 1e-6;
}
