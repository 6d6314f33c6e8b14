//! Numerical laboratory for two-sided subshifts of finite type.
//!
//! The crate builds the standard objects of symbolic thermodynamics at desk
//! scale and checks the exact finite-size identities they satisfy:
//!
//! * [`shift`] — shift spaces, periodic orbits, reversal maps, product systems;
//! * [`potential`] — locally constant, matrix-product and explicit potential
//!   sequences, Birkhoff sums, entropy production, additivity diagnostics;
//! * [`pressure`] — topological pressure by periodic-orbit sums, transfer-matrix
//!   spectral radius and cylinder growth brackets;
//! * [`markov`] — stationary Markov measures, equilibrium chains, entropy rates,
//!   time reversal of chains;
//! * [`measures`] — periodic-orbit Gibbs measures, block empirical measures,
//!   level-2 rate function, weak Gibbs diagnostics;
//! * [`fluctuation`] — laws of entropy production, transient fluctuation
//!   relations, entropic pressure, Legendre rate functions, error exponents;
//! * [`verify`] — the exact-identity suite run by the CLI.
//!
//! All floating-point computations are generic over the scalar type through
//! the [`Real`] trait; `f64` is the reference instantiation used by the CLI
//! and the acceptance suite.

pub mod error;
pub mod fixtures;
pub mod fluctuation;
pub mod markov;
pub mod measures;
pub mod numeric;
pub mod potential;
pub mod pressure;
pub mod real;
pub mod shift;
pub mod verify;

pub use error::Error;
pub use real::Real;
pub use shift::{PeriodicWord, Reversal, ReversalKind, ShiftSpace, Symbol, Word};

/// Reference scalar type: all spec tolerances are stated for `f64`.
pub type Real64 = f64;
/// Reduced-precision scalar, available through the same generic code paths.
pub type Real32 = f32;

pub type Potential64 = potential::Potential<f64>;
pub type MarkovMeasure64 = markov::MarkovMeasure<f64>;
pub type AtomicLaw64 = fluctuation::AtomicLaw<f64>;
pub type RateFunction64 = fluctuation::RateFunction<f64>;
pub type PressureEstimate64 = pressure::PressureEstimate<f64>;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
