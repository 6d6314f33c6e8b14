//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transition matrix is not square: {rows} rows, expected {expected}")]
    NonSquareMatrix { rows: usize, expected: usize },

    #[error("transition matrix entry at ({row},{col}) is {value}; entries must be 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },

    #[error("transition matrix has an all-zero {kind} at index {index}: symbol {index} is stranded")]
    StrandedSymbol { kind: &'static str, index: usize },

    #[error("enumeration of {what} needs {requested} candidates, above the cap {cap}; raise the cap to proceed")]
    EnumerationCap {
        what: String,
        requested: u128,
        cap: u128,
    },

    #[error("periodic-point count overflowed 128-bit integers at n = {n}")]
    CountOverflow { n: usize },

    #[error("reversal incompatible with the shift space: {reason}")]
    IncompatibleReversal { reason: String },

    #[error("product system requires identical factors")]
    MismatchedFactors,

    #[error("word {word:?} is not admissible for this shift space")]
    InadmissibleWord { word: Vec<u16> },

    #[error("potential table has no value for admissible word {word:?}")]
    MissingTableEntry { word: Vec<u16> },

    #[error("potential table lists word {word:?} which is not an admissible window")]
    SpuriousTableEntry { word: Vec<u16> },

    #[error("explicit potential evaluated at n = {n} beyond its horizon {horizon}")]
    HorizonExceeded { n: usize, horizon: usize },

    #[error("matrix-product potential requires strictly positive entries; symbol {symbol} has entry {value}")]
    NonPositiveMatrixEntry { symbol: usize, value: f64 },

    #[error("no periodic points of period {n}: partition sum is empty")]
    EmptyPeriodicSet { n: usize },

    #[error("block recoding needs {states} states, above the cap {cap}")]
    BlockStateCap { states: usize, cap: usize },

    #[error("power iteration did not converge after {iters} iterations; the transfer matrix appears reducible (non-primitive)")]
    PowerIterationDiverged { iters: usize },

    #[error("operation requires a locally constant potential, got {got}")]
    RequiresAdditive { got: &'static str },

    #[error("Markov measure invalid: {reason}")]
    InvalidMarkov { reason: String },

    #[error("measure assigns zero mass to the admissible cylinder {word:?}; full support is required")]
    ZeroCylinder { word: Vec<u16> },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("numerical contract violated in {quantity}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    ContractViolation {
        quantity: String,
        residual: f64,
        tolerance: f64,
    },
}
