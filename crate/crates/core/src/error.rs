use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is prime but not odd; an odd prime modulus is required")]
    EvenPrime(u64),

    #[error("k = {k} does not divide p - 1 = {}", p - 1)]
    NotADivisor { p: u64, k: u64 },

    #[error("k must be at least 2, got {0}")]
    DegenerateK(u64),

    #[error("k = {k} must be {expected}")]
    WrongParity { k: u64, expected: &'static str },

    #[error("{p} divides d = {d}")]
    ModulusDividesD { p: u64, d: i64 },

    #[error("{a} is not invertible modulo {p}")]
    NotInvertible { a: i64, p: u64 },

    #[error("zero denominator: {what} vanishes modulo {p}")]
    ZeroDenominator { p: u64, what: String },

    #[error("matrix must be square and non-empty (got {rows} rows, row {bad_row} has {len} entries)")]
    NotSquare { rows: usize, bad_row: usize, len: usize },

    #[error("circulant tuple must be non-empty")]
    EmptyTuple,

    #[error("tuple is not palindromic: a_{index} != a_{mirror}")]
    NotPalindromic { index: usize, mirror: usize },

    #[error("determinant {det} is not divisible by the predicted factor {factor}")]
    Indivisible { det: BigInt, factor: BigInt },

    #[error("quotient {quotient} is not a perfect square")]
    NotSquareQuotient { quotient: BigInt },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown claim id {0:?}")]
    UnknownClaim(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
