use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero raised to negative exponent {exponent}")]
    ZeroNegativePower { exponent: i64 },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// A q-Pochhammer factor `1 - q^k a` vanished.
    #[error("pole: factor 1 - q^{k}·a vanishes (a = {a}, q = {q})")]
    Pole { a: String, q: String, k: i64 },

    #[error("integrand evaluated on a pole: {0}")]
    IntegrandPole(String),

    #[error("parameter guard violated: {0}")]
    GuardViolation(String),

    #[error("field F_{modulus} is too small for a valid point with n = {n}, guard depth {guard_depth}")]
    FieldTooSmall { modulus: u64, n: usize, guard_depth: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("checker for the {expected} regime called on a case in the {found} regime")]
    RegimeMismatch { expected: String, found: String },

    #[error("contour configuration rejected: {0}")]
    Contour(String),
}
