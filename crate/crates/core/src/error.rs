use thiserror::Error;

/// Why an integer was rejected as a cyclic cubic conductor.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConductorIssue {
    #[error("conductor must be positive")]
    Zero,
    #[error("1 is not the conductor of a cubic field")]
    Trivial,
    #[error("conductor is even")]
    Even,
    #[error("prime factor {0} is congruent to 2 mod 3")]
    PrimeTwoModThree(u64),
    #[error("prime {0} divides the conductor more than once")]
    NotSquarefree(u64),
    #[error("3-part of the conductor is 3^{0}, expected 1 or 9")]
    BadThreePart(u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid conductor {value}: {reason}")]
    InvalidConductor { value: u64, reason: ConductorIssue },

    #[error("conductor {conductor}: expected {expected} {what}, found {found}")]
    CountMismatch {
        conductor: u64,
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("M = {m} and N = {n} have different parity")]
    ParityError { m: i64, n: i64 },

    #[error("factorization of (M + 3N sqrt(-3))/2 failed: {0}")]
    FactorizationMismatch(String),

    #[error("a^((p-1)/3) mod pi is not a cube root of unity for p = {p}, a = {a}")]
    NotCubeRootOfUnity { p: u64, a: u64 },

    #[error(
        "no normalization of the character mod {p} matches -tau^3 = p*pi (residual {residual:e})"
    )]
    NormalizationFailure { p: u64, residual: f64 },

    #[error("coefficient of X^{degree} is not an integer: {value}")]
    NonIntegralCoefficient { degree: usize, value: String },

    #[error("identity failed: {0}")]
    IdentityFailure(String),

    #[error("{what} residual {residual:e} exceeds tolerance {tolerance:e}")]
    ToleranceExceeded {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("coefficient of X^{degree} = {value} is {residual:e} away from an integer (tolerance {tolerance:e})")]
    RoundingFailure {
        degree: usize,
        value: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("conductor {conductor}: {detail}")]
    MatchingFailure { conductor: u64, detail: String },

    #[error("cubic has non-positive discriminant {0}; roots are not all real")]
    ComplexRoots(String),

    #[error("period relation failed with residual {residual:e} (tolerance {tolerance:e})")]
    RelationFailure { residual: f64, tolerance: f64 },

    #[error("congruence failed: {0}")]
    CongruenceFailure(String),

    #[error("generator check ({part}) failed: {detail}")]
    GeneratorFailure { part: char, detail: String },

    #[error("coefficient {0} is too large for divisor enumeration")]
    CoefficientTooLarge(String),

    #[error("expected a cubic, got degree {0}")]
    NotCubic(usize),

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
