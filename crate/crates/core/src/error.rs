use thiserror::Error;

/// Errors raised by the library. Variants are grouped roughly by the module
/// that produces them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // arithmetic
    #[error("division by zero")]
    DivisionByZero,
    #[error("{k} is not coprime to the level {level}")]
    NotCoprime { k: i64, level: u32 },
    #[error("argument of zero is undefined")]
    ZeroArgument,
    #[error("sign could not be certified at {bits} bits")]
    UndecidedSign { bits: u32 },
    #[error("coefficient is not a single radical monomial: {0}")]
    NonMonomial(String),

    // polar parts and series
    #[error("operation undefined on the zero polar part")]
    ZeroPolarPart,
    #[error("polar part is not minimally ramified")]
    NotMinimal,
    #[error("index {value} out of range 0..{bound}")]
    OutOfRange { value: i64, bound: i64 },
    #[error("series cannot be inverted: {0}")]
    NonInvertibleLeadingTerm(String),

    // formal data and transforms
    #[error("twist polar part must be unramified")]
    RamifiedTwist,
    #[error("rank-one data refers to a location absent from the problem: {0}")]
    UnknownLocation(String),
    #[error("leg does not accept a factor of slope {slope}")]
    SlopeLegMismatch { slope: String },
    #[error("Fourier transform has rank zero (punctual transform)")]
    RankZeroOutput,
    #[error("problem has no point at infinity; add it explicitly")]
    NotLocalizedAtInfinity,
    #[error("chi = 1 is not allowed for middle convolution")]
    TrivialChi,
    #[error("singularity at infinity must be regular with scalar monodromy")]
    NotScalarAtInfinity,
    #[error("quotient of the convolution space is zero")]
    DegenerateQuotient,
    #[error("punctual correction at {location} would need rank {needed} > {available}")]
    PunctualMismatch { location: String, needed: usize, available: usize },
    #[error("location is not cyclotomic: {0}")]
    NonCyclotomicLocation(String),
    #[error("truncation audit failed: polar part changed when precision doubled")]
    TruncationAudit,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    // reduction driver
    #[error("two special (ramified) points; cannot come from a rigid irreducible connection")]
    TwoSpecialPoints,
    #[error("rigidity index is {0}, reduction requires 2")]
    PreconditionRig(i64),
    #[error("certificate replay mismatch: {0}")]
    ReplayMismatch(String),

    // stokes
    #[error("direction is a boundary (Stokes) direction")]
    BoundaryDirection,
    #[error("index set is not closed under the Galois action")]
    IndexNotClosed,

    // input
    #[error("parse error at {line}:{column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("semantic error: {0}")]
    SemanticError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
