use thiserror::Error;

/// Errors raised by the exact engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in cyclotomic field")]
    DivisionByZero,

    #[error("malformed rational `{0}`")]
    MalformedRational(String),

    #[error("coefficient of degree {degree} is beyond truncation order {order}")]
    BeyondTruncation { degree: i64, order: i64 },

    #[error("series has no invertible leading coefficient within its truncation")]
    NonInvertibleSeries,

    #[error("cannot compose: {0}")]
    Composition(String),

    #[error("unknown series `{0}`")]
    UnknownSeries(String),

    #[error("series truncated at order {order} but degree {needed} is required")]
    SeriesTooShort { order: i64, needed: i64 },

    #[error("elements belong to different rings")]
    RingMismatch,

    #[error("ring has no integration functional")]
    NoIntegration,

    #[error("ring has no fiber/base split")]
    NoFiberSplit,

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("cannot substitute into series: {0}")]
    BadSubstitution(String),

    #[error("zero denominator polynomial")]
    ZeroDenominator,

    #[error("genus series must satisfy f(0) = 1")]
    UnnormalizedGenus,

    #[error("malformed total class: {0}")]
    MalformedTotalClass(String),

    #[error("bundle kind mismatch: {0}")]
    BundleKind(String),

    #[error("θ must lie in (0,π)")]
    AngleOutOfRange,

    #[error("not a normal direction: θ = 0")]
    NotNormalDirection,

    #[error("fixed-point datum has trivial weight")]
    TrivialWeight,

    #[error("trivial normal weight")]
    TrivialNormalWeight,

    #[error("odd rank bundle has no Euler class")]
    OddRank,

    #[error("order {n} exceeds configured q-order {order}")]
    OrderExceeded { n: u32, order: u32 },

    #[error("Atiyah class must be nonzero")]
    ZeroAtiyahClass,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at {line}:{column}: {message} (near `{token}`)")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
