use thiserror::Error;

/// Errors raised by the exact-arithmetic engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series has zero constant term and is not invertible")]
    NonInvertible,
    #[error("negative power of a series with zero constant term")]
    NegativePowerOfNonUnit,
    #[error("coefficient at q^{exponent} requested but series is only known below q^{order}")]
    OutOfTruncation { exponent: String, order: String },
    #[error("divergent infinite product: factor exponent {0} is not positive")]
    DivergentProduct(String),
    #[error("internal inconsistency building {what}: two independent constructions disagree at q^{exponent}")]
    InternalInconsistency { what: String, exponent: String },
    #[error("basis fit needs truncation order >= {needed}, got {got}")]
    InsufficientOrder { needed: String, got: String },
    #[error("series has fractional exponent support; an integer-exponent series is required")]
    FractionalExponents,
    #[error("factor shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("missing Pontryagin number for top monomial {monomial} of factor {factor}")]
    MissingTableEntry { factor: usize, monomial: String },
    #[error("unknown catalog manifold {0:?}")]
    UnknownManifold(String),
    #[error("product of an empty list of manifolds")]
    EmptyProduct,
    #[error("invalid manifold document: {0}")]
    InvalidManifold(String),
    #[error("unsupported Liu-Wang parameters (a, b) = ({0}, {1}); only (0, 1) and (1, 0) are implemented")]
    UnsupportedLiuWang(i64, i64),
    #[error("manifold has dimension {got}, expected {expected}")]
    WrongDimension { expected: u32, got: u32 },
    #[error("check requires a string manifold")]
    NotString,
    #[error("invalid bernoulli index {0}: need a positive even integer")]
    BadBernoulliIndex(i64),
    #[error("unknown form name {0:?}")]
    UnknownForm(String),
    #[error("cannot parse twist expression: {0}")]
    BadTwist(String),
    #[error("cannot parse series document: {0}")]
    BadSeriesDocument(String),
}
