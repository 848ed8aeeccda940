use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    Empty,
    #[error("probability vector sums to zero")]
    AllZero,
    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("entry {value} at index {index} is negative")]
    Negative { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid order alpha = {alpha}: {reason}")]
    BadAlpha { alpha: f64, reason: &'static str },
    #[error("value {value} lies outside the domain of the outer function ({domain})")]
    Domain { value: f64, domain: &'static str },
    #[error("no action distribution supplied for output symbol {0}")]
    MissingColumn(usize),
    #[error("gain takes both signs on this instance; multiplicative leakage is undefined")]
    MixedSign,
    #[error("prior Bayes value is zero; multiplicative leakage is undefined")]
    ZeroDenominator,
    #[error("rule `{0}` declares no multiplicative constant c(g)")]
    NoMultiplicativeConstant(String),
    #[error("{0} has no closed-form input update")]
    UnsupportedSpec(String),
    #[error("objective decreased by {drop:e} at iteration {iteration}")]
    Diverged { iteration: usize, drop: f64 },
    #[error("grid oracle supports at most 4 inputs, got {0}")]
    TooLarge(usize),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("minimal expected loss {loss} disagrees with core value {core}")]
    Inconsistent { loss: f64, core: f64 },
}
