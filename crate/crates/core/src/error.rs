//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// A vector or matrix axis does not have the expected length.
    #[error("dimension mismatch on axis `{axis}`: expected {expected}, got {got}")]
    DimensionMismatch {
        axis: &'static str,
        expected: usize,
        got: usize,
    },

    /// A vector that must be a probability distribution is not one.
    #[error("`{what}` is not a probability distribution (sum = {sum})")]
    InvalidDistribution { what: String, sum: f64 },

    #[error("infeasible: {what}")]
    Infeasible { what: String },

    #[error("invalid parameter: {what}")]
    InvalidParam { what: String },

    #[error("linear program {context}: {status:?}")]
    Lp {
        status: crate::lp::LpStatus,
        context: String,
    },

    #[error("Bayes plausibility violated: max deviation {deviation:.3e} exceeds {limit:.1e}")]
    BayesPlausibility { deviation: f64, limit: f64 },

    #[error("unknown context {context} (learner has {n_contexts} contexts)")]
    UnknownContext { context: usize, n_contexts: usize },

    #[error("reward {value} outside declared range [{lo}, {hi}]")]
    RewardOutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("feedback kind does not match learner mode `{expected}`")]
    FeedbackMismatch { expected: &'static str },

    #[error("round {round}: {source}")]
    AtRound {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn at_round(self, round: usize) -> Error {
        Error::AtRound {
            round,
            source: Box::new(self),
        }
    }
}
