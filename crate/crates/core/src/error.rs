use thiserror::Error;

use crate::urn::{Count, ModelKind};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("insufficient balls: urn holds {total} but the sample size is {m}")]
    InsufficientBalls { total: Count, m: u64 },

    #[error("model {model} {}", if *.needs_y { "requires a Y distribution" } else { "does not use a Y distribution" })]
    ModelLaws { model: ModelKind, needs_y: bool },

    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),

    #[error("model {0} has a random limit; the requested quantity needs a point stable zero")]
    RandomLimit(ModelKind),

    #[error("statistic {statistic} is not supported for model {model}")]
    UnsupportedStatistic {
        model: ModelKind,
        statistic: &'static str,
    },

    #[error("growth exponent is undefined when the two mean additions are equal")]
    UndefinedExponent,

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("trajectory carries no step records; rerun with full recording")]
    ThinTrajectory,

    #[error("oracle state budget exceeded: {reachable} reachable states > budget {budget}")]
    BudgetExceeded { reachable: usize, budget: usize },

    #[error("ball counter overflow")]
    Overflow,

    #[error("replica {index} failed: {source}")]
    Replica { index: u64, source: Box<Error> },
}
