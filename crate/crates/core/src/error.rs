use thiserror::Error;

/// Every failure the library can surface. Check failures are *reports*, not errors;
/// these variants are reserved for computations that cannot proceed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("singular-moment: moment {index} is not determined by the Pearson recurrence and no initial value was supplied")]
    SingularMoment { index: usize },

    #[error("inconsistent-init: moment {index} was supplied as {supplied} but the recurrence forces {forced}")]
    InconsistentInit { index: usize, supplied: String, forced: String },

    #[error("moment-unavailable: moment {index} lies beyond the supplied moment table")]
    MomentUnavailable { index: usize },

    #[error("parameter-domain: {0}")]
    ParameterDomain(String),

    #[error("chain-breakdown: recurrence coefficient c_{index} vanished")]
    ChainBreakdown { index: usize },

    #[error("no-closed-form: {0}")]
    NoClosedForm(String),

    #[error("quasi-definite-breakdown: d_{index}² = 0 (the Hankel minor of size {index}+1 vanishes)")]
    QuasiDefiniteBreakdown { index: usize },

    #[error("sobolev-breakdown: Sobolev norm of Q_{index} vanishes")]
    SobolevBreakdown { index: usize },

    #[error("relation-violated at n = {n}: residual {residual}")]
    RelationViolated { n: usize, residual: String },

    #[error("relation-unsolvable at n = {n}: {reason}")]
    RelationUnsolvable { n: usize, reason: String },

    #[error("invalid-pair: {0}")]
    InvalidPair(String),

    #[error("parse: {0}")]
    Parse(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
