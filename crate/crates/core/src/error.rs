use thiserror::Error;

use crate::diagram::{CrossingKey, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("diagram is not in general position ({} violation(s)): {}", .0.len(), first_violation(.0))]
    Degenerate(Vec<Violation>),

    #[error("unknown crossing {0}")]
    UnknownCrossing(CrossingKey),

    #[error("cycles are not vertex-disjoint")]
    NotDisjoint,

    #[error("loop intersection is not a single path: {0}")]
    DisconnectedIntersection(String),

    #[error("unsupported layout family: {0}")]
    UnsupportedFamily(String),

    #[error("wrong graph for this operation: {0}")]
    WrongGraph(String),

    #[error("self-crossing count {count} exceeds oracle cap {cap}")]
    OracleCapExceeded { count: usize, cap: usize },

    #[error("classification failure: {0}")]
    Classification(String),

    #[error("lower bound violated: {what} count {count} is below proven bound {bound}")]
    BoundViolated { what: &'static str, count: u64, bound: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("operation cancelled")]
    Cancelled,

    #[error("malformed diagram file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn first_violation(v: &[Violation]) -> String {
    v.first().map(|x| x.to_string()).unwrap_or_default()
}
