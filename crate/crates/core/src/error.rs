use thiserror::Error;

use crate::lattice::RelationSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid query instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("set functions have mismatched sizes ({left} vs {right} relations)")]
    SizeMismatch { left: usize, right: usize },

    #[error("cardinality of disconnected set {0:?} requested with cross products disabled")]
    DisconnectedSet(RelationSet),

    #[error("exponent budget exceeded: W*n = {required} > {budget}")]
    ExponentBudgetExceeded { required: u128, budget: u64 },

    #[error("no split of {0:?} reproduces its DP value; table is inconsistent")]
    CorruptTable(RelationSet),

    #[error("oracle disagreement for seed {seed}, n = {n}, rep = {rep}: {detail}")]
    OracleDisagreement {
        seed: u64,
        n: usize,
        rep: usize,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures that indicate a bug or a corrupted computation
    /// rather than bad user input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::CorruptTable(_) | Error::OracleDisagreement { .. } | Error::Overflow(_)
        )
    }
}
