//! Error type shared by the tree combinatorics operations.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BushyError {
    #[error("depth cap {depth} is shorter than the stem (length {stem_len})")]
    BadCaps { depth: u64, stem_len: u64 },

    #[error("growth function undefined at depth {depth} (beyond declared horizon)")]
    BeyondHorizon { depth: u64 },

    #[error("value too large for this operation")]
    ValueTooLarge,

    #[error("g exceeds h at depth {depth}")]
    GrowthExceedsWidth { depth: u64 },

    #[error("restriction tree does not contain the walk's node {node} at depth {depth}")]
    RestrictionMismatch { depth: u64, node: String },
}
