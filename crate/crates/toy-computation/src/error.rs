//! Errors surfaced by the toy machine.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToyError {
    #[error("oracle horizon exceeded: read at index {index}")]
    OracleHorizonExceeded { index: u64 },

    #[error("program index {index} outside the enumeration (size {size})")]
    BadIndex { index: usize, size: usize },

    #[error("unparseable mnemonic: {0}")]
    BadMnemonic(String),

    #[error("h0 must be strictly increasing on the tested range (depth {depth})")]
    NotIncreasing { depth: u64 },

    #[error(transparent)]
    Bushy(#[from] bushy_core::BushyError),
}
