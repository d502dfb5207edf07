//! Errors for family construction and run configuration.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DncError {
    #[error("family values too large at level {k} (exact mode is for small k)")]
    FamilyTooLarge { k: u64 },

    #[error("family inequality violated: {0}")]
    FamilyInequalityViolated(&'static str),

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error(transparent)]
    Bushy(#[from] bushy_core::BushyError),

    #[error(transparent)]
    Toy(#[from] toy_computation::ToyError),
}
