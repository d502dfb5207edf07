//! Seeded batch experiments over the simulation crates, aggregated against
//! exact bounds into machine-checkable reports.

pub mod experiment;
pub mod lemmas;
pub mod report;
pub mod seed;

pub use experiment::{
    run_experiment, DncBoundedConfig, DncUnboundedConfig, ExperimentKind, ExperimentSpec,
    FamilyAuditConfig, HarnessError, TrapConfig, WalkConfig,
};
pub use report::{BoundCheck, BoundDirection, StatsReport, Verdict};
