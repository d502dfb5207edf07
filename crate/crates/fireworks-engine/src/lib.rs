//! Probabilistic forcing over a computable partial order: draw random caps,
//! hold passive guesses against a uniformly enumerated family until refuted,
//! switch to an active search on the cap-th refutation, and report stuckness
//! as data. One run is strictly sequential; distinct runs are independent
//! and parallelize by seed.

mod plan;
mod poset;
mod run;
mod schedule;
pub mod trap;

pub use plan::{draw_plan, stuck_bound, FireworksPlan};
pub use poset::{
    ConditionFamily, DenseZeroFamily, EmptyFamily, ForcingPoset, StagedFamily, StringPoset,
};
pub use run::{
    audit_active_membership, audit_chain, audit_passive_soundness, run, Event, EventKind,
    FireworksConfig, FireworksOutcome, ReqStatus, StuckInfo,
};
pub use schedule::RoundRobin;
