//! Randomized builders of diagonal-avoiding strings over fast-growing
//! families, instrumented end to end: every draw, assumption, refutation,
//! restriction and outcome lands in a serializable trace that an
//! independent audit can recompute.

pub mod audit;
mod bounded;
mod error;
mod family;
mod rho;
mod trace;
mod unbounded;

pub use audit::{audit_trace, audit_trace_self, audit_trace_with, AuditReport, RhoMargin};
pub use bounded::{run_bounded_dnc, BoundedRequirement, BoundedRunConfig};
pub use error::DncError;
pub use family::{
    first_allowed_stage, log2_ceil, requirement_threshold, FamilyMode, GrowthFamily,
};
pub use rho::find_rho_star;
pub use trace::{
    AssumptionDesc, Branch, ChoiceRecord, ReqFinalStatus, ReqSummary, RhoRecord, RunKind,
    RunTrace, TraceEvent,
};
pub use unbounded::{
    cantor_pair, context_bits, run_unbounded_dnc, triple_code, PhiRef,
    UnboundedRequirement, UnboundedRunConfig,
};
