//! Post-hoc ground truth for a trace: diagonal avoidance, draw validity,
//! witness verification, assumption-list discipline, and description-length
//! margins for the recorded splitting strings.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use bushy_core::{is_big_bounded_with, verify_witness_with, Caps, OmegaString};
use toy_computation::{BDncSet, Functional, PrefixFreeMachine, ToyEnumeration};

use crate::trace::{AssumptionDesc, ReqFinalStatus, RunTrace, TraceEvent};

/// Diagnostic margin for one recorded splitting string.
#[derive(Clone, Debug, Serialize)]
pub struct RhoMargin {
    pub requirement: usize,
    pub rho_len: usize,
    /// Time-bounded complexity of ρ* on the shipped machine.
    pub k_approx: u64,
    /// `k_approx − |ρ*|`: negative means the split actually compressed.
    pub excess: i64,
    /// The context bound recorded by the run, when one was used.
    pub r_bits: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    /// Does the final string avoid the diagonal bad set at the audit budget?
    pub dnc_prefix: bool,
    /// Every drawn index is below its recorded bound, and unrestricted
    /// values equal their indices.
    pub draws_valid: bool,
    /// Every recorded bound is at least 2^(depth+m).
    pub draw_floor_ok: bool,
    /// Every recorded witness verifies against its recorded cone and
    /// bushiness at the recorded stage.
    pub witnesses_valid: bool,
    /// At most one live assumption per requirement at every event, and
    /// requirements are satisfied only through a found witness.
    pub discipline_ok: bool,
    /// Requirements whose final state counts as satisfied: an active
    /// restriction, or a final assumption that still holds at the audit
    /// stage.
    pub requirement_satisfied: Vec<bool>,
    /// Walks that entered a cone whose final assumption was true.
    pub true_assumption_hits: usize,
    pub rho_margins: Vec<RhoMargin>,
}

impl AuditReport {
    pub fn all_satisfied(&self) -> bool {
        self.requirement_satisfied.iter().all(|&s| s)
    }

    pub fn structurally_valid(&self) -> bool {
        self.draws_valid && self.witnesses_valid && self.discipline_ok
    }
}

/// Audit a self-contained trace using the functionals it recorded.
pub fn audit_trace_self(
    trace: &RunTrace,
    enumeration: &ToyEnumeration,
    k_budget: u64,
) -> AuditReport {
    let gammas: Vec<Functional> = trace.requirements.iter().map(|r| r.gamma.clone()).collect();
    audit_trace(trace, enumeration, &gammas, k_budget)
}

/// Recompute a trace's ground truth. `gammas` must be the roster the run
/// used, in order; `k_budget` is the evaluation budget for the diagonal
/// check and the complexity margins.
pub fn audit_trace(
    trace: &RunTrace,
    enumeration: &ToyEnumeration,
    gammas: &[Functional],
    k_budget: u64,
) -> AuditReport {
    let diag = BDncSet::new(enumeration, k_budget);
    let machine = PrefixFreeMachine::standard();
    audit_trace_with(trace, &diag, Some(&machine), gammas, k_budget)
}

/// `audit_trace` with the diagonal table precomputed and the complexity
/// margins optional — the form batch experiments use.
pub fn audit_trace_with(
    trace: &RunTrace,
    diag: &BDncSet,
    machine: Option<&PrefixFreeMachine>,
    gammas: &[Functional],
    k_budget: u64,
) -> AuditReport {
    let dnc_prefix = diag.is_dnc_prefix(&trace.final_sigma, k_budget);

    // draws
    let mut draws_valid = trace.final_sigma.len() == trace.choices.len();
    let mut draw_floor_ok = true;
    let floor = |depth: u64| BigUint::one() << (depth + trace.m);
    for (pos, c) in trace.choices.iter().enumerate() {
        if c.index >= c.bound || c.depth != pos as u64 {
            draws_valid = false;
        }
        if c.restriction.is_none() && c.index != c.value {
            draws_valid = false;
        }
        if trace.final_sigma.get(pos).map(|v| v != &c.value).unwrap_or(true) {
            draws_valid = false;
        }
        if c.bound < floor(c.depth) {
            draw_floor_ok = false;
        }
    }

    // witnesses
    let mut witnesses_valid = true;
    for rec in &trace.rho_records {
        let Some(gamma) = gammas.get(rec.requirement) else {
            witnesses_valid = false;
            continue;
        };
        let len = match usize::try_from(&rec.target_len) {
            Ok(l) => l,
            Err(_) => {
                witnesses_valid = false;
                continue;
            }
        };
        let mut member = |tau: &OmegaString| {
            let out = gamma.output(tau, rec.gamma_budget).bits;
            out.len() >= len && rec.rho.is_prefix_of(&out)
        };
        if rec.rho.len() != len
            || !verify_witness_with(&rec.witness, &mut member, &rec.bushiness)
        {
            witnesses_valid = false;
        }
    }

    // event discipline: replay live assumptions, require satisfactions to
    // follow a found witness
    let mut discipline_ok = true;
    let mut live: Vec<bool> = vec![false; trace.requirements.len()];
    let mut found: Vec<bool> = vec![false; trace.requirements.len()];
    for ev in &trace.events {
        match ev {
            TraceEvent::Assume { requirement, .. } => {
                if live[*requirement] {
                    discipline_ok = false; // two live assumptions at once
                }
                live[*requirement] = true;
            }
            TraceEvent::Refuted { requirement, .. } => {
                if !live[*requirement] {
                    discipline_ok = false;
                }
                live[*requirement] = false;
            }
            TraceEvent::RhoFound { requirement, rho_index, .. } => {
                found[*requirement] = true;
                if trace
                    .rho_records
                    .get(*rho_index)
                    .map(|r| r.requirement != *requirement)
                    .unwrap_or(true)
                {
                    discipline_ok = false;
                }
            }
            TraceEvent::Satisfied { requirement, .. } => {
                if !found[*requirement] {
                    discipline_ok = false;
                }
            }
            _ => {}
        }
    }
    for (i, summary) in trace.requirements.iter().enumerate() {
        match summary.status {
            ReqFinalStatus::SatisfiedByRestriction { .. } if !found[i] => {
                discipline_ok = false
            }
            ReqFinalStatus::Holding if summary.final_assumption.is_none() => {
                discipline_ok = false
            }
            _ => {}
        }
    }

    // requirement satisfaction and silent hits at the audit stage
    let mut requirement_satisfied = Vec::with_capacity(trace.requirements.len());
    let mut true_assumption_hits = 0usize;
    for (i, summary) in trace.requirements.iter().enumerate() {
        let sat = match &summary.status {
            ReqFinalStatus::SatisfiedByRestriction { .. } => true,
            ReqFinalStatus::Stuck => false,
            ReqFinalStatus::NeverAttended => false,
            ReqFinalStatus::Holding => match &summary.final_assumption {
                Some(AssumptionDesc::PhiUndefined { .. }) => true,
                Some(AssumptionDesc::Smallness { stem, threshold, g, .. }) => {
                    let gamma = &gammas[i];
                    let mut member = |tau: &OmegaString| {
                        BigUint::from(gamma.output_len(tau, k_budget)) >= *threshold
                    };
                    let caps = Caps::new(
                        stem.len() as u64 + 2,
                        trace.width_cap,
                    );
                    let still_small = !matches!(
                        is_big_bounded_with(&mut member, stem, g, caps),
                        Ok(Some(_))
                    );
                    if still_small {
                        // did the walk wander into the cone anyway?
                        let mut hit = false;
                        for p in trace.final_sigma.prefixes() {
                            if stem.is_prefix_of(&p) && member(&p) {
                                hit = true;
                                break;
                            }
                        }
                        if hit {
                            true_assumption_hits += 1;
                        }
                    }
                    still_small
                }
                None => false,
            },
        };
        requirement_satisfied.push(sat);
    }

    // complexity margins (diagnostic, not asserted)
    let rho_margins = match machine {
        None => Vec::new(),
        Some(machine) => trace
            .rho_records
            .iter()
            .map(|rec| {
                let k = machine.k_approx(&rec.rho, k_budget);
                RhoMargin {
                    requirement: rec.requirement,
                    rho_len: rec.rho.len(),
                    k_approx: k,
                    excess: k as i64 - rec.rho.len() as i64,
                    r_bits: rec.r_bits,
                }
            })
            .collect(),
    };

    AuditReport {
        dnc_prefix,
        draws_valid,
        draw_floor_ok,
        witnesses_valid,
        discipline_ok,
        requirement_satisfied,
        true_assumption_hits,
        rho_margins,
    }
}
