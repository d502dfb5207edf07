//! The adversarial trap family: refuters are minted below conditions the
//! chain has moved away from, a bounded number of times, then the set stays
//! empty below everything new. Together with a few chain-moving requirements
//! this realizes the one-bad-cap failure pattern.

use std::cell::RefCell;

use num_bigint::BigUint;

use bushy_core::OmegaString;

use crate::poset::{ConditionFamily, DenseZeroFamily};

/// A trap: answers extension queries by revealing already-minted refuters,
/// minting fresh ones (child `marker`, distinct from the chain's canonical
/// moves) while supply lasts, and staying silent afterwards.
#[derive(Debug)]
pub struct TrapSet {
    marker: u64,
    supply: u64,
    state: RefCell<TrapState>,
}

#[derive(Debug, Default)]
struct TrapState {
    minted: Vec<OmegaString>,
    issued: u64,
}

impl TrapSet {
    /// `marker` must be nonzero so minted refuters sit off the canonical
    /// chain moves.
    pub fn new(marker: u64, supply: u64) -> Self {
        assert!(marker > 0, "marker 0 collides with chain moves");
        TrapSet {
            marker,
            supply,
            state: RefCell::new(TrapState::default()),
        }
    }

    pub fn issued(&self) -> u64 {
        self.state.borrow().issued
    }
}

impl ConditionFamily<OmegaString> for TrapSet {
    fn find_extension_in(&self, p: &OmegaString, _stage: u64) -> Option<OmegaString> {
        let mut st = self.state.borrow_mut();
        if let Some(q) = st.minted.iter().find(|q| p.is_prefix_of(q)) {
            return Some(q.clone());
        }
        if st.issued < self.supply {
            let q = p.child(self.marker);
            st.issued += 1;
            st.minted.push(q.clone());
            Some(q)
        } else {
            None
        }
    }

    fn contains_at(&self, q: &OmegaString, _stage: u64) -> bool {
        self.state.borrow().minted.contains(q)
    }
}

/// One requirement of the shipped trap experiment.
pub enum TrapFamilyMember {
    /// Chain mover: the dense set of canonical extensions.
    Mover(DenseZeroFamily),
    Trap(TrapSet),
}

impl ConditionFamily<OmegaString> for TrapFamilyMember {
    fn find_extension_in(&self, p: &OmegaString, stage: u64) -> Option<OmegaString> {
        match self {
            TrapFamilyMember::Mover(m) => m.find_extension_in(p, stage),
            TrapFamilyMember::Trap(t) => t.find_extension_in(p, stage),
        }
    }
    fn contains_at(&self, q: &OmegaString, stage: u64) -> bool {
        match self {
            TrapFamilyMember::Mover(m) => m.contains_at(q, stage),
            TrapFamilyMember::Trap(t) => t.contains_at(q, stage),
        }
    }
}

/// The shipped trap family: `movers` chain-moving requirements up front,
/// traps with alternating supplies 1 and 2 behind them. Fresh state per run.
pub fn trap_family(req_count: usize, movers: usize) -> Vec<TrapFamilyMember> {
    (0..req_count)
        .map(|i| {
            if i < movers {
                TrapFamilyMember::Mover(DenseZeroFamily)
            } else {
                let supply = 1 + (i as u64 % 2);
                TrapFamilyMember::Trap(TrapSet::new(i as u64 + 1, supply))
            }
        })
        .collect()
}

/// Caps for the members of a trap family, as borrowed trait objects.
pub fn family_refs(family: &[TrapFamilyMember]) -> Vec<&dyn ConditionFamily<OmegaString>> {
    family
        .iter()
        .map(|m| m as &dyn ConditionFamily<OmegaString>)
        .collect()
}

/// How a cap flip changed a requirement's fate on replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlipOutcome {
    /// The requirement resolved the way the one-bad-cap property predicts.
    AsPredicted,
    /// The replay got stuck at a different requirement first, so this
    /// requirement's fate was not observable.
    Interfered { other: usize },
    /// The property failed.
    Violated { detail: String },
}

/// Replay checker: given a stuck run's requirement and cap, re-run with each
/// alternative cap and classify against "smaller means active, larger means
/// passive".
pub fn check_flip(
    outcome_status: &crate::run::FireworksOutcome<OmegaString>,
    requirement: usize,
    smaller: bool,
) -> FlipOutcome {
    if let Some(s) = outcome_status.stuck {
        if s.requirement == requirement {
            return FlipOutcome::Violated {
                detail: format!("still stuck at requirement {requirement}"),
            };
        }
        return FlipOutcome::Interfered { other: s.requirement };
    }
    let ok = if smaller {
        outcome_status.satisfied_actively(requirement)
    } else {
        outcome_status.satisfied_passively(requirement)
    };
    if ok {
        FlipOutcome::AsPredicted
    } else {
        FlipOutcome::Violated {
            detail: format!(
                "requirement {requirement} ended {:?} after flipping {}",
                outcome_status.statuses[requirement],
                if smaller { "smaller" } else { "larger" }
            ),
        }
    }
}

pub use crate::plan::FireworksPlan;
pub use num_bigint::BigUint as Cap;

/// Convenience for tests: a plan with explicit u64 caps.
pub fn forced_plan(caps: &[u64]) -> FireworksPlan {
    FireworksPlan {
        caps: caps.iter().map(|&c| BigUint::from(c)).collect(),
    }
}
