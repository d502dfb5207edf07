//! The forcing loop: capped passive guessing, active searches, stuck
//! detection, and a complete event log.

use num_bigint::BigUint;
use serde::Serialize;

use crate::plan::FireworksPlan;
use crate::poset::{ConditionFamily, ForcingPoset};
use crate::schedule::RoundRobin;

#[derive(Clone, Copy, Debug)]
pub struct FireworksConfig {
    /// Total loop iterations before a waiting search is declared stuck.
    pub global_budget: u64,
}

impl Default for FireworksConfig {
    fn default() -> Self {
        FireworksConfig { global_budget: 4_000 }
    }
}

/// Final status of one requirement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ReqStatus<C> {
    /// Never attended (tiny budgets or an early stuck run).
    Pending,
    /// The last passive guess was never refuted within the budget.
    SatisfiedPassively { guess: C, made_at: u64 },
    /// An active search found an extension in the set.
    SatisfiedActively { found: C, at_stage: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StuckInfo {
    pub requirement: usize,
    pub stage: u64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum EventKind<C> {
    Guess { cond: C },
    Refutation { witness: C },
    Switch,
    Extension { cond: C },
    Stuck,
}

#[derive(Clone, Debug, Serialize)]
pub struct Event<C> {
    pub stage: u64,
    pub requirement: usize,
    #[serde(flatten)]
    pub kind: EventKind<C>,
}

#[derive(Clone, Debug)]
pub struct FireworksOutcome<C> {
    pub statuses: Vec<ReqStatus<C>>,
    pub stuck: Option<StuckInfo>,
    /// The condition chain p0 ≥ p1 ≥ …, root first.
    pub chain: Vec<C>,
    pub events: Vec<Event<C>>,
    pub final_stage: u64,
}

impl<C: Serialize> FireworksOutcome<C> {
    /// One JSON record per event.
    pub fn event_log_jsonl(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("serializable event"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl<C> FireworksOutcome<C> {
    pub fn is_stuck(&self) -> bool {
        self.stuck.is_some()
    }

    pub fn satisfied_actively(&self, i: usize) -> bool {
        matches!(self.statuses[i], ReqStatus::SatisfiedActively { .. })
    }

    pub fn satisfied_passively(&self, i: usize) -> bool {
        matches!(self.statuses[i], ReqStatus::SatisfiedPassively { .. })
    }
}

enum State<C> {
    Unvisited,
    Passive { guess: C, made_at: u64 },
    Active { found: C, at_stage: u64 },
}

/// Run the template: passive guesses held until refuted by the stage
/// enumeration, a switch to active search on the cap-th refutation, and a
/// stuck flag when an active search exhausts the budget. The stage counter
/// is the loop counter; every guess, refutation, switch, extension and stuck
/// event is logged. Stuckness is data, not an error.
pub fn run<P: ForcingPoset>(
    poset: &P,
    family: &[&dyn ConditionFamily<P::Cond>],
    plan: &FireworksPlan,
    schedule: &mut RoundRobin,
    config: &FireworksConfig,
) -> FireworksOutcome<P::Cond> {
    assert_eq!(family.len(), plan.len(), "one cap per requirement");
    let n = family.len();
    let mut states: Vec<State<P::Cond>> = (0..n).map(|_| State::Unvisited).collect();
    let mut counters = vec![0u64; n];
    let mut chain = vec![poset.root()];
    let mut events: Vec<Event<P::Cond>> = Vec::new();
    let mut stuck = None;

    let mut stage = 0u64;
    'outer: while stage < config.global_budget {
        let pick = schedule.next_eligible(stage, |i| {
            matches!(states[i], State::Active { .. })
        });
        let Some(i) = pick else {
            break; // every requirement actively satisfied
        };
        let tip = chain.last().expect("nonempty chain").clone();
        match &states[i] {
            State::Unvisited => {
                events.push(Event {
                    stage,
                    requirement: i,
                    kind: EventKind::Guess { cond: tip.clone() },
                });
                states[i] = State::Passive { guess: tip, made_at: stage };
            }
            State::Passive { guess, .. } => {
                if let Some(witness) = family[i].find_extension_in(guess, stage) {
                    counters[i] += 1;
                    events.push(Event {
                        stage,
                        requirement: i,
                        kind: EventKind::Refutation { witness },
                    });
                    if BigUint::from(counters[i]) < *plan.cap(i) {
                        events.push(Event {
                            stage,
                            requirement: i,
                            kind: EventKind::Guess { cond: tip.clone() },
                        });
                        states[i] = State::Passive { guess: tip, made_at: stage };
                    } else {
                        events.push(Event {
                            stage,
                            requirement: i,
                            kind: EventKind::Switch,
                        });
                        loop {
                            if let Some(q) = family[i].find_extension_in(&tip, stage) {
                                chain.push(q.clone());
                                events.push(Event {
                                    stage,
                                    requirement: i,
                                    kind: EventKind::Extension { cond: q.clone() },
                                });
                                states[i] = State::Active { found: q, at_stage: stage };
                                break;
                            }
                            stage += 1;
                            if stage >= config.global_budget {
                                events.push(Event {
                                    stage,
                                    requirement: i,
                                    kind: EventKind::Stuck,
                                });
                                stuck = Some(StuckInfo { requirement: i, stage });
                                break 'outer;
                            }
                        }
                    }
                }
            }
            State::Active { .. } => unreachable!("blocked by the scheduler"),
        }
        stage += 1;
    }

    let statuses = states
        .into_iter()
        .map(|st| match st {
            State::Unvisited => ReqStatus::Pending,
            State::Passive { guess, made_at } => {
                ReqStatus::SatisfiedPassively { guess, made_at }
            }
            State::Active { found, at_stage } => {
                ReqStatus::SatisfiedActively { found, at_stage }
            }
        })
        .collect();

    FireworksOutcome {
        statuses,
        stuck,
        chain,
        events,
        final_stage: stage.min(config.global_budget),
    }
}

/// Chain monotonicity: every recorded condition extends its predecessor.
pub fn audit_chain<P: ForcingPoset>(poset: &P, outcome: &FireworksOutcome<P::Cond>) -> bool {
    outcome
        .chain
        .windows(2)
        .all(|w| poset.extends(&w[1], &w[0]))
}

/// Passive soundness at the budget: no surviving guess has an extension in
/// its set at the final stage.
pub fn audit_passive_soundness<C>(
    family: &[&dyn ConditionFamily<C>],
    outcome: &FireworksOutcome<C>,
) -> bool {
    outcome.statuses.iter().enumerate().all(|(i, st)| match st {
        ReqStatus::SatisfiedPassively { guess, .. } => {
            family[i].find_extension_in(guess, outcome.final_stage).is_none()
        }
        _ => true,
    })
}

/// Active soundness: every recorded extension is in its set at the recorded
/// stage.
pub fn audit_active_membership<C>(
    family: &[&dyn ConditionFamily<C>],
    outcome: &FireworksOutcome<C>,
) -> bool {
    outcome.statuses.iter().enumerate().all(|(i, st)| match st {
        ReqStatus::SatisfiedActively { found, at_stage } => {
            family[i].contains_at(found, *at_stage)
        }
        _ => true,
    })
}
