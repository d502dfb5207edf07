//! The bounded-range builder: grow a string by uniform draws below h while
//! holding capped smallness assumptions about each functional's long-output
//! set, switching to an active witness search when a requirement's error
//! counter hits its random cap, and walking restricted subtrees to
//! satisfaction.

use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use bushy_core::{is_big_bounded_with, Caps, OmegaString};
use fireworks_engine::RoundRobin;
use toy_computation::Functional;

use crate::error::DncError;
use crate::family::{first_allowed_stage, GrowthFamily};
use crate::rho::find_rho_star;
use crate::trace::{
    AssumptionDesc, Branch, ChoiceRecord, ReqFinalStatus, ReqSummary, RhoRecord, RunKind,
    RunTrace, TraceEvent,
};

/// One requirement: a functional to defeat and its compressibility slack.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundedRequirement {
    pub gamma: Functional,
    pub d: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundedRunConfig {
    /// Target length of the built string.
    pub depth: u64,
    /// Child indices explored by bigness checks and witness searches.
    pub width_cap: u64,
    /// Step budget for functional evaluations (the stage is capped at it).
    pub gamma_budget: u64,
    /// Steps of evaluation budget revealed per stage.
    pub budget_scale: u64,
    /// Loop-iteration budget; exhausting it inside an active wait is stuck.
    pub loop_budget: u64,
    /// Bigness checks look this far beyond the assumption's stem.
    pub depth_margin: u64,
    /// The measured description constant of the complexity machine.
    pub c_machine: u64,
    /// Test hook: explicit caps instead of random draws.
    pub cap_overrides: Option<Vec<u64>>,
}

impl Default for BoundedRunConfig {
    fn default() -> Self {
        BoundedRunConfig {
            depth: 24,
            width_cap: 4,
            gamma_budget: 4_000,
            budget_scale: 64,
            loop_budget: 600,
            depth_margin: 2,
            c_machine: 34,
            cap_overrides: None,
        }
    }
}

enum ReqState {
    Fresh,
    Holding(AssumptionDesc),
    Satisfied { rho_index: usize },
    Stuck,
}

/// Evaluation budget at a stage: grows with the stage, capped by the config.
fn stage_budget(stage: u64, scale: u64, cap: u64) -> u64 {
    stage.saturating_mul(scale).max(1).min(cap)
}

/// Is the held smallness assumption refuted by the stage-`stage` snapshot?
fn smallness_refuted(
    gamma: &Functional,
    assumption: &AssumptionDesc,
    stage: u64,
    scale: u64,
    config_budget: u64,
    width_cap: u64,
    depth_margin: u64,
) -> bool {
    let AssumptionDesc::Smallness { stem, threshold, g, .. } = assumption else {
        return false;
    };
    let budget = stage_budget(stage, scale, config_budget);
    let mut member =
        |tau: &OmegaString| BigUint::from(gamma.output_len(tau, budget)) >= *threshold;
    let caps = Caps::new(stem.len() as u64 + depth_margin, width_cap);
    matches!(
        is_big_bounded_with(&mut member, stem, g, caps),
        Ok(Some(_))
    )
}

/// Run the bounded builder. All randomness (caps, draws) comes from `rng`;
/// replaying with the same seed and configuration reproduces the trace
/// exactly. Stuckness and budget exhaustion are trace states, not errors.
pub fn run_bounded_dnc(
    family: &GrowthFamily,
    roster: &[BoundedRequirement],
    config: &BoundedRunConfig,
    rng: &mut impl Rng,
) -> Result<RunTrace, DncError> {
    if config.depth > family.k_max {
        return Err(DncError::BadConfig(format!(
            "depth {} exceeds the family's k_max {}",
            config.depth, family.k_max
        )));
    }
    if config.depth + config.depth_margin > family.i_max {
        return Err(DncError::BadConfig(format!(
            "depth {} + margin {} exceeds the family's horizon {}",
            config.depth, config.depth_margin, family.i_max
        )));
    }

    // Stage 0: draw the caps n_i uniformly from [1, 2^{i+m}].
    let caps: Vec<BigUint> = match &config.cap_overrides {
        Some(over) => {
            if over.len() != roster.len() {
                return Err(DncError::BadConfig("cap override length mismatch".into()));
            }
            over.iter().map(|&c| BigUint::from(c.max(1))) .collect()
        }
        None => (0..roster.len())
            .map(|i| rng.gen_biguint_below(&(BigUint::one() << (i as u64 + family.m))) + 1u32)
            .collect(),
    };

    // first-attention gates from the threshold crossover
    let gates: Vec<Option<u64>> = roster
        .iter()
        .map(|r| {
            first_allowed_stage(family, r.d, r.gamma.complexity_bits(), config.c_machine)
        })
        .collect();

    let mut sigma = OmegaString::root();
    let mut states: Vec<ReqState> = roster.iter().map(|_| ReqState::Fresh).collect();
    let mut counters = vec![0u64; roster.len()];
    let mut choices: Vec<ChoiceRecord> = Vec::new();
    let mut events: Vec<TraceEvent> = Vec::new();
    let mut rho_records: Vec<RhoRecord> = Vec::new();
    let mut stuck: Option<(usize, u64)> = None;
    let mut scheduler = RoundRobin::new(roster.len());

    let mut stage: u64 = 0;
    'outer: while stage < config.loop_budget && (sigma.len() as u64) < config.depth {
        let k = sigma.len() as u64;
        let pick = scheduler.next_eligible(stage, |i| {
            !matches!(states[i], ReqState::Fresh | ReqState::Holding(_))
                || gates[i].map_or(true, |gate| k < gate)
        });

        let Some(i) = pick else {
            // nobody eligible: keep building at full width
            draw_free(&mut sigma, family, &mut choices, rng);
            stage += 1;
            continue;
        };

        match &states[i] {
            ReqState::Fresh => {
                let assumption = make_smallness(family, &sigma, k);
                events.push(TraceEvent::Assume {
                    stage,
                    requirement: i,
                    branch: Branch::FirstAttention,
                    assumption: assumption.clone(),
                });
                states[i] = ReqState::Holding(assumption);
            }
            ReqState::Holding(assumption) => {
                let refuted = smallness_refuted(
                    &roster[i].gamma,
                    assumption,
                    stage,
                    config.budget_scale,
                    config.gamma_budget,
                    config.width_cap,
                    config.depth_margin,
                );
                if !refuted {
                    // assumption maintained: pick the next value freely
                    draw_free(&mut sigma, family, &mut choices, rng);
                } else {
                    counters[i] += 1;
                    events.push(TraceEvent::Refuted {
                        stage,
                        requirement: i,
                        counter: counters[i],
                    });
                    if BigUint::from(counters[i]) < caps[i] {
                        let assumption = make_smallness(family, &sigma, k);
                        events.push(TraceEvent::Assume {
                            stage,
                            requirement: i,
                            branch: Branch::Reassumed,
                            assumption: assumption.clone(),
                        });
                        states[i] = ReqState::Holding(assumption);
                    } else {
                        // cap reached: wait for a bushy witness inside some
                        // output cone, then walk it
                        let target_len = threshold_at(family, k);
                        events.push(TraceEvent::ActiveWait {
                            stage,
                            requirement: i,
                            k,
                            target_len: target_len.clone(),
                        });
                        let g_search = family.restricted_bound_fn(k.max(1));
                        loop {
                            let budget = stage_budget(stage, config.budget_scale, config.gamma_budget);
                            let search_caps = Caps::new(
                                sigma.len() as u64 + config.depth_margin,
                                config.width_cap,
                            );
                            if let Some((rho, witness)) = find_rho_star(
                                &sigma,
                                &roster[i].gamma,
                                &target_len,
                                &g_search,
                                search_caps,
                                budget,
                            ) {
                                let rho_index = rho_records.len();
                                rho_records.push(RhoRecord {
                                    requirement: i,
                                    rho,
                                    k,
                                    target_len: target_len.clone(),
                                    r_bits: None,
                                    witness: witness.clone(),
                                    bushiness: g_search.clone(),
                                    stage,
                                    gamma_budget: budget,
                                });
                                events.push(TraceEvent::RhoFound {
                                    stage,
                                    requirement: i,
                                    rho_index,
                                });
                                let from = sigma.len() as u64;
                                walk_restriction(
                                    &mut sigma,
                                    &witness,
                                    rho_index,
                                    &mut choices,
                                    rng,
                                );
                                events.push(TraceEvent::Walked {
                                    stage,
                                    requirement: i,
                                    from_depth: from,
                                    to_depth: sigma.len() as u64,
                                });
                                events.push(TraceEvent::Satisfied { stage, requirement: i });
                                states[i] = ReqState::Satisfied { rho_index };
                                break;
                            }
                            stage += 1;
                            if stage >= config.loop_budget {
                                events.push(TraceEvent::Stuck { stage, requirement: i });
                                states[i] = ReqState::Stuck;
                                stuck = Some((i, stage));
                                break 'outer;
                            }
                        }
                    }
                }
            }
            _ => unreachable!("scheduler skips finished requirements"),
        }
        stage += 1;
    }

    let requirements = roster
        .iter()
        .zip(states)
        .enumerate()
        .map(|(i, (r, st))| {
            let (status, final_assumption) = match st {
                ReqState::Fresh => (ReqFinalStatus::NeverAttended, None),
                ReqState::Holding(a) => (ReqFinalStatus::Holding, Some(a)),
                ReqState::Satisfied { rho_index } => {
                    (ReqFinalStatus::SatisfiedByRestriction { rho_index }, None)
                }
                ReqState::Stuck => (ReqFinalStatus::Stuck, None),
            };
            ReqSummary {
                label: r.gamma.label(),
                gamma: r.gamma.clone(),
                phi: None,
                d: r.d,
                declared_complexity_bits: r.gamma.complexity_bits(),
                status,
                final_assumption,
                caps: vec![caps[i].clone()],
            }
        })
        .collect();

    Ok(RunTrace {
        kind: match family.mode {
            crate::family::FamilyMode::Exact => RunKind::Bounded,
            crate::family::FamilyMode::Scaled { .. } => RunKind::BoundedScaled,
        },
        m: family.m,
        depth: config.depth,
        width_cap: config.width_cap,
        gamma_budget: config.gamma_budget,
        loop_budget: config.loop_budget,
        final_sigma: sigma,
        final_stage: stage.min(config.loop_budget),
        stuck,
        choices,
        events,
        rho_records,
        requirements,
    })
}

/// The output-length cutoff for assumptions made at stage k: h(k−1), passed
/// through the inner scale when the family carries one.
fn threshold_at(family: &GrowthFamily, k: u64) -> BigUint {
    let base = family.h(k.saturating_sub(1)).clone();
    match &family.h0 {
        None => base,
        Some(h0) => h0.eval_big(&base).unwrap_or(base),
    }
}

fn make_smallness(family: &GrowthFamily, sigma: &OmegaString, k: u64) -> AssumptionDesc {
    AssumptionDesc::Smallness {
        stem: sigma.clone(),
        k,
        threshold: threshold_at(family, k),
        g: family.g_fn(k),
    }
}

fn draw_free(
    sigma: &mut OmegaString,
    family: &GrowthFamily,
    choices: &mut Vec<ChoiceRecord>,
    rng: &mut impl Rng,
) {
    let k = sigma.len() as u64;
    let bound = family.h(k).clone();
    let v = rng.gen_biguint_below(&bound);
    choices.push(ChoiceRecord {
        depth: k,
        bound,
        index: v.clone(),
        value: v.clone(),
        restriction: None,
    });
    *sigma = sigma.child(v);
}

pub(crate) fn walk_restriction(
    sigma: &mut OmegaString,
    witness: &bushy_core::WitnessTree,
    rho_index: usize,
    choices: &mut Vec<ChoiceRecord>,
    rng: &mut impl Rng,
) {
    while !witness.is_leaf(sigma) {
        let children = witness.children_of(sigma);
        if children.is_empty() {
            break;
        }
        let pick = rng.gen_range(0..children.len());
        let child = children[pick].clone();
        choices.push(ChoiceRecord {
            depth: sigma.len() as u64,
            bound: BigUint::from(children.len()),
            index: BigUint::from(pick),
            value: child.values().last().cloned().unwrap_or_default(),
            restriction: Some(rho_index),
        });
        *sigma = child;
    }
}
