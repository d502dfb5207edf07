//! The unbounded builder: no fixed width family — draw bounds come from a
//! dynamic function G derived from the currently-assumed smallness facts,
//! and each requirement alternates divergence assumptions (capped per
//! round) with smallness assumptions (capped overall) before one final
//! active search.

use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use bushy_core::{is_big_bounded_with, Caps, GrowthFn, OmegaString};
use fireworks_engine::RoundRobin;
use toy_computation::{literal_overhead, Functional, ToyEnumeration, ToyProgram};

use crate::bounded::walk_restriction;
use crate::error::DncError;
use crate::rho::find_rho_star;
use crate::trace::{
    AssumptionDesc, Branch, ChoiceRecord, ReqFinalStatus, ReqSummary, RhoRecord, RunKind,
    RunTrace, TraceEvent,
};

/// A partial function for a requirement: an index into the enumeration or
/// an inline program.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhiRef {
    Index { e: usize },
    Inline { program: ToyProgram },
}

impl PhiRef {
    fn eval(&self, enumeration: &ToyEnumeration, arg: u64, budget: u64) -> Option<BigUint> {
        match self {
            PhiRef::Index { e } => enumeration.phi(*e, arg, budget).ok().flatten(),
            PhiRef::Inline { program } => {
                let input = [BigUint::from(arg)];
                match toy_computation::run(program, &input, None, budget) {
                    Ok(outcome) => outcome.natural_output(),
                    Err(_) => None,
                }
            }
        }
    }

    fn label(&self) -> String {
        match self {
            PhiRef::Index { e } => format!("phi[{e}]"),
            PhiRef::Inline { program } => format!("phi-inline[{}i]", program.len()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnboundedRequirement {
    pub gamma: Functional,
    pub phi: PhiRef,
    pub d: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnboundedRunConfig {
    pub depth: u64,
    pub width_cap: u64,
    pub gamma_budget: u64,
    /// Steps of evaluation budget revealed per stage.
    pub budget_scale: u64,
    pub loop_budget: u64,
    pub depth_margin: u64,
    /// Largest usable φ-value: a defined value beyond this aborts the run
    /// (desk-scale honesty; the assumption tables would explode).
    pub phi_len_cap: u64,
    /// Test hook: explicit outer caps n(i,1).
    pub outer_cap_overrides: Option<Vec<u64>>,
    /// Test hook: explicit inner caps n(i,2,b), indexed by requirement then
    /// round; missing rounds fall back to random draws.
    pub inner_cap_overrides: Option<Vec<Vec<u64>>>,
}

impl Default for UnboundedRunConfig {
    fn default() -> Self {
        UnboundedRunConfig {
            depth: 16,
            width_cap: 4,
            gamma_budget: 4_000,
            budget_scale: 64,
            loop_budget: 600,
            depth_margin: 2,
            phi_len_cap: 1 << 16,
            outer_cap_overrides: None,
            inner_cap_overrides: None,
        }
    }
}

/// Cantor pairing, applied twice for the cap exponents ⟨i,a,b⟩.
pub fn cantor_pair(a: u64, b: u64) -> u64 {
    (a + b) * (a + b + 1) / 2 + b
}

pub fn triple_code(i: u64, a: u64, b: u64) -> u64 {
    cantor_pair(cantor_pair(i, a), b)
}

#[derive(Clone, Debug)]
enum UState {
    Fresh,
    HoldingC1(AssumptionDesc),
    HoldingC2 { desc: AssumptionDesc, phi_len: u64 },
    Satisfied { rho_index: usize },
    Stuck,
}

impl UState {
    fn live(&self) -> bool {
        matches!(
            self,
            UState::Fresh | UState::HoldingC1(_) | UState::HoldingC2 { .. }
        )
    }

    fn assumption(&self) -> Option<&AssumptionDesc> {
        match self {
            UState::HoldingC1(a) => Some(a),
            UState::HoldingC2 { desc, .. } => Some(desc),
            _ => None,
        }
    }
}

/// The dynamic draw-width function: `G(u) = 2^(u+m) (g_0(u) + … + g_l(u))`,
/// over the base entry plus every currently-assumed smallness function.
fn big_g_table(m: u64, i_max: u64, entries: &[GrowthFn]) -> GrowthFn {
    let values = (0..=i_max)
        .map(|u| {
            let mut acc = BigUint::one() << (u + m); // the base list entry
            for e in entries {
                acc += e.eval(u).expect("entry tables cover the horizon");
            }
            acc << (u + m)
        })
        .collect();
    GrowthFn::table(values)
}

/// A computable description-length bound for the current search context:
/// the bit length of the canonical serialization of (σ, Γ, φ, d, L) plus
/// the machine's literal overhead.
pub fn context_bits(
    sigma: &OmegaString,
    gamma: &Functional,
    phi: &PhiRef,
    d: u64,
    list: &[(usize, AssumptionDesc)],
) -> u64 {
    r_bits(sigma, gamma, phi, d, list)
}

fn r_bits(
    sigma: &OmegaString,
    gamma: &Functional,
    phi: &PhiRef,
    d: u64,
    list: &[(usize, AssumptionDesc)],
) -> u64 {
    let tuple = serde_json::json!({
        "sigma": sigma,
        "gamma": gamma,
        "phi": phi,
        "d": d,
        "assumptions": list,
    });
    let bits = 8 * serde_json::to_vec(&tuple).expect("serializable").len() as u64;
    bits + literal_overhead(bits)
}

/// What the attended requirement is currently holding.
enum Disposition {
    First,
    C1 { arg: u64 },
    C2 {
        stem: OmegaString,
        threshold: BigUint,
        g: GrowthFn,
        phi_len: u64,
    },
}

/// Run the unbounded builder against the enumerated partial functions.
pub fn run_unbounded_dnc(
    roster: &[UnboundedRequirement],
    enumeration: &ToyEnumeration,
    m: u64,
    config: &UnboundedRunConfig,
    rng: &mut impl Rng,
) -> Result<RunTrace, DncError> {
    let i_max = config.depth + config.depth_margin;

    // Stage 0: outer caps n(i,1) from [1, 2^{⟨i,1,0⟩+m}]
    let outer_caps: Vec<BigUint> = match &config.outer_cap_overrides {
        Some(over) => {
            if over.len() != roster.len() {
                return Err(DncError::BadConfig("outer cap override mismatch".into()));
            }
            over.iter().map(|&c| BigUint::from(c.max(1))).collect()
        }
        None => (0..roster.len() as u64)
            .map(|i| draw_cap(rng, triple_code(i, 1, 0) + m))
            .collect::<Result<_, _>>()?,
    };

    let mut states: Vec<UState> = roster.iter().map(|_| UState::Fresh).collect();
    let mut c_outer = vec![0u64; roster.len()];
    let mut c_inner = vec![0u64; roster.len()];
    let mut inner_caps: Vec<Option<BigUint>> = vec![None; roster.len()];
    let mut caps_drawn: Vec<Vec<BigUint>> =
        outer_caps.iter().map(|c| vec![c.clone()]).collect();

    let mut sigma = OmegaString::root();
    let mut choices = Vec::new();
    let mut events = Vec::new();
    let mut rho_records: Vec<RhoRecord> = Vec::new();
    let mut stuck = None;
    let mut scheduler = RoundRobin::new(roster.len());

    let mut stage: u64 = 0;
    'outer: while stage < config.loop_budget && (sigma.len() as u64) < config.depth {
        let k = sigma.len() as u64;
        let pick = scheduler.next_eligible(stage, |i| !states[i].live());

        let Some(i) = pick else {
            let big_g = big_g_table(m, i_max, &g_entries(&states, usize::MAX));
            draw_bounded(&mut sigma, &big_g, &mut choices, rng)?;
            stage += 1;
            continue;
        };
        let req = &roster[i];

        // this round's inner cap n(i,2,c_outer)
        if inner_caps[i].is_none()
            && matches!(states[i], UState::Fresh | UState::HoldingC1(_))
        {
            let cap = inner_cap(rng, config, i, c_outer[i], m)?;
            caps_drawn[i].push(cap.clone());
            inner_caps[i] = Some(cap);
        }

        let disposition = match &states[i] {
            UState::Fresh => Disposition::First,
            UState::HoldingC1(AssumptionDesc::PhiUndefined { arg, .. }) => {
                Disposition::C1 { arg: *arg }
            }
            UState::HoldingC2 {
                desc: AssumptionDesc::Smallness { stem, threshold, g, .. },
                phi_len,
            } => Disposition::C2 {
                stem: stem.clone(),
                threshold: threshold.clone(),
                g: g.clone(),
                phi_len: *phi_len,
            },
            _ => unreachable!("scheduler skips finished requirements"),
        };

        match disposition {
            Disposition::First => {
                let list = assumption_list(&states, usize::MAX);
                let r = r_bits(&sigma, &req.gamma, &req.phi, req.d, &list);
                let desc = AssumptionDesc::PhiUndefined { arg: r + req.d, r_bits: r };
                events.push(TraceEvent::Assume {
                    stage,
                    requirement: i,
                    branch: Branch::FirstAttention,
                    assumption: desc.clone(),
                });
                states[i] = UState::HoldingC1(desc);
            }
            Disposition::C1 { arg } => {
                let budget = stage.saturating_mul(config.budget_scale).max(1).min(config.gamma_budget);
                match req.phi.eval(enumeration, arg, budget) {
                    None => {
                        let big_g = big_g_table(m, i_max, &g_entries(&states, usize::MAX));
                        draw_bounded(&mut sigma, &big_g, &mut choices, rng)?;
                    }
                    Some(value) => {
                        events.push(TraceEvent::PhiDefined {
                            stage,
                            requirement: i,
                            arg,
                            value: value.clone(),
                        });
                        c_inner[i] += 1;
                        events.push(TraceEvent::Refuted {
                            stage,
                            requirement: i,
                            counter: c_inner[i],
                        });
                        let cap = inner_caps[i].clone().expect("drawn above");
                        if BigUint::from(c_inner[i]) < cap {
                            // replace the divergence assumption, same round
                            let list = assumption_list(&states, i);
                            let r = r_bits(&sigma, &req.gamma, &req.phi, req.d, &list);
                            let desc =
                                AssumptionDesc::PhiUndefined { arg: r + req.d, r_bits: r };
                            events.push(TraceEvent::Assume {
                                stage,
                                requirement: i,
                                branch: Branch::Reassumed,
                                assumption: desc.clone(),
                            });
                            states[i] = UState::HoldingC1(desc);
                        } else {
                            // wait for the current-context value, then assume
                            // smallness of the long-output set
                            states[i] = UState::Fresh; // off the list while waiting
                            let list = assumption_list(&states, i);
                            let r = r_bits(&sigma, &req.gamma, &req.phi, req.d, &list);
                            let arg = r + req.d;
                            events.push(TraceEvent::PhiWait { stage, requirement: i, arg });
                            let mut found = None;
                            loop {
                                let budget = stage.saturating_mul(config.budget_scale).max(1).min(config.gamma_budget);
                                if let Some(v) = req.phi.eval(enumeration, arg, budget) {
                                    found = Some(v);
                                    break;
                                }
                                stage += 1;
                                if stage >= config.loop_budget {
                                    events.push(TraceEvent::Stuck { stage, requirement: i });
                                    states[i] = UState::Stuck;
                                    stuck = Some((i, stage));
                                    break;
                                }
                            }
                            let Some(value) = found else { break 'outer };
                            events.push(TraceEvent::PhiDefined {
                                stage,
                                requirement: i,
                                arg,
                                value: value.clone(),
                            });
                            let phi_len = u64::try_from(&value).ok().filter(|&v| {
                                v <= config.phi_len_cap
                            });
                            let Some(phi_len) = phi_len else {
                                return Err(DncError::BadConfig(
                                    "phi value exceeds the desk cap".into(),
                                ));
                            };
                            let g_then = big_g_table(m, i_max, &g_entries(&states, i));
                            let g_assumed = shift_table(&g_then, phi_len, i_max)?;
                            let desc = AssumptionDesc::Smallness {
                                stem: sigma.clone(),
                                k: sigma.len() as u64,
                                threshold: BigUint::from(phi_len),
                                g: g_assumed,
                            };
                            events.push(TraceEvent::Assume {
                                stage,
                                requirement: i,
                                branch: Branch::SmallnessAfterWait,
                                assumption: desc.clone(),
                            });
                            states[i] = UState::HoldingC2 { desc, phi_len };
                        }
                    }
                }
            }
            Disposition::C2 { stem, threshold, g, phi_len } => {
                let budget = stage.saturating_mul(config.budget_scale).max(1).min(config.gamma_budget);
                let refuted = {
                    let mut member = |tau: &OmegaString| {
                        BigUint::from(req.gamma.output_len(tau, budget)) >= threshold
                    };
                    let caps =
                        Caps::new(stem.len() as u64 + config.depth_margin, config.width_cap);
                    matches!(is_big_bounded_with(&mut member, &stem, &g, caps), Ok(Some(_)))
                };
                if !refuted {
                    let big_g = big_g_table(m, i_max, &g_entries(&states, usize::MAX));
                    draw_bounded(&mut sigma, &big_g, &mut choices, rng)?;
                } else {
                    c_outer[i] += 1;
                    events.push(TraceEvent::Refuted {
                        stage,
                        requirement: i,
                        counter: c_outer[i],
                    });
                    states[i] = UState::Fresh;
                    if BigUint::from(c_outer[i]) < outer_caps[i] {
                        // new round of divergence assumptions
                        c_inner[i] = 0;
                        inner_caps[i] = None;
                        let cap = inner_cap(rng, config, i, c_outer[i], m)?;
                        caps_drawn[i].push(cap.clone());
                        inner_caps[i] = Some(cap);
                        let list = assumption_list(&states, i);
                        let r = r_bits(&sigma, &req.gamma, &req.phi, req.d, &list);
                        let desc = AssumptionDesc::PhiUndefined { arg: r + req.d, r_bits: r };
                        events.push(TraceEvent::Assume {
                            stage,
                            requirement: i,
                            branch: Branch::RoundRestart,
                            assumption: desc.clone(),
                        });
                        states[i] = UState::HoldingC1(desc);
                    } else {
                        // final active search: a G-bushy witness inside some
                        // length-φ output cone
                        let list = assumption_list(&states, i);
                        let r = r_bits(&sigma, &req.gamma, &req.phi, req.d, &list);
                        let g_now = big_g_table(m, i_max, &g_entries(&states, i));
                        let target_len = BigUint::from(phi_len);
                        events.push(TraceEvent::ActiveWait {
                            stage,
                            requirement: i,
                            k,
                            target_len: target_len.clone(),
                        });
                        loop {
                            let budget = stage.saturating_mul(config.budget_scale).max(1).min(config.gamma_budget);
                            let search_caps = Caps::new(
                                sigma.len() as u64 + config.depth_margin,
                                config.width_cap,
                            );
                            if let Some((rho, witness)) = find_rho_star(
                                &sigma,
                                &req.gamma,
                                &target_len,
                                &g_now,
                                search_caps,
                                budget,
                            ) {
                                let rho_index = rho_records.len();
                                rho_records.push(RhoRecord {
                                    requirement: i,
                                    rho,
                                    k,
                                    target_len: target_len.clone(),
                                    r_bits: Some(r),
                                    witness: witness.clone(),
                                    bushiness: g_now.clone(),
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
                                states[i] = UState::Satisfied { rho_index };
                                break;
                            }
                            stage += 1;
                            if stage >= config.loop_budget {
                                events.push(TraceEvent::Stuck { stage, requirement: i });
                                states[i] = UState::Stuck;
                                stuck = Some((i, stage));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        stage += 1;
    }

    let requirements = roster
        .iter()
        .zip(states)
        .enumerate()
        .map(|(i, (r, st))| {
            let (status, final_assumption) = match st {
                UState::Fresh => (ReqFinalStatus::NeverAttended, None),
                UState::HoldingC1(a) => (ReqFinalStatus::Holding, Some(a)),
                UState::HoldingC2 { desc, .. } => (ReqFinalStatus::Holding, Some(desc)),
                UState::Satisfied { rho_index } => {
                    (ReqFinalStatus::SatisfiedByRestriction { rho_index }, None)
                }
                UState::Stuck => (ReqFinalStatus::Stuck, None),
            };
            ReqSummary {
                label: format!("{} / {}", r.gamma.label(), r.phi.label()),
                gamma: r.gamma.clone(),
                phi: Some(serde_json::to_value(&r.phi).expect("serializable")),
                d: r.d,
                declared_complexity_bits: r.gamma.complexity_bits(),
                status,
                final_assumption,
                caps: caps_drawn[i].clone(),
            }
        })
        .collect();

    Ok(RunTrace {
        kind: RunKind::Unbounded,
        m,
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

/// The current assumption list, skipping requirement `except`.
fn assumption_list(states: &[UState], except: usize) -> Vec<(usize, AssumptionDesc)> {
    states
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != except)
        .filter_map(|(i, s)| s.assumption().map(|a| (i, a.clone())))
        .collect()
}

/// The smallness functions currently on the list, skipping `except`.
fn g_entries(states: &[UState], except: usize) -> Vec<GrowthFn> {
    states
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != except)
        .filter_map(|(_, s)| match s {
            UState::HoldingC2 {
                desc: AssumptionDesc::Smallness { g, .. },
                ..
            } => Some(g.clone()),
            _ => None,
        })
        .collect()
}

fn draw_cap(rng: &mut impl Rng, exponent: u64) -> Result<BigUint, DncError> {
    if exponent > bushy_core::MAX_SHIFT_BITS {
        return Err(DncError::BadConfig(format!(
            "cap exponent {exponent} too large"
        )));
    }
    Ok(rng.gen_biguint_below(&(BigUint::one() << exponent)) + 1u32)
}

fn inner_cap(
    rng: &mut impl Rng,
    config: &UnboundedRunConfig,
    i: usize,
    round: u64,
    m: u64,
) -> Result<BigUint, DncError> {
    if let Some(over) = &config.inner_cap_overrides {
        if let Some(per_req) = over.get(i) {
            if let Some(&cap) = per_req.get(round as usize) {
                return Ok(BigUint::from(cap.max(1)));
            }
        }
    }
    draw_cap(rng, triple_code(i as u64, 2, round) + m)
}

fn draw_bounded(
    sigma: &mut OmegaString,
    big_g: &GrowthFn,
    choices: &mut Vec<ChoiceRecord>,
    rng: &mut impl Rng,
) -> Result<(), DncError> {
    let k = sigma.len() as u64;
    let bound = big_g.eval(k)?;
    let v = rng.gen_biguint_below(&bound);
    choices.push(ChoiceRecord {
        depth: k,
        bound,
        index: v.clone(),
        value: v.clone(),
        restriction: None,
    });
    *sigma = sigma.child(v);
    Ok(())
}

/// `(2^shift) · g`, tabulated.
fn shift_table(g: &GrowthFn, shift: u64, i_max: u64) -> Result<GrowthFn, DncError> {
    if shift > bushy_core::MAX_SHIFT_BITS {
        return Err(DncError::BadConfig("assumption scale too large".into()));
    }
    let values = (0..=i_max)
        .map(|u| g.eval(u).map(|v| v << shift))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GrowthFn::table(values))
}
