//! Experiment specifications and their runners. Trials are independently
//! seeded (counter-mode from the base seed) and dispatched across a worker
//! pool; aggregation is order-independent, so reports are identical
//! whatever the worker count.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use bushy_core::{
    avoidance_lower_bound, max_small_closed_set, random_walk, FiniteSet, GrowthFn,
};
use dnc_builder::{
    audit_trace_with, requirement_threshold, run_bounded_dnc, run_unbounded_dnc, Branch,
    BoundedRequirement, BoundedRunConfig, FamilyMode, GrowthFamily, PhiRef,
    TraceEvent, UnboundedRequirement, UnboundedRunConfig,
};
use fireworks_engine::trap::{check_flip, family_refs, trap_family, FlipOutcome};
use fireworks_engine::{
    draw_plan, run as run_fireworks, stuck_bound, FireworksConfig, RoundRobin, StringPoset,
};
use toy_computation::{
    measured_description_constant, BDncSet, Functional, Instr, PrefixFreeMachine,
    ToyEnumeration, ToyProgram,
};

use crate::lemmas::{run_lemma_suite, LemmaConfig};
use crate::report::{BoundCheck, BoundDirection, StatsReport};
use crate::seed::trial_seed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration error: {0}")]
    Dnc(#[from] dnc_builder::DncError),

    #[error("configuration error: {0}")]
    Bushy(#[from] bushy_core::BushyError),
}

/// Walk-avoidance experiment: seeded walks against the densest closed small
/// set, measured against the exact truncated product.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkConfig {
    pub g: GrowthFn,
    pub h: GrowthFn,
    pub depth: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            g: GrowthFn::constant(2u32),
            h: GrowthFn::pow2_plus(4),
            depth: 3,
        }
    }
}

/// Trap-family forcing experiment with cap-flip replays on stuck runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Caps are drawn from `[1, 2^(i+offset)]`.
    pub cap_offset: u64,
    pub requirements: usize,
    pub movers: usize,
    pub global_budget: u64,
    /// How many leading seeds get the one-bad-cap replay treatment.
    pub flip_seeds: u64,
}

impl Default for TrapConfig {
    fn default() -> Self {
        TrapConfig {
            cap_offset: 3,
            requirements: 20,
            movers: 4,
            global_budget: 2_000,
            flip_seeds: 100,
        }
    }
}

/// Bounded-builder experiment measured against the three claim bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DncBoundedConfig {
    pub m: u64,
    pub mode: FamilyMode,
    pub run: BoundedRunConfig,
    pub roster: Vec<BoundedRequirement>,
    /// Budget for the post-hoc audit (diagonal + margins).
    pub k_budget: u64,
    pub enum_code_bits: u64,
    /// Complexity margins are computed for this many leading trials.
    pub margin_samples: u64,
}

impl Default for DncBoundedConfig {
    fn default() -> Self {
        DncBoundedConfig {
            m: 3,
            mode: FamilyMode::Scaled { exponent_cap: 0 },
            run: BoundedRunConfig::default(),
            roster: default_bounded_roster(),
            k_budget: 4_000,
            enum_code_bits: toy_computation::DEFAULT_ENUM_CODE_BITS,
            margin_samples: 32,
        }
    }
}

/// The adversarial roster the bounded experiment ships: a short-description
/// long-output emitter (restricts or sticks depending on its cap), partial
/// functionals, and a sparse trigger whose cone the walk can wander into.
pub fn default_bounded_roster() -> Vec<BoundedRequirement> {
    vec![
        BoundedRequirement {
            gamma: Functional::TriggerZeros { level: 0, modulus: 1, len: 256 },
            d: 0,
        },
        BoundedRequirement { gamma: Functional::EverywherePartial, d: 0 },
        BoundedRequirement {
            gamma: Functional::TriggerZeros { level: 2, modulus: 2, len: 256 },
            d: 0,
        },
        BoundedRequirement { gamma: Functional::EverywherePartial, d: 0 },
    ]
}

/// Unbounded-builder experiment: the staged three-branch adversary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DncUnboundedConfig {
    pub m: u64,
    pub run: UnboundedRunConfig,
    pub roster: Vec<UnboundedRequirement>,
    pub k_budget: u64,
    pub enum_code_bits: u64,
}

impl Default for DncUnboundedConfig {
    fn default() -> Self {
        let total16 = ToyProgram::new(vec![Instr::Push(16), Instr::Halt]);
        let looper = ToyProgram::new(vec![Instr::Jmp(0)]);
        DncUnboundedConfig {
            m: 3,
            run: UnboundedRunConfig {
                depth: 10,
                loop_budget: 300,
                outer_cap_overrides: Some(vec![2, 8]),
                inner_cap_overrides: Some(vec![vec![2, 1], vec![]]),
                ..Default::default()
            },
            roster: vec![
                UnboundedRequirement {
                    gamma: Functional::TriggerZeros { level: 0, modulus: 1, len: 16 },
                    phi: PhiRef::Inline { program: total16 },
                    d: 0,
                },
                UnboundedRequirement {
                    gamma: Functional::EverywherePartial,
                    phi: PhiRef::Inline { program: looper },
                    d: 0,
                },
            ],
            k_budget: 2_000,
            enum_code_bits: toy_computation::DEFAULT_ENUM_CODE_BITS,
        }
    }
}

/// Family construction and inequality audit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyAuditConfig {
    pub m: u64,
    pub mode: FamilyMode,
    pub k_max: u64,
    pub i_max: u64,
    pub h0: Option<GrowthFn>,
}

impl Default for FamilyAuditConfig {
    fn default() -> Self {
        FamilyAuditConfig { m: 3, mode: FamilyMode::Exact, k_max: 2, i_max: 4, h0: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentKind {
    WalkBound(WalkConfig),
    FireworksTrap(TrapConfig),
    DncBounded(Box<DncBoundedConfig>),
    DncUnbounded(Box<DncUnboundedConfig>),
    FamilyAudit(FamilyAuditConfig),
    LemmaSuite(LemmaConfig),
}

/// A complete experiment: kind-specific payload plus the batch parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(flatten)]
    pub kind: ExperimentKind,
    pub trials: u64,
    pub seed: u64,
    /// Confidence multiplier on the normal-approximation sigma.
    pub sigmas: f64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, trials: u64, seed: u64) -> Self {
        ExperimentSpec { kind, trials, seed, sigmas: 3.0 }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ExperimentKind::WalkBound(_) => "walk-bound",
            ExperimentKind::FireworksTrap(_) => "fireworks-trap",
            ExperimentKind::DncBounded(_) => "dnc-bounded",
            ExperimentKind::DncUnbounded(_) => "dnc-unbounded",
            ExperimentKind::FamilyAudit(_) => "family-audit",
            ExperimentKind::LemmaSuite(_) => "lemma-suite",
        }
    }
}

/// Execute the experiment: independent seeded trials, exact bounds, one
/// report.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<StatsReport, HarnessError> {
    let start = Instant::now();
    let mut report = match &spec.kind {
        ExperimentKind::WalkBound(c) => walk_experiment(spec, c)?,
        ExperimentKind::FireworksTrap(c) => fireworks_experiment(spec, c)?,
        ExperimentKind::DncBounded(c) => dnc_bounded_experiment(spec, c)?,
        ExperimentKind::DncUnbounded(c) => dnc_unbounded_experiment(spec, c)?,
        ExperimentKind::FamilyAudit(c) => family_experiment(spec, c)?,
        ExperimentKind::LemmaSuite(c) => lemma_experiment(spec, c)?,
    };
    report.wall_clock_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn walk_experiment(
    spec: &ExperimentSpec,
    config: &WalkConfig,
) -> Result<StatsReport, HarnessError> {
    let bound = avoidance_lower_bound(&config.g, &config.h, config.depth)?;
    let planted = FiniteSet(max_small_closed_set(&config.g, &config.h, config.depth)?);
    let planted_size = planted.0.len();

    let avoided = (0..spec.trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, t));
            let walk = random_walk(&config.h, &planted, config.depth, &[], &mut rng)
                .expect("validated widths");
            !walk.hit_set
        })
        .count() as u64;

    let check = BoundCheck::new(
        "avoidance",
        avoided,
        spec.trials,
        &bound,
        BoundDirection::AtLeast,
        spec.sigmas,
    );
    Ok(StatsReport::from_checks(
        spec.kind_name(),
        vec![check],
        true,
        serde_json::json!({ "planted_size": planted_size, "depth": config.depth }),
        0,
    ))
}

fn fireworks_experiment(
    spec: &ExperimentSpec,
    config: &TrapConfig,
) -> Result<StatsReport, HarnessError> {
    if config.movers >= config.requirements {
        return Err(HarnessError::Config(
            "movers must leave room for traps".into(),
        ));
    }
    let n_fn = GrowthFn::pow2_plus(config.cap_offset);
    let bound = stuck_bound(&n_fn, config.requirements)?;

    let run_one = |seed: u64, cap_flip: Option<(usize, num_bigint::BigUint)>| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut plan = draw_plan(&n_fn, config.requirements, &mut rng).expect("caps");
        if let Some((i, cap)) = cap_flip {
            plan = plan.with_cap(i, cap);
        }
        let poset = StringPoset;
        let family = trap_family(config.requirements, config.movers);
        let refs = family_refs(&family);
        let mut sched = RoundRobin::new(config.requirements);
        let out = run_fireworks(
            &poset,
            &refs,
            &plan,
            &mut sched,
            &FireworksConfig { global_budget: config.global_budget },
        );
        (out, plan)
    };

    let stuck_flags: Vec<bool> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_one(trial_seed(spec.seed, t), None).0.is_stuck())
        .collect();
    let stuck_runs = stuck_flags.iter().filter(|&&s| s).count() as u64;

    // one-bad-cap replays on the leading seeds
    let mut flips_checked = 0u64;
    let mut flip_violations: Vec<String> = Vec::new();
    let mut interference = 0u64;
    let mut stuck_seen = 0u64;
    for t in 0..config.flip_seeds.min(spec.trials) {
        let seed = trial_seed(spec.seed, t);
        let (out, plan) = run_one(seed, None);
        let Some(info) = out.stuck else { continue };
        stuck_seen += 1;
        let i = info.requirement;
        let bad = plan.cap(i).clone();
        let mut smaller = num_bigint::BigUint::one();
        while smaller < bad {
            let (replay, _) = run_one(seed, Some((i, smaller.clone())));
            match check_flip(&replay, i, true) {
                FlipOutcome::Violated { detail } => {
                    flip_violations.push(format!("seed {t}: {detail}"))
                }
                FlipOutcome::Interfered { .. } => interference += 1,
                FlipOutcome::AsPredicted => {}
            }
            flips_checked += 1;
            smaller += 1u32;
        }
        for bump in 1u32..=3 {
            let (replay, _) = run_one(seed, Some((i, bad.clone() + bump)));
            match check_flip(&replay, i, false) {
                FlipOutcome::Violated { detail } => {
                    flip_violations.push(format!("seed {t}: {detail}"))
                }
                FlipOutcome::Interfered { .. } => interference += 1,
                FlipOutcome::AsPredicted => {}
            }
            flips_checked += 1;
        }
    }

    let check = BoundCheck::new(
        "stuck",
        stuck_runs,
        spec.trials,
        &bound,
        BoundDirection::AtMost,
        spec.sigmas,
    );
    let flips_ok = flip_violations.is_empty();
    Ok(StatsReport::from_checks(
        spec.kind_name(),
        vec![check],
        flips_ok,
        serde_json::json!({
            "stuck_runs": stuck_runs,
            "flip_seeds": config.flip_seeds,
            "flip_stuck_seen": stuck_seen,
            "flips_checked": flips_checked,
            "flip_interference": interference,
            "flip_violations": flip_violations,
        }),
        0,
    ))
}

struct DncTrialOutcome {
    stuck: bool,
    dnc: bool,
    all_satisfied: bool,
    structurally_valid: bool,
    floor_ok: bool,
    hits: usize,
    margins: Vec<i64>,
}

fn dnc_bounded_experiment(
    spec: &ExperimentSpec,
    config: &DncBoundedConfig,
) -> Result<StatsReport, HarnessError> {
    let depth = config.run.depth;
    let family = GrowthFamily::build(
        config.m,
        config.mode,
        depth + 2,
        depth + 2 + config.run.depth_margin,
        None,
    )?;
    let enumeration = ToyEnumeration::standard(config.enum_code_bits);
    let diag = BDncSet::new(&enumeration, config.k_budget);
    let machine = PrefixFreeMachine::standard();
    let gammas: Vec<Functional> = config.roster.iter().map(|r| r.gamma.clone()).collect();

    let outcomes: Vec<DncTrialOutcome> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, t));
            let trace = run_bounded_dnc(&family, &config.roster, &config.run, &mut rng)
                .expect("validated config");
            let with_margins = t < config.margin_samples;
            let report = audit_trace_with(
                &trace,
                &diag,
                with_margins.then_some(&machine),
                &gammas,
                config.k_budget,
            );
            DncTrialOutcome {
                stuck: trace.is_stuck(),
                dnc: report.dnc_prefix,
                all_satisfied: report.all_satisfied(),
                structurally_valid: report.structurally_valid(),
                floor_ok: report.draw_floor_ok,
                hits: report.true_assumption_hits,
                margins: report.rho_margins.iter().map(|m| m.excess).collect(),
            }
        })
        .collect();

    let trials = spec.trials;
    let stuck_runs = outcomes.iter().filter(|o| o.stuck).count() as u64;
    let dnc_runs = outcomes.iter().filter(|o| o.dnc).count() as u64;
    let non_stuck = trials - stuck_runs;
    let satisfied_non_stuck =
        outcomes.iter().filter(|o| !o.stuck && o.all_satisfied).count() as u64;
    let all_valid = outcomes.iter().all(|o| o.structurally_valid && o.floor_ok);
    let total_hits: usize = outcomes.iter().map(|o| o.hits).sum();
    let sample_margins: Vec<i64> = outcomes
        .iter()
        .take(config.margin_samples as usize)
        .flat_map(|o| o.margins.iter().copied())
        .collect();

    let m = config.m;
    let one = BigRational::one();
    let pow = |e: u64| BigRational::new(BigInt::one(), BigInt::from(1u64) << e);
    // stuck ≤ 2^{-m+1}; dnc ≥ 1 − 2^{-m+1}; satisfied | non-stuck ≥ 1 − 2^{-m+2}
    let checks = vec![
        BoundCheck::new(
            "dnc-prefix",
            dnc_runs,
            trials,
            &(one.clone() - pow(m - 1)),
            BoundDirection::AtLeast,
            spec.sigmas,
        ),
        BoundCheck::new("stuck", stuck_runs, trials, &pow(m - 1), BoundDirection::AtMost, spec.sigmas),
        BoundCheck::new(
            "satisfied-non-stuck",
            satisfied_non_stuck,
            non_stuck,
            &(one - pow(m - 2)),
            BoundDirection::AtLeast,
            spec.sigmas,
        ),
    ];

    Ok(StatsReport::from_checks(
        spec.kind_name(),
        checks,
        all_valid,
        serde_json::json!({
            "m": m,
            "depth": depth,
            "roster": config.roster.iter().map(|r| r.gamma.label()).collect::<Vec<_>>(),
            "audits_structurally_valid": all_valid,
            "true_assumption_hits": total_hits,
            "sample_rho_margins": sample_margins,
        }),
        0,
    ))
}

fn dnc_unbounded_experiment(
    spec: &ExperimentSpec,
    config: &DncUnboundedConfig,
) -> Result<StatsReport, HarnessError> {
    let enumeration = ToyEnumeration::standard(config.enum_code_bits);
    let diag = BDncSet::new(&enumeration, config.k_budget);
    let machine = PrefixFreeMachine::standard();
    let gammas: Vec<Functional> = config.roster.iter().map(|r| r.gamma.clone()).collect();

    let required = [
        Branch::FirstAttention,
        Branch::Reassumed,
        Branch::SmallnessAfterWait,
        Branch::RoundRestart,
    ];

    let results: Vec<(bool, bool, Vec<String>)> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, t));
            let trace = run_unbounded_dnc(
                &config.roster,
                &enumeration,
                config.m,
                &config.run,
                &mut rng,
            )
            .expect("validated config");
            let report =
                audit_trace_with(&trace, &diag, Some(&machine), &gammas, config.k_budget);
            let mut missing = Vec::new();
            for b in required {
                let hit = trace.events.iter().any(
                    |e| matches!(e, TraceEvent::Assume { branch, .. } if *branch == b),
                );
                if !hit {
                    missing.push(format!("{b:?}"));
                }
            }
            if !trace
                .events
                .iter()
                .any(|e| matches!(e, TraceEvent::ActiveWait { .. }))
            {
                missing.push("ActiveSearch".into());
            }
            let covered = missing.is_empty() && !trace.is_stuck();
            let valid = report.structurally_valid() && report.all_satisfied();
            (covered, valid, missing)
        })
        .collect();

    let covered = results.iter().filter(|(c, _, _)| *c).count() as u64;
    let valid = results.iter().filter(|(_, v, _)| *v).count() as u64;
    let missing: Vec<String> = results
        .iter()
        .flat_map(|(_, _, m)| m.iter().cloned())
        .collect();

    let one = BigRational::one();
    let checks = vec![
        BoundCheck::new("branch-coverage", covered, spec.trials, &one, BoundDirection::AtLeast, 0.0),
        BoundCheck::new("audit-valid", valid, spec.trials, &one, BoundDirection::AtLeast, 0.0),
    ];
    Ok(StatsReport::from_checks(
        spec.kind_name(),
        checks,
        true,
        serde_json::json!({ "missing_branches": missing }),
        0,
    ))
}

fn family_experiment(
    spec: &ExperimentSpec,
    config: &FamilyAuditConfig,
) -> Result<StatsReport, HarnessError> {
    let family = GrowthFamily::build(
        config.m,
        config.mode,
        config.k_max,
        config.i_max,
        config.h0.clone(),
    )?;
    let c_machine = measured_description_constant(1 << 16);

    let as_check = |name: &str, ok: bool| {
        BoundCheck::new(name, ok as u64, 1, &BigRational::one(), BoundDirection::AtLeast, 0.0)
    };
    let restriction = family.restriction_safety_holds();
    let floor = family.draw_floor_holds();
    let floor2 = family.floor_two_to_n_plus_m_holds();

    // eventually decreasing: strictly decreasing after the first drop
    let mut decreasing = true;
    if config.k_max >= 2 {
        let mut prev = requirement_threshold(&family, 1, 64, c_machine);
        let mut dropped = false;
        for k in 2..=config.k_max {
            let here = requirement_threshold(&family, k, 64, c_machine);
            if here < prev {
                dropped = true;
            } else if dropped {
                decreasing = false;
            }
            prev = here;
        }
        if !dropped {
            decreasing = false;
        }
    }

    let table: Vec<serde_json::Value> = (0..=config.k_max)
        .map(|k| {
            let h = family.h(k);
            serde_json::json!({
                "k": k,
                "h_bits": h.bits(),
                "h": abbreviate(&h.to_string()),
                "g_row": (0..=config.i_max.min(6))
                    .map(|i| abbreviate(&family.g(k, i).to_string()))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();

    let checks = vec![
        as_check("restriction-safety", restriction),
        as_check("draw-floor", floor),
        as_check("floor-2^(n+m)", floor2),
        as_check("threshold-eventually-decreasing", decreasing),
    ];
    Ok(StatsReport::from_checks(
        spec.kind_name(),
        checks,
        true,
        serde_json::json!({
            "m": config.m,
            "mode": config.mode,
            "c_machine": c_machine,
            "table": table,
        }),
        0,
    ))
}

fn lemma_experiment(
    spec: &ExperimentSpec,
    config: &LemmaConfig,
) -> Result<StatsReport, HarnessError> {
    if config.width_cap == 0 || config.width_cap > 3 || config.depth_cap == 0 || config.depth_cap > 4
    {
        return Err(HarnessError::Config(
            "lemma suite runs with width_cap in 1..=3 and depth_cap in 1..=4".into(),
        ));
    }
    let outcome = run_lemma_suite(spec.trials, spec.seed, config);
    let ok = spec.trials - outcome.failures.len().min(spec.trials as usize) as u64;
    let check = BoundCheck::new(
        "zero-failures",
        ok,
        spec.trials,
        &BigRational::one(),
        BoundDirection::AtLeast,
        0.0,
    );
    Ok(StatsReport::from_checks(
        spec.kind_name(),
        vec![check],
        outcome.passed(),
        serde_json::to_value(&outcome).expect("serializable"),
        0,
    ))
}

fn abbreviate(s: &str) -> String {
    if s.len() <= 40 {
        s.to_string()
    } else {
        format!("{}…({} digits)", &s[..24], s.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_with_zero_badness_always_avoids() {
        let spec = ExperimentSpec::new(
            ExperimentKind::WalkBound(WalkConfig {
                g: GrowthFn::constant(0u32),
                h: GrowthFn::pow2_plus(2),
                depth: 4,
            }),
            500,
            1,
        );
        let report = run_experiment(&spec).unwrap();
        assert!(report.passed());
        assert_eq!(report.frequency, 1.0);
        assert_eq!(report.bound, "1/1");
    }

    #[test]
    fn reports_are_deterministic_modulo_wall_clock() {
        let spec = ExperimentSpec::new(
            ExperimentKind::WalkBound(WalkConfig::default()),
            2_000,
            9,
        );
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        assert_eq!(a.canonical_bytes(), b.canonical_bytes());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = ExperimentSpec::new(
            ExperimentKind::DncBounded(Box::default()),
            10,
            3,
        );
        let text = serde_json::to_string(&spec).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.kind_name(), "dnc-bounded");
        assert_eq!(back.trials, 10);
    }
}
