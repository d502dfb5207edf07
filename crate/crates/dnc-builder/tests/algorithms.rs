//! End-to-end behaviour of both builders on crafted rosters, with audits.

use dnc_builder::*;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toy_computation::{Functional, Instr, ToyEnumeration, ToyProgram};

fn scaled_family(depth: u64) -> GrowthFamily {
    GrowthFamily::build(3, FamilyMode::Scaled { exponent_cap: 0 }, depth + 2, depth + 4, None)
        .unwrap()
}

fn always_fire(len: u64) -> Functional {
    Functional::TriggerZeros { level: 0, modulus: 1, len }
}

#[test]
fn partial_roster_builds_diagonal_avoiders() {
    let depth = 12u64;
    let family = scaled_family(depth);
    let roster = vec![BoundedRequirement { gamma: Functional::EverywherePartial, d: 0 }];
    let config = BoundedRunConfig { depth, loop_budget: 200, ..Default::default() };
    let enumeration = ToyEnumeration::shipped();

    let trials = 300u64;
    let mut dnc = 0u64;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap();
        assert!(!trace.is_stuck());
        assert_eq!(trace.requirements[0].status, ReqFinalStatus::Holding);
        assert_eq!(trace.final_sigma.len() as u64, depth);
        let report = audit_trace(&trace, &enumeration, &[roster[0].gamma.clone()], 4_000);
        assert!(report.structurally_valid());
        assert!(report.draw_floor_ok);
        assert!(report.requirement_satisfied[0]);
        if report.dnc_prefix {
            dnc += 1;
        }
    }
    // the exact truncated avoidance product for one forbidden value per level
    let bound = bushy_core::avoidance_lower_bound(
        &bushy_core::GrowthFn::constant(1u32),
        &family.h_fn(),
        depth,
    )
    .unwrap();
    let b: f64 = bound.numer().to_string().parse::<f64>().unwrap()
        / bound.denom().to_string().parse::<f64>().unwrap();
    let sigma = (b * (1.0 - b) / trials as f64).sqrt();
    let freq = dnc as f64 / trials as f64;
    assert!(
        freq >= b - 3.0 * sigma,
        "dnc frequency {freq} below {b} − 3σ ({sigma})"
    );
}

#[test]
fn unit_cap_trigger_restricts_and_satisfies() {
    let depth = 8u64;
    let family = scaled_family(depth);
    let roster = vec![BoundedRequirement { gamma: always_fire(256), d: 0 }];
    let config = BoundedRunConfig {
        depth,
        loop_budget: 200,
        cap_overrides: Some(vec![1]),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trace = run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap();

    assert!(trace.satisfied_by_restriction(0), "{:?}", trace.requirements[0].status);
    assert_eq!(trace.rho_records.len(), 1);
    let rho = &trace.rho_records[0];
    assert_eq!(rho.rho.len(), 256);
    assert!(rho.rho.bits().iter().all(|&b| !b));
    assert_eq!(rho.target_len, BigUint::from(256u32));
    assert!(trace.events.iter().any(|e| matches!(e, TraceEvent::ActiveWait { .. })));
    assert!(trace.events.iter().any(|e| matches!(e, TraceEvent::Satisfied { .. })));

    let enumeration = ToyEnumeration::shipped();
    let report = audit_trace(&trace, &enumeration, &[roster[0].gamma.clone()], 4_000);
    assert!(report.witnesses_valid && report.draws_valid && report.discipline_ok);
    assert!(report.requirement_satisfied[0]);
    assert_eq!(report.rho_margins.len(), 1);
    // 256 zeros compress on the shipped machine
    assert!(report.rho_margins[0].excess < 0);
}

#[test]
fn late_switch_aims_past_the_emitter_and_sticks() {
    // two refutations: by the second one the string has grown, so the
    // active target is the next threshold up, which the emitter can never
    // reach
    let depth = 8u64;
    let family = scaled_family(depth);
    let roster = vec![
        BoundedRequirement { gamma: always_fire(256), d: 0 },
        BoundedRequirement { gamma: Functional::EverywherePartial, d: 0 },
    ];
    let config = BoundedRunConfig {
        depth,
        loop_budget: 120,
        cap_overrides: Some(vec![2, 1]),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trace = run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap();
    assert_eq!(trace.stuck.map(|(i, _)| i), Some(0));
    assert_eq!(trace.requirements[0].status, ReqFinalStatus::Stuck);
    assert!(trace
        .events
        .iter()
        .any(|e| matches!(e, TraceEvent::Stuck { requirement: 0, .. })));
}

#[test]
fn replay_determinism() {
    let depth = 10u64;
    let family = scaled_family(depth);
    let roster = vec![
        BoundedRequirement { gamma: always_fire(256), d: 0 },
        BoundedRequirement { gamma: Functional::EverywherePartial, d: 0 },
    ];
    let config = BoundedRunConfig { depth, loop_budget: 200, ..Default::default() };
    let run = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        serde_json::to_string(&run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap())
            .unwrap()
    };
    assert_eq!(run(42), run(42));
    assert_ne!(run(42), run(43));
}

#[test]
fn trace_jsonl_round_trip() {
    let depth = 8u64;
    let family = scaled_family(depth);
    let roster = vec![BoundedRequirement { gamma: always_fire(256), d: 0 }];
    let config = BoundedRunConfig {
        depth,
        loop_budget: 120,
        cap_overrides: Some(vec![1]),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trace = run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap();
    let text = trace.to_jsonl();
    let back = RunTrace::from_jsonl(&text).unwrap();
    assert_eq!(text, back.to_jsonl());
}

#[test]
fn undefined_phi_satisfies_vacuously() {
    let looper = ToyProgram::new(vec![Instr::Jmp(0)]);
    let roster = vec![UnboundedRequirement {
        gamma: Functional::CopyParity,
        phi: PhiRef::Inline { program: looper },
        d: 0,
    }];
    let config = UnboundedRunConfig { depth: 6, loop_budget: 100, ..Default::default() };
    let enumeration = ToyEnumeration::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trace = run_unbounded_dnc(&roster, &enumeration, 3, &config, &mut rng).unwrap();
    assert!(!trace.is_stuck());
    assert_eq!(trace.requirements[0].status, ReqFinalStatus::Holding);
    assert!(matches!(
        trace.requirements[0].final_assumption,
        Some(AssumptionDesc::PhiUndefined { .. })
    ));
    let report = audit_trace(&trace, &enumeration, &[roster[0].gamma.clone()], 2_000);
    assert!(report.requirement_satisfied[0]);
    assert!(report.structurally_valid());
}

/// φ(n) = 5 for n ≤ threshold, undefined above it.
fn phi_below(threshold: u64) -> ToyProgram {
    ToyProgram::new(vec![
        Instr::Push(0),
        Instr::Input,
        Instr::Push(threshold + 1),
        Instr::Lt,
        Instr::Jz(7),
        Instr::Push(5),
        Instr::Halt,
        Instr::Jmp(7),
    ])
}

#[test]
fn three_branch_adversary_walks_every_branch() {
    let total16 = ToyProgram::new(vec![Instr::Push(16), Instr::Halt]);
    let looper = ToyProgram::new(vec![Instr::Jmp(0)]);
    let roster = vec![
        UnboundedRequirement {
            gamma: always_fire(16),
            phi: PhiRef::Inline { program: total16 },
            d: 0,
        },
        UnboundedRequirement {
            gamma: Functional::EverywherePartial,
            phi: PhiRef::Inline { program: looper },
            d: 0,
        },
    ];
    let config = UnboundedRunConfig {
        depth: 10,
        loop_budget: 300,
        outer_cap_overrides: Some(vec![2, 8]),
        inner_cap_overrides: Some(vec![vec![2, 1], vec![]]),
        ..Default::default()
    };
    let enumeration = ToyEnumeration::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trace = run_unbounded_dnc(&roster, &enumeration, 3, &config, &mut rng).unwrap();

    assert!(!trace.is_stuck());
    assert!(trace.satisfied_by_restriction(0));

    let branch_hit = |b: Branch| {
        trace.events.iter().any(|e| matches!(e, TraceEvent::Assume { branch, requirement: 0, .. } if *branch == b))
    };
    assert!(branch_hit(Branch::FirstAttention), "(a) missing");
    assert!(branch_hit(Branch::Reassumed), "(b.2.i) missing");
    assert!(branch_hit(Branch::SmallnessAfterWait), "(b.2.ii) missing");
    assert!(branch_hit(Branch::RoundRestart), "(b.3.i) missing");
    assert!(
        trace.events.iter().any(|e| matches!(
            e,
            TraceEvent::ActiveWait { requirement: 0, .. }
        )),
        "(b.3.ii) missing"
    );
    assert_eq!(trace.rho_records.len(), 1);
    assert_eq!(trace.rho_records[0].rho.len(), 16);

    let gammas: Vec<Functional> = roster.iter().map(|r| r.gamma.clone()).collect();
    let report = audit_trace(&trace, &enumeration, &gammas, 2_000);
    assert!(report.structurally_valid(), "{report:?}");
    assert!(report.draw_floor_ok);
    assert!(report.requirement_satisfied.iter().all(|&s| s));

    // deterministic: same seed, same trace
    let mut rng2 = ChaCha8Rng::seed_from_u64(1);
    let again = run_unbounded_dnc(&roster, &enumeration, 3, &config, &mut rng2).unwrap();
    assert_eq!(
        serde_json::to_string(&trace).unwrap(),
        serde_json::to_string(&again).unwrap()
    );
}

#[test]
fn phi_that_turns_off_strands_the_wait() {
    // fix the threshold so the first divergence assumption is refutable but
    // the wait's recomputed argument (longer context) diverges
    let looper = ToyProgram::new(vec![Instr::Jmp(0)]);
    let partial_req = UnboundedRequirement {
        gamma: Functional::EverywherePartial,
        phi: PhiRef::Inline { program: looper },
        d: 0,
    };
    let mut threshold = 1_000u64;
    let adversary = loop {
        let candidate = UnboundedRequirement {
            gamma: always_fire(16),
            phi: PhiRef::Inline { program: phi_below(threshold) },
            d: 0,
        };
        let r0 = context_bits(
            &bushy_core::OmegaString::root(),
            &candidate.gamma,
            &candidate.phi,
            0,
            &[],
        );
        if r0 == threshold {
            break candidate;
        }
        threshold = r0;
    };
    let roster = vec![adversary, partial_req];
    let config = UnboundedRunConfig {
        depth: 10,
        loop_budget: 150,
        outer_cap_overrides: Some(vec![4, 8]),
        inner_cap_overrides: Some(vec![vec![1], vec![]]),
        ..Default::default()
    };
    let enumeration = ToyEnumeration::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let trace = run_unbounded_dnc(&roster, &enumeration, 3, &config, &mut rng).unwrap();
    assert_eq!(trace.stuck.map(|(i, _)| i), Some(0), "events: {:?}", trace.events);
    assert!(trace
        .events
        .iter()
        .any(|e| matches!(e, TraceEvent::PhiWait { requirement: 0, .. })));
}

#[test]
fn inner_scale_raises_the_output_cutoff() {
    // with a doubling inner scale the stage-2 cutoff becomes h0(h(1)) = 512
    let depth = 8u64;
    let h0 = bushy_core::GrowthFn::linear(2u32, 0u32);
    let family = GrowthFamily::build(
        3,
        FamilyMode::Scaled { exponent_cap: 0 },
        depth + 2,
        depth + 4,
        Some(h0),
    )
    .unwrap();
    let roster = vec![BoundedRequirement { gamma: always_fire(512), d: 0 }];
    let config = BoundedRunConfig {
        depth,
        loop_budget: 200,
        cap_overrides: Some(vec![1]),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let trace = run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap();
    assert!(trace.satisfied_by_restriction(0), "{:?}", trace.requirements[0].status);
    assert_eq!(trace.rho_records[0].rho.len(), 512);
}

#[test]
fn corrupted_traces_are_flagged() {
    let depth = 8u64;
    let family = scaled_family(depth);
    let roster = vec![BoundedRequirement { gamma: always_fire(256), d: 0 }];
    let config = BoundedRunConfig {
        depth,
        loop_budget: 120,
        cap_overrides: Some(vec![1]),
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trace = run_bounded_dnc(&family, &roster, &config, &mut rng).unwrap();
    let enumeration = ToyEnumeration::shipped();
    let gammas = [roster[0].gamma.clone()];

    let clean = audit_trace(&trace, &enumeration, &gammas, 2_000);
    assert!(clean.draws_valid && clean.witnesses_valid);

    // a drawn value at or above its recorded bound
    let mut tampered = trace.clone();
    tampered.choices[0].index = tampered.choices[0].bound.clone();
    let report = audit_trace(&tampered, &enumeration, &gammas, 2_000);
    assert!(!report.draws_valid);

    // a witness whose leaves left the recorded cone
    let mut tampered = trace.clone();
    tampered.rho_records[0].rho = toy_computation::BitStr::repeat(true, 256);
    let report = audit_trace(&tampered, &enumeration, &gammas, 2_000);
    assert!(!report.witnesses_valid);
}
