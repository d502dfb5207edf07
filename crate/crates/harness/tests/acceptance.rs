//! The acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them), with every tolerance pinned.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dnc_builder::{
    audit_trace, requirement_threshold, run_unbounded_dnc, Branch, FamilyMode, GrowthFamily,
    TraceEvent,
};
use harness::{
    run_experiment, DncUnboundedConfig, ExperimentKind, ExperimentSpec, Verdict,
};
use toy_computation::{Functional, ToyEnumeration};

fn verdict_line(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_lemma_suite() {
    let start = Instant::now();
    let spec = ExperimentSpec::new(
        ExperimentKind::LemmaSuite(harness::lemmas::LemmaConfig { width_cap: 3, depth_cap: 4 }),
        1_000,
        7,
    );
    let report = run_experiment(&spec).unwrap();
    let elapsed = start.elapsed();
    let failures = report.details["failures"].as_array().map_or(usize::MAX, |f| f.len());
    let pass = report.verdict == Verdict::Pass && failures == 0 && elapsed.as_secs() < 10;
    verdict_line(
        "1 (lemma suite)",
        pass,
        &format!(
            "1000 instances, {} failures, agreement checks {}, {:.1}s",
            failures, report.details["agreement_checked"], elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_walk_bound() {
    let start = Instant::now();
    let spec = ExperimentSpec::new(
        ExperimentKind::WalkBound(harness::WalkConfig::default()),
        100_000,
        42,
    );
    let report = run_experiment(&spec).unwrap();
    let elapsed = start.elapsed();
    let check = &report.checks[0];
    let pass = check.passed()
        && check.bound == "3255/4096"
        && report.verdict == Verdict::Pass
        && elapsed.as_secs() < 30;
    verdict_line(
        "2 (walk bound)",
        pass,
        &format!(
            "avoidance {:.4} ≥ 3255/4096 − 3σ ({:.4}), {:.1}s",
            check.frequency,
            check.bound_value - check.margin,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_fireworks_stuck_bound() {
    let start = Instant::now();
    let spec = ExperimentSpec::new(
        ExperimentKind::FireworksTrap(harness::TrapConfig::default()),
        10_000,
        42,
    );
    let report = run_experiment(&spec).unwrap();
    let elapsed = start.elapsed();
    let check = &report.checks[0];
    // the exact partial sum stays below 1/4
    assert!(check.bound_value < 0.25, "bound {} not < 1/4", check.bound);
    let flips_ok = report.details["flip_violations"]
        .as_array()
        .map_or(false, |v| v.is_empty());
    let stuck_seen = report.details["flip_stuck_seen"].as_u64().unwrap_or(0);
    let pass = check.passed()
        && flips_ok
        && report.verdict == Verdict::Pass
        && elapsed.as_secs() < 60;
    verdict_line(
        "3 (fireworks stuck bound)",
        pass,
        &format!(
            "stuck {:.4} ≤ {} + 3σ, {} flips on {} stuck seeds, 0 violations, {:.1}s",
            check.frequency,
            check.bound,
            report.details["flips_checked"],
            stuck_seen,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_4_bounded_claims() {
    let start = Instant::now();
    let spec = ExperimentSpec::new(
        ExperimentKind::DncBounded(Box::default()),
        10_000,
        42,
    );
    let report = run_experiment(&spec).unwrap();
    let elapsed = start.elapsed();
    let by_name = |n: &str| {
        report
            .checks
            .iter()
            .find(|c| c.name == n)
            .unwrap_or_else(|| panic!("check {n} missing"))
            .clone()
    };
    let dnc = by_name("dnc-prefix");
    let stuck = by_name("stuck");
    let sat = by_name("satisfied-non-stuck");
    // the claim constants at m = 3
    assert_eq!(dnc.bound, "3/4");
    assert_eq!(stuck.bound, "1/4");
    assert_eq!(sat.bound, "1/2");
    let structurally =
        report.details["audits_structurally_valid"].as_bool().unwrap_or(false);
    let pass = dnc.passed()
        && stuck.passed()
        && sat.passed()
        && structurally
        && report.verdict == Verdict::Pass
        && elapsed.as_secs() < 300;
    verdict_line(
        "4 (bounded-builder claims, m=3, depth 24)",
        pass,
        &format!(
            "dnc {:.4} ≥ 3/4−3σ; stuck {:.4} ≤ 1/4+3σ; satisfied {:.4} ≥ 1/2−3σ; {:.1}s",
            dnc.frequency,
            stuck.frequency,
            sat.frequency,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_5_family_audits() {
    let start = Instant::now();

    // independent recurrence evaluation with plain big-integer arithmetic
    let reference = |m: u64, k_max: u64, i_max: u64| -> Vec<Vec<BigUint>> {
        let two = BigUint::from(2u32);
        let mut rows: Vec<Vec<BigUint>> = Vec::new();
        rows.push(
            (0..=i_max)
                .map(|i| two.pow((i + m) as u32))
                .collect(),
        );
        for k in 1..=k_max {
            let exponent_base = rows[(k - 1) as usize][(k - 1) as usize].clone();
            let row = (0..=i_max)
                .map(|i| {
                    if i < k {
                        BigUint::one()
                    } else {
                        let e = u32::try_from(&exponent_base).expect("small exponent")
                            + (i + m) as u32;
                        rows[(k - 1) as usize][i as usize].clone() * two.pow(e)
                    }
                })
                .collect();
            rows.push(row);
        }
        rows
    };

    let mut all_ok = true;
    let mut details = Vec::new();
    for m in 0..=4u64 {
        let family = GrowthFamily::build(m, FamilyMode::Exact, 2, 4, None).unwrap();
        let expect = reference(m, 2, 4);
        for k in 0..=2u64 {
            for i in 0..=4u64 {
                if family.g(k, i) != &expect[k as usize][i as usize] {
                    all_ok = false;
                    details.push(format!("m={m} g_{k}({i}) mismatch"));
                }
            }
        }
        if !(family.restriction_safety_holds()
            && family.draw_floor_holds()
            && family.floor_two_to_n_plus_m_holds())
        {
            all_ok = false;
            details.push(format!("m={m}: inequality audit failed"));
        }
        // thresholds decrease once they start falling
        let t1 = requirement_threshold(&family, 1, 64, 34);
        let t2 = requirement_threshold(&family, 2, 64, 34);
        if t2 >= t1 {
            all_ok = false;
            details.push(format!("m={m}: threshold not decreasing"));
        }
    }

    // the pinned value from the recurrence at m = 3
    let family = GrowthFamily::build(3, FamilyMode::Exact, 2, 4, None).unwrap();
    if family.g(1, 1) != &BigUint::from(65536u32) {
        all_ok = false;
        details.push("g_1(1) ≠ 65536 at m=3".into());
    }

    let elapsed = start.elapsed();
    let pass = all_ok && elapsed.as_secs() < 5;
    verdict_line(
        "5 (family audits, exact mode)",
        pass,
        &format!(
            "m ≤ 4, k ≤ 2 recurrences match the reference; g_1(1) = 65536 at m=3; {}; {:.2}s",
            if details.is_empty() { "all inequalities hold".to_string() } else { details.join("; ") },
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_6_unbounded_three_branch_adversary() {
    let start = Instant::now();
    let config = DncUnboundedConfig::default();
    let enumeration = ToyEnumeration::standard(config.enum_code_bits);
    let mut rng = ChaCha8Rng::seed_from_u64(harness::seed::trial_seed(42, 0));
    let trace =
        run_unbounded_dnc(&config.roster, &enumeration, config.m, &config.run, &mut rng)
            .unwrap();

    let hit = |b: Branch| {
        trace.events.iter().any(
            |e| matches!(e, TraceEvent::Assume { branch, requirement: 0, .. } if *branch == b),
        )
    };
    let active = trace
        .events
        .iter()
        .any(|e| matches!(e, TraceEvent::ActiveWait { requirement: 0, .. }));
    let branches_ok = hit(Branch::FirstAttention)
        && hit(Branch::Reassumed)
        && hit(Branch::SmallnessAfterWait)
        && hit(Branch::RoundRestart)
        && active;

    let gammas: Vec<Functional> = config.roster.iter().map(|r| r.gamma.clone()).collect();
    let report = audit_trace(&trace, &enumeration, &gammas, config.k_budget);
    let audit_ok = report.structurally_valid() && report.all_satisfied();

    // deterministic replay
    let mut rng2 = ChaCha8Rng::seed_from_u64(harness::seed::trial_seed(42, 0));
    let again =
        run_unbounded_dnc(&config.roster, &enumeration, config.m, &config.run, &mut rng2)
            .unwrap();
    let deterministic = trace.to_jsonl() == again.to_jsonl();

    let elapsed = start.elapsed();
    let pass = branches_ok && audit_ok && deterministic && elapsed.as_secs() < 10;
    verdict_line(
        "6 (unbounded three-branch adversary)",
        pass,
        &format!(
            "branches covered: {branches_ok}; audit valid: {audit_ok}; deterministic: {deterministic}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_determinism() {
    let walk = ExperimentSpec::new(
        ExperimentKind::WalkBound(harness::WalkConfig::default()),
        20_000,
        2_024,
    );
    let fireworks = ExperimentSpec::new(
        ExperimentKind::FireworksTrap(harness::TrapConfig {
            flip_seeds: 20,
            ..Default::default()
        }),
        2_000,
        2_024,
    );
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, spec) in [("walk", walk), ("fireworks", fireworks)] {
        let a = run_experiment(&spec).unwrap();
        let b = run_experiment(&spec).unwrap();
        let same = a.canonical_bytes() == b.canonical_bytes();
        detail.push(format!("{name}: byte-identical = {same}"));
        pass &= same;
    }
    verdict_line("7 (determinism)", pass, &detail.join("; "));
}
