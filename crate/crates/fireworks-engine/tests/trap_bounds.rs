//! Measured behaviour of the shipped trap family against the exact failure
//! budget, plus replayed cap flips on stuck runs.

use bushy_core::{GrowthFn, OmegaString};
use fireworks_engine::trap::{check_flip, family_refs, trap_family, FlipOutcome};
use fireworks_engine::*;
use num_bigint::BigUint;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const REQS: usize = 20;
const MOVERS: usize = 4;

fn run_trap(plan: &FireworksPlan, budget: u64) -> FireworksOutcome<OmegaString> {
    let poset = StringPoset;
    let family = trap_family(REQS, MOVERS);
    let refs = family_refs(&family);
    let mut sched = RoundRobin::new(REQS);
    run(&poset, &refs, plan, &mut sched, &FireworksConfig { global_budget: budget })
}

#[test]
fn stuck_frequency_respects_the_exact_budget() {
    let n_fn = GrowthFn::pow2_plus(3);
    let trials = 2_000u64;
    let mut stuck_runs = 0u64;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plan = draw_plan(&n_fn, REQS, &mut rng).unwrap();
        if run_trap(&plan, 2_000).is_stuck() {
            stuck_runs += 1;
        }
    }
    let bound: f64 = {
        let b = stuck_bound(&n_fn, REQS).unwrap();
        let n: f64 = b.numer().to_string().parse().unwrap();
        let d: f64 = b.denom().to_string().parse().unwrap();
        n / d
    };
    let freq = stuck_runs as f64 / trials as f64;
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    assert!(
        freq <= bound + 3.0 * sigma,
        "stuck {freq} exceeds {bound} + 3σ"
    );
    // the trap is live: some runs must actually get stuck
    assert!(stuck_runs > 0, "trap family never strands anyone");
}

#[test]
fn stuck_runs_flip_as_predicted() {
    let n_fn = GrowthFn::pow2_plus(3);
    let mut checked = 0u64;
    for seed in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plan = draw_plan(&n_fn, REQS, &mut rng).unwrap();
        let out = run_trap(&plan, 2_000);
        let Some(info) = out.stuck else { continue };
        let i = info.requirement;
        let bad = plan.cap(i).clone();

        // every smaller cap yields an active success for this requirement
        let mut smaller = BigUint::one();
        while smaller < bad {
            let replay = run_trap(&plan.with_cap(i, smaller.clone()), 2_000);
            match check_flip(&replay, i, true) {
                FlipOutcome::Violated { detail } => panic!("seed {seed}: {detail}"),
                _ => {}
            }
            smaller += 1u32;
        }
        // a few larger caps yield passive success
        for bump in 1u32..=3 {
            let replay = run_trap(&plan.with_cap(i, bad.clone() + bump), 2_000);
            match check_flip(&replay, i, false) {
                FlipOutcome::Violated { detail } => panic!("seed {seed}: {detail}"),
                _ => {}
            }
        }
        checked += 1;
    }
    assert!(checked > 0, "no stuck runs among the probed seeds");
}
