//! The randomized lemma suite: concatenation gluing, smallness additivity,
//! closure laws, and agreement of the bigness decision with an exhaustive
//! search over all candidate witness trees.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use bushy_core::{
    closure, is_big_bounded, verify_witness, Caps, GrowthFn, OmegaString, WitnessTree,
};

use crate::seed::trial_seed;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub width_cap: u64,
    pub depth_cap: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { width_cap: 3, depth_cap: 4 }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct LemmaOutcome {
    pub instances: u64,
    pub concatenation_checked: u64,
    pub additivity_checked: u64,
    pub closure_checked: u64,
    pub agreement_checked: u64,
    pub failures: Vec<String>,
}

impl LemmaOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustive oracle: does any tree above `stem` (child subsets enumerated
/// outright, then checked by the verifier) certify that `b` is `g`-big?
/// Only tractable for stems within two levels of the depth cap.
pub fn exists_witness_exhaustive(
    b: &BTreeSet<OmegaString>,
    stem: &OmegaString,
    g: &GrowthFn,
    caps: Caps,
) -> bool {
    fn shapes(
        node: &OmegaString,
        caps: Caps,
    ) -> Vec<Vec<(OmegaString, bool)>> {
        let mut out = vec![vec![(node.clone(), true)]];
        if (node.len() as u64) < caps.depth {
            let child_shapes: Vec<Vec<Vec<(OmegaString, bool)>>> = (0..caps.width)
                .map(|c| shapes(&node.child(c), caps))
                .collect();
            let n = child_shapes.len();
            for mask in 1u32..(1 << n) {
                // cartesian product over the chosen children
                let mut acc: Vec<Vec<(OmegaString, bool)>> =
                    vec![vec![(node.clone(), false)]];
                for (idx, branch) in child_shapes.iter().enumerate() {
                    if mask >> idx & 1 == 0 {
                        continue;
                    }
                    let mut next = Vec::with_capacity(acc.len() * branch.len());
                    for partial in &acc {
                        for shape in branch {
                            let mut merged = partial.clone();
                            merged.extend(shape.iter().cloned());
                            next.push(merged);
                        }
                    }
                    acc = next;
                }
                out.extend(acc);
            }
        }
        out
    }

    // check a shape directly: leaves extending the stem in b, internal
    // nodes with enough children present
    let shape_verifies = |shape: &[(OmegaString, bool)]| -> bool {
        shape.iter().all(|(node, leaf)| {
            if *leaf {
                !stem.is_prefix_of(node) || b.contains(node)
            } else {
                let need = g
                    .eval(node.len() as u64)
                    .map(|v| v.max(num_bigint::BigUint::from(1u32)))
                    .unwrap_or_else(|_| num_bigint::BigUint::from(u64::MAX));
                let children = shape
                    .iter()
                    .filter(|(c, _)| c.len() == node.len() + 1 && node.is_prefix_of(c))
                    .count();
                num_bigint::BigUint::from(children) >= need
            }
        })
    };

    for shape in shapes(stem, caps) {
        if shape_verifies(&shape) {
            // cross-check the find through the real verifier
            let tree = WitnessTree::from_nodes(
                stem.clone(),
                shape.iter().map(|(n, _)| n.clone()),
                shape.iter().filter(|(_, l)| *l).map(|(n, _)| n.clone()),
            );
            assert!(verify_witness(&tree, b, g), "shape check out of sync");
            return true;
        }
    }
    false
}

fn random_set(
    rng: &mut ChaCha8Rng,
    config: &LemmaConfig,
    max_items: usize,
) -> BTreeSet<OmegaString> {
    let n = rng.gen_range(0..=max_items);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=config.depth_cap);
            OmegaString::from_u64s(
                &(0..len)
                    .map(|_| rng.gen_range(0..config.width_cap))
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

fn random_stem(rng: &mut ChaCha8Rng, config: &LemmaConfig, len: u64) -> OmegaString {
    OmegaString::from_u64s(
        &(0..len)
            .map(|_| rng.gen_range(0..config.width_cap))
            .collect::<Vec<_>>(),
    )
}

/// Run `instances` randomized instances of the four lemma checks. Zero
/// tolerance: any failure lands in the outcome verbatim.
pub fn run_lemma_suite(instances: u64, base_seed: u64, config: &LemmaConfig) -> LemmaOutcome {
    let caps = Caps::new(config.depth_cap, config.width_cap);
    let mut out = LemmaOutcome { instances, ..Default::default() };

    for t in 0..instances {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(base_seed, t));
        let g = GrowthFn::constant(rng.gen_range(1u32..=3));
        let b = random_set(&mut rng, config, 12);

        // concatenation: glue full-level witnesses onto a witness for b
        if let Ok(Some(tree)) = is_big_bounded(&b, &OmegaString::root(), &g, caps) {
            let extend = rng.gen_range(0..=1u64);
            let mut union = BTreeSet::new();
            let mut onto = BTreeMap::new();
            let mut ok = true;
            for leaf in tree.leaves() {
                let mut level = vec![leaf.clone()];
                for _ in 0..extend.min(config.depth_cap.saturating_sub(leaf.len() as u64)) {
                    level = level
                        .iter()
                        .flat_map(|n| (0..config.width_cap).map(|c| n.child(c)))
                        .collect();
                }
                let s_tau: BTreeSet<OmegaString> = level.into_iter().collect();
                match is_big_bounded(&s_tau, leaf, &g, caps) {
                    Ok(Some(w)) => {
                        onto.insert(leaf.clone(), w);
                        union.extend(s_tau);
                    }
                    _ => ok = false,
                }
            }
            let glued = tree.glue(&onto);
            if !(ok && verify_witness(&glued, &union, &g)) {
                out.failures
                    .push(format!("instance {t}: concatenation glue failed to verify"));
            }
            out.concatenation_checked += 1;
        }

        // additivity, contrapositive
        {
            let b1 = random_set(&mut rng, config, 8);
            let b2 = random_set(&mut rng, config, 8);
            let g1 = GrowthFn::constant(rng.gen_range(1u32..=2));
            let g2 = GrowthFn::constant(rng.gen_range(1u32..=2));
            let union: BTreeSet<OmegaString> = b1.union(&b2).cloned().collect();
            let sum = GrowthFn::sum_of(vec![g1.clone(), g2.clone()]);
            if is_big_bounded(&union, &OmegaString::root(), &sum, caps)
                .unwrap()
                .is_some()
            {
                let big1 = is_big_bounded(&b1, &OmegaString::root(), &g1, caps)
                    .unwrap()
                    .is_some();
                let big2 = is_big_bounded(&b2, &OmegaString::root(), &g2, caps)
                    .unwrap()
                    .is_some();
                if !(big1 || big2) {
                    out.failures
                        .push(format!("instance {t}: additivity contrapositive failed"));
                }
                out.additivity_checked += 1;
            }
        }

        // closure: idempotent, smallness-preserving, closed
        {
            let c1 = closure(&b, &g, caps).unwrap();
            let c2 = closure(&c1, &g, caps).unwrap();
            if c1 != c2 {
                out.failures.push(format!("instance {t}: closure not idempotent"));
            }
            for stem_len in 0..=1u64 {
                let stem = random_stem(&mut rng, config, stem_len);
                let b_big = is_big_bounded(&b, &stem, &g, caps).unwrap().is_some();
                let c_big = is_big_bounded(&c1, &stem, &g, caps).unwrap().is_some();
                if b_big != c_big {
                    out.failures.push(format!(
                        "instance {t}: closure changed bigness above {stem}"
                    ));
                }
                if c_big && !c1.contains(&stem) {
                    out.failures
                        .push(format!("instance {t}: closure not closed at {stem}"));
                }
            }
            out.closure_checked += 1;
        }

        // agreement with the exhaustive tree search, two levels deep
        {
            let stem = random_stem(&mut rng, config, config.depth_cap.saturating_sub(2));
            let fast = is_big_bounded(&b, &stem, &g, caps).unwrap().is_some();
            let slow = exists_witness_exhaustive(&b, &stem, &g, caps);
            if fast != slow {
                out.failures.push(format!(
                    "instance {t}: bigness {fast} disagrees with exhaustive {slow} above {stem}"
                ));
            }
            out.agreement_checked += 1;
        }
    }
    out
}
