//! Downward random walks and the exact avoidance arithmetic around them.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enumset::EnumerableSet;
use crate::error::BushyError;
use crate::growth::GrowthFn;
use crate::string::OmegaString;
use crate::witness::WitnessTree;

/// A restriction entry: when the walk reaches `at_depth` the next values are
/// drawn among the children of the current node inside `tree`, until a leaf
/// of `tree` is reached.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub at_depth: u64,
    pub tree: WitnessTree,
    /// Optional label echoed into the walk log.
    pub bound: Option<GrowthFn>,
}

/// Outcome of one walk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WalkResult {
    pub path: OmegaString,
    pub hit_set: bool,
    pub hit_depth: Option<u64>,
    /// One entry per restriction actually taken: (start depth, end depth, bound label).
    pub restrictions_log: Vec<(u64, u64, Option<GrowthFn>)>,
}

/// Walk down for `depth` steps, drawing value `i` uniformly in
/// `[0, h_eff(i))` except while a restriction is active. Membership in
/// `avoid` is judged at the walk's final stage (= `depth`).
///
/// Faults if an activating restriction's tree does not contain the current
/// node.
pub fn random_walk(
    h_eff: &GrowthFn,
    avoid: &dyn EnumerableSet,
    depth: u64,
    restrictions: &[Restriction],
    rng: &mut impl Rng,
) -> Result<WalkResult, BushyError> {
    let mut node = OmegaString::root();
    let mut log = Vec::new();
    while (node.len() as u64) < depth {
        let here = node.len() as u64;
        if let Some(r) = restrictions.iter().find(|r| r.at_depth == here) {
            if !r.tree.contains(&node) {
                return Err(BushyError::RestrictionMismatch {
                    depth: here,
                    node: node.to_string(),
                });
            }
            let start = here;
            while !r.tree.is_leaf(&node) && (node.len() as u64) < depth {
                let children = r.tree.children_of(&node);
                if children.is_empty() {
                    return Err(BushyError::RestrictionMismatch {
                        depth: node.len() as u64,
                        node: node.to_string(),
                    });
                }
                let pick = rng.gen_range(0..children.len());
                node = children[pick].clone();
            }
            log.push((start, node.len() as u64, r.bound.clone()));
            continue;
        }
        let bound = h_eff.eval(here)?;
        if bound.is_zero() {
            return Err(BushyError::ValueTooLarge);
        }
        let v = rng.gen_biguint_below(&bound);
        node = node.child(v);
    }
    let hit_depth = node
        .prefixes()
        .position(|p| !p.is_empty() && avoid.contains_at(&p, depth))
        .map(|i| i as u64);
    Ok(WalkResult {
        hit_set: hit_depth.is_some(),
        hit_depth,
        path: node,
        restrictions_log: log,
    })
}

/// The exact truncated avoidance product `∏_{i<depth} (1 − g(i)/h(i))`.
/// Rejects instances with `g(i) > h(i)`.
pub fn avoidance_lower_bound(
    g: &GrowthFn,
    h: &GrowthFn,
    depth: u64,
) -> Result<BigRational, BushyError> {
    let mut acc = BigRational::one();
    for i in 0..depth {
        let gi = g.eval(i)?;
        let hi = h.eval(i)?;
        if gi > hi {
            return Err(BushyError::GrowthExceedsWidth { depth: i });
        }
        let term = BigRational::new(
            BigInt::from(hi.clone() - gi),
            BigInt::from(hi),
        );
        acc *= term;
    }
    Ok(acc)
}

/// Exact probability that an unrestricted walk of `depth` steps below widths
/// `h_eff` hits `avoid`, by backward induction over the capped tree. The
/// avoided set is taken at its final snapshot. Desk-scale only: every
/// `h_eff(i)` must fit in `usize`.
pub fn exact_hit_probability(
    avoid: &BTreeSet<OmegaString>,
    h_eff: &GrowthFn,
    depth: u64,
) -> Result<BigRational, BushyError> {
    fn go(
        node: &OmegaString,
        avoid: &BTreeSet<OmegaString>,
        h_eff: &GrowthFn,
        depth: u64,
    ) -> Result<BigRational, BushyError> {
        if !node.is_empty() && avoid.contains(node) {
            return Ok(BigRational::one());
        }
        if node.len() as u64 >= depth {
            return Ok(BigRational::zero());
        }
        let width = h_eff.eval_usize(node.len() as u64)?;
        let mut total = BigRational::zero();
        for c in 0..width {
            total += go(&node.child(c as u64), avoid, h_eff, depth)?;
        }
        Ok(total / BigRational::from(BigInt::from(width)))
    }
    go(&OmegaString::root(), avoid, h_eff, depth)
}

/// Plant the densest `g`-closed set that is still `g`-small above λ inside
/// the `h`-grid: each surviving node gets exactly `g(i) − 1` bad children
/// (the least child indices). The walk's hit probability against it is
/// exactly `1 − ∏ (1 − (g(i)−1)/h(i))`, the worst case among closed small
/// sets.
pub fn max_small_closed_set(
    g: &GrowthFn,
    h: &GrowthFn,
    depth: u64,
) -> Result<BTreeSet<OmegaString>, BushyError> {
    let mut out = BTreeSet::new();
    let mut frontier = vec![OmegaString::root()];
    for i in 0..depth {
        let bad = {
            let gi = g.eval(i)?;
            if gi.is_zero() {
                BigUint::zero()
            } else {
                gi - BigUint::one()
            }
        };
        let bad = usize::try_from(&bad).map_err(|_| BushyError::ValueTooLarge)?;
        let width = h.eval_usize(i)?;
        if bad >= width {
            return Err(BushyError::GrowthExceedsWidth { depth: i });
        }
        let mut next = Vec::new();
        for node in &frontier {
            for c in 0..width as u64 {
                let child = node.child(c);
                if (c as usize) < bad {
                    out.insert(child);
                } else if i + 1 < depth {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumset::FiniteSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_avoid_never_hits() {
        let avoid = FiniteSet::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let r = random_walk(&GrowthFn::pow2_plus(2), &avoid, 5, &[], &mut rng).unwrap();
            assert!(!r.hit_set);
            assert_eq!(r.path.len(), 5);
        }
    }

    #[test]
    fn unit_width_walk_is_forced() {
        let avoid = FiniteSet::from_members([OmegaString::from_u64s(&[0])]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let r = random_walk(&GrowthFn::constant(1u32), &avoid, 3, &[], &mut rng).unwrap();
            assert!(r.hit_set);
            assert_eq!(r.hit_depth, Some(1));
        }
    }

    #[test]
    fn avoidance_bound_examples() {
        // zero badness: probability one
        let one = avoidance_lower_bound(&GrowthFn::constant(0u32), &GrowthFn::constant(7u32), 4)
            .unwrap();
        assert_eq!(one, BigRational::one());
        // g ≡ 2, h = 2^{i+4}, depth 3: (7/8)(15/16)(31/32) = 3255/4096
        let b =
            avoidance_lower_bound(&GrowthFn::constant(2u32), &GrowthFn::pow2_plus(4), 3).unwrap();
        assert_eq!(
            b,
            BigRational::new(BigInt::from(3255), BigInt::from(4096))
        );
        // g = h at depth 1: zero
        let z = avoidance_lower_bound(&GrowthFn::constant(3u32), &GrowthFn::constant(3u32), 1)
            .unwrap();
        assert_eq!(z, BigRational::zero());
        // g > h rejected
        assert!(avoidance_lower_bound(&GrowthFn::constant(9u32), &GrowthFn::constant(3u32), 1)
            .is_err());
    }

    #[test]
    fn restriction_fault_when_node_missing() {
        // walk values stay below 2, the tree only covers the 9-branch
        let tree = WitnessTree::singleton(OmegaString::from_u64s(&[9, 9]));
        let avoid = FiniteSet::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_walk(
            &GrowthFn::constant(2u32),
            &avoid,
            4,
            &[Restriction { at_depth: 1, tree, bound: None }],
            &mut rng,
        );
        assert!(matches!(r, Err(BushyError::RestrictionMismatch { .. })));
    }

    #[test]
    fn planted_set_is_where_it_should_be() {
        let g = GrowthFn::constant(2u32);
        let h = GrowthFn::pow2_plus(4);
        let set = max_small_closed_set(&g, &h, 3).unwrap();
        // one bad child per surviving node: 1 + 15 + 15*31
        assert_eq!(set.len(), 1 + 15 + 15 * 31);
        assert!(set.contains(&OmegaString::from_u64s(&[0])));
        assert!(!set.contains(&OmegaString::from_u64s(&[1])));
    }
}
