//! Deciding big/small within explicit caps, with witness extraction.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::BushyError;
use crate::growth::GrowthFn;
use crate::string::OmegaString;
use crate::witness::WitnessTree;

/// Exploration caps for bigness questions. Absence of a witness under caps
/// means "small within the caps", never absolute smallness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Maximum node length explored (inclusive).
    pub depth: u64,
    /// Child indices explored at each level are `0..width`.
    pub width: u64,
}

impl Caps {
    pub fn new(depth: u64, width: u64) -> Self {
        Caps { depth, width }
    }
}

/// Decide whether `b` is `g`-big above `sigma` inside the capped grid and
/// extract the canonical witness if so.
///
/// A node is big when it is in `b`, or when at least `max(g(depth), 1)` of
/// its width-capped children are big; the witness takes the lexicographically
/// least big children. Rejects caps with `depth < |sigma|`.
pub fn is_big_bounded(
    b: &BTreeSet<OmegaString>,
    sigma: &OmegaString,
    g: &GrowthFn,
    caps: Caps,
) -> Result<Option<WitnessTree>, BushyError> {
    is_big_bounded_with(&mut |s| b.contains(s), sigma, g, caps)
}

/// `is_big_bounded` against an arbitrary membership predicate (used for
/// stage-indexed sets: bind the stage into the predicate).
pub fn is_big_bounded_with(
    member: &mut dyn FnMut(&OmegaString) -> bool,
    sigma: &OmegaString,
    g: &GrowthFn,
    caps: Caps,
) -> Result<Option<WitnessTree>, BushyError> {
    if caps.depth < sigma.len() as u64 {
        return Err(BushyError::BadCaps {
            depth: caps.depth,
            stem_len: sigma.len() as u64,
        });
    }
    let mut nodes: Vec<(OmegaString, bool)> = Vec::new();
    if grow_witness(member, sigma, g, caps, &mut nodes)? {
        let tree = WitnessTree::from_nodes(
            sigma.clone(),
            nodes.iter().map(|(n, _)| n.clone()),
            nodes.iter().filter(|(_, l)| *l).map(|(n, _)| n.clone()),
        );
        Ok(Some(tree))
    } else {
        Ok(None)
    }
}

/// Recursive search below `node`; on success appends the subtree's nodes.
fn grow_witness(
    member: &mut dyn FnMut(&OmegaString) -> bool,
    node: &OmegaString,
    g: &GrowthFn,
    caps: Caps,
    out: &mut Vec<(OmegaString, bool)>,
) -> Result<bool, BushyError> {
    if member(node) {
        out.push((node.clone(), true));
        return Ok(true);
    }
    if node.len() as u64 >= caps.depth {
        return Ok(false);
    }
    let need = g.eval(node.len() as u64)?.max(BigUint::one());
    // more children required than the cap can provide
    if need > BigUint::from(caps.width) {
        return Ok(false);
    }
    let need = usize::try_from(&need).map_err(|_| BushyError::ValueTooLarge)?;
    let mark = out.len();
    out.push((node.clone(), false));
    let mut found = 0usize;
    for c in 0..caps.width {
        if found == need {
            break;
        }
        if grow_witness(member, &node.child(c), g, caps, out)? {
            found += 1;
        }
    }
    if found == need {
        Ok(true)
    } else {
        out.truncate(mark);
        Ok(false)
    }
}

/// The g-closure within caps: every grid node above which `b` is `g`-big.
/// Contains `b`'s grid elements and is g-closed inside the grid.
pub fn closure(
    b: &BTreeSet<OmegaString>,
    g: &GrowthFn,
    caps: Caps,
) -> Result<BTreeSet<OmegaString>, BushyError> {
    let mut out = BTreeSet::new();
    closure_walk(&mut |s| b.contains(s), &OmegaString::root(), g, caps, &mut out)?;
    Ok(out)
}

/// Bottom-up bigness over the whole grid; records every big node.
fn closure_walk(
    member: &mut dyn FnMut(&OmegaString) -> bool,
    node: &OmegaString,
    g: &GrowthFn,
    caps: Caps,
    out: &mut BTreeSet<OmegaString>,
) -> Result<bool, BushyError> {
    let mut big_children = 0u64;
    if (node.len() as u64) < caps.depth {
        for c in 0..caps.width {
            if closure_walk(member, &node.child(c), g, caps, out)? {
                big_children += 1;
            }
        }
    }
    let big = if member(node) {
        true
    } else {
        let need = g.eval(node.len() as u64)?.max(BigUint::one());
        BigUint::from(big_children) >= need
    };
    if big {
        out.insert(node.clone());
    }
    Ok(big)
}
