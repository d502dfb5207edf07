//! Witness trees: the finite bushy trees certifying that a set is big.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::growth::GrowthFn;
use crate::string::OmegaString;

/// A finite tree above a stem, with explicit leaf marks.
///
/// Nodes are prefix-closed down to λ and all comparable with the stem.
/// Bushiness is only required of internal nodes extending the stem, and only
/// leaves extending the stem are required to land in the certified set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "WitnessTreeRepr", into = "WitnessTreeRepr")]
pub struct WitnessTree {
    stem: OmegaString,
    nodes: BTreeMap<OmegaString, bool>,
}

/// Serialized form: stem, node list with leaf flags.
#[derive(Serialize, Deserialize)]
struct WitnessTreeRepr {
    stem: OmegaString,
    nodes: Vec<NodeRepr>,
}

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    string: OmegaString,
    leaf: bool,
}

impl From<WitnessTree> for WitnessTreeRepr {
    fn from(t: WitnessTree) -> Self {
        WitnessTreeRepr {
            stem: t.stem,
            nodes: t
                .nodes
                .into_iter()
                .map(|(string, leaf)| NodeRepr { string, leaf })
                .collect(),
        }
    }
}

impl From<WitnessTreeRepr> for WitnessTree {
    fn from(r: WitnessTreeRepr) -> Self {
        WitnessTree {
            stem: r.stem,
            nodes: r.nodes.into_iter().map(|n| (n.string, n.leaf)).collect(),
        }
    }
}

impl WitnessTree {
    /// Single-node witness: the stem itself is a leaf.
    pub fn singleton(stem: OmegaString) -> Self {
        let mut nodes = BTreeMap::new();
        for p in stem.prefixes() {
            nodes.insert(p.clone(), p == stem);
        }
        WitnessTree { stem, nodes }
    }

    /// Build from an explicit node set. `leaves` marks which nodes are leaves.
    pub fn from_nodes(
        stem: OmegaString,
        nodes: impl IntoIterator<Item = OmegaString>,
        leaves: impl IntoIterator<Item = OmegaString>,
    ) -> Self {
        let mut map: BTreeMap<OmegaString, bool> =
            nodes.into_iter().map(|n| (n, false)).collect();
        for p in stem.prefixes() {
            map.entry(p).or_insert(false);
        }
        for l in leaves {
            map.insert(l, true);
        }
        WitnessTree { stem, nodes: map }
    }

    pub fn stem(&self) -> &OmegaString {
        &self.stem
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: &OmegaString) -> bool {
        self.nodes.contains_key(node)
    }

    pub fn is_leaf(&self, node: &OmegaString) -> bool {
        self.nodes.get(node).copied().unwrap_or(false)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &OmegaString> {
        self.nodes.keys()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &OmegaString> {
        self.nodes.iter().filter(|(_, &l)| l).map(|(n, _)| n)
    }

    /// Children of `node` present in the tree, in lexicographic order.
    pub fn children_of(&self, node: &OmegaString) -> Vec<&OmegaString> {
        self.nodes
            .range(node.clone()..)
            .take_while(|(n, _)| node.is_prefix_of(n))
            .filter(|(n, _)| n.len() == node.len() + 1)
            .map(|(n, _)| n)
            .collect()
    }

    /// Structural sanity: prefix-closed, comparable with the stem, stem
    /// present, and leaf marks consistent (no marked leaf has children).
    pub fn is_well_formed(&self) -> bool {
        if !self.nodes.contains_key(&self.stem) {
            return false;
        }
        for (node, &leaf) in &self.nodes {
            if !node.comparable_with(&self.stem) {
                return false;
            }
            if let Some(parent) = node.parent() {
                if !self.nodes.contains_key(&parent) {
                    return false;
                }
            }
            if leaf && !self.children_of(node).is_empty() {
                return false;
            }
            if !leaf && node.len() >= self.stem.len() && self.children_of(node).is_empty() {
                // internal node extending the stem with no children
                return false;
            }
        }
        true
    }

    /// Glue per-leaf witnesses onto this tree: each leaf τ is replaced by the
    /// tree `onto[τ]` (whose stem must be τ). Leaves without a replacement
    /// stay leaves.
    pub fn glue(&self, onto: &BTreeMap<OmegaString, WitnessTree>) -> WitnessTree {
        let mut nodes = self.nodes.clone();
        for (leaf, sub) in onto {
            if !self.is_leaf(leaf) {
                continue;
            }
            nodes.insert(leaf.clone(), false);
            for (n, &l) in &sub.nodes {
                if leaf.is_prefix_of(n) {
                    nodes.insert(n.clone(), l);
                }
            }
            nodes.insert(leaf.clone(), sub.is_leaf(leaf));
        }
        WitnessTree {
            stem: self.stem.clone(),
            nodes,
        }
    }
}

/// Check that `tree` witnesses "`B` is `g`-big above the stem": well formed,
/// all leaves extending the stem in `B`, and every internal node τ extending
/// the stem with at least g(|τ|) children. Total, never errors.
pub fn verify_witness(tree: &WitnessTree, b: &BTreeSet<OmegaString>, g: &GrowthFn) -> bool {
    verify_witness_with(tree, &mut |s| b.contains(s), g)
}

/// `verify_witness` against an arbitrary membership predicate.
pub fn verify_witness_with(
    tree: &WitnessTree,
    member: &mut dyn FnMut(&OmegaString) -> bool,
    g: &GrowthFn,
) -> bool {
    if !tree.is_well_formed() {
        return false;
    }
    let stem = tree.stem();
    for node in tree.nodes() {
        if !stem.is_prefix_of(node) {
            continue;
        }
        if tree.is_leaf(node) {
            if !member(node) {
                return false;
            }
        } else {
            let need = match g.eval(node.len() as u64) {
                Ok(v) => v.max(BigUint::one()),
                Err(_) => return false,
            };
            if BigUint::from(tree.children_of(node).len()) < need {
                return false;
            }
        }
    }
    true
}
