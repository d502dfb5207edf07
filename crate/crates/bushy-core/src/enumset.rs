//! Stage-indexed monotone enumerations: the c.e. set abstraction.

use std::collections::BTreeSet;

use crate::string::OmegaString;

/// A set of strings revealed stage by stage. Membership at a stage must be
/// decidable and monotone: `s ≤ s'` implies `enumerate(s) ⊆ enumerate(s')`.
pub trait EnumerableSet {
    fn contains_at(&self, s: &OmegaString, stage: u64) -> bool;
}

/// A plain finite set, fully revealed at every stage.
#[derive(Clone, Debug, Default)]
pub struct FiniteSet(pub BTreeSet<OmegaString>);

impl FiniteSet {
    pub fn from_members(items: impl IntoIterator<Item = OmegaString>) -> Self {
        FiniteSet(items.into_iter().collect())
    }
}

impl EnumerableSet for FiniteSet {
    fn contains_at(&self, s: &OmegaString, _stage: u64) -> bool {
        self.0.contains(s)
    }
}

/// A finite enumeration with explicit appearance stages.
#[derive(Clone, Debug, Default)]
pub struct StagedSet {
    entries: Vec<(u64, OmegaString)>,
}

impl StagedSet {
    pub fn new(entries: Vec<(u64, OmegaString)>) -> Self {
        StagedSet { entries }
    }

    pub fn push(&mut self, stage: u64, s: OmegaString) {
        self.entries.push((stage, s));
    }

    pub fn snapshot(&self, stage: u64) -> BTreeSet<OmegaString> {
        self.entries
            .iter()
            .filter(|(t, _)| *t <= stage)
            .map(|(_, s)| s.clone())
            .collect()
    }
}

impl EnumerableSet for StagedSet {
    fn contains_at(&self, s: &OmegaString, stage: u64) -> bool {
        self.entries.iter().any(|(t, e)| *t <= stage && e == s)
    }
}
