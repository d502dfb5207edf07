//! Forcing posets and stage-enumerated condition families.

use bushy_core::OmegaString;

/// A computable partial order of forcing conditions. `q ≤ p` means `q`
/// refines (extends) `p`; chains descend from the root.
pub trait ForcingPoset {
    type Cond: Clone + Eq + std::fmt::Debug;

    fn root(&self) -> Self::Cond;

    /// The extension test `q ≤ p`.
    fn extends(&self, q: &Self::Cond, p: &Self::Cond) -> bool;
}

/// Strings ordered by end-extension: the poset behind string forcing.
#[derive(Clone, Copy, Debug, Default)]
pub struct StringPoset;

impl ForcingPoset for StringPoset {
    type Cond = OmegaString;

    fn root(&self) -> OmegaString {
        OmegaString::root()
    }

    fn extends(&self, q: &OmegaString, p: &OmegaString) -> bool {
        p.is_prefix_of(q)
    }
}

/// A uniformly enumerated subset of conditions, revealed stage by stage.
///
/// `find_extension_in` answers the one question the forcing loop asks:
/// is there a `q ≤ p` in the stage-`stage` enumeration? Implementations must
/// be monotone in the stage.
pub trait ConditionFamily<C> {
    fn find_extension_in(&self, p: &C, stage: u64) -> Option<C>;

    /// Decidable membership of the stage snapshot, for audits.
    fn contains_at(&self, q: &C, stage: u64) -> bool;
}

/// The empty family: never refutes anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct EmptyFamily;

impl<C> ConditionFamily<C> for EmptyFamily {
    fn find_extension_in(&self, _p: &C, _stage: u64) -> Option<C> {
        None
    }
    fn contains_at(&self, _q: &C, _stage: u64) -> bool {
        false
    }
}

/// Everything below everything: each condition has its canonical child in
/// the set at every stage. For strings, the child with value 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct DenseZeroFamily;

impl ConditionFamily<OmegaString> for DenseZeroFamily {
    fn find_extension_in(&self, p: &OmegaString, _stage: u64) -> Option<OmegaString> {
        Some(p.child(0u32))
    }
    fn contains_at(&self, q: &OmegaString, _stage: u64) -> bool {
        q.values().last().map(|v| v.bits() == 0).unwrap_or(false)
    }
}

/// An explicit finite enumeration of string conditions with entry stages.
#[derive(Clone, Debug, Default)]
pub struct StagedFamily {
    entries: Vec<(u64, OmegaString)>,
}

impl StagedFamily {
    pub fn new(entries: Vec<(u64, OmegaString)>) -> Self {
        StagedFamily { entries }
    }
}

impl ConditionFamily<OmegaString> for StagedFamily {
    fn find_extension_in(&self, p: &OmegaString, stage: u64) -> Option<OmegaString> {
        self.entries
            .iter()
            .filter(|(t, q)| *t <= stage && p.is_prefix_of(q))
            .map(|(_, q)| q.clone())
            .next()
    }
    fn contains_at(&self, q: &OmegaString, stage: u64) -> bool {
        self.entries.iter().any(|(t, e)| *t <= stage && e == q)
    }
}
