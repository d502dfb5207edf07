//! The enumerated partial functions φ_e, their diagonal, and the set of
//! strings that disagree with diagonal non-computation.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;

use bushy_core::{EnumerableSet, OmegaString};

use crate::bits::BitStr;
use crate::error::ToyError;
use crate::interp::run;
use crate::program::{enumerate_programs, ToyProgram};

/// Default codeword budget for the shipped enumeration (a few hundred
/// programs).
pub const DEFAULT_ENUM_CODE_BITS: u64 = 12;

/// An indexed finite list of programs with an optional finite oracle prefix.
/// Index e is the code number of the e-th program.
#[derive(Clone, Debug)]
pub struct ToyEnumeration {
    programs: Vec<ToyProgram>,
    oracle: Option<BitStr>,
}

impl ToyEnumeration {
    /// All programs of codeword length at most `max_code_bits`, in canonical
    /// order, with no oracle.
    pub fn standard(max_code_bits: u64) -> Self {
        ToyEnumeration {
            programs: enumerate_programs(max_code_bits),
            oracle: None,
        }
    }

    /// The enumeration shipped with the tooling.
    pub fn shipped() -> Self {
        Self::standard(DEFAULT_ENUM_CODE_BITS)
    }

    pub fn from_programs(programs: Vec<ToyProgram>, oracle: Option<BitStr>) -> Self {
        ToyEnumeration { programs, oracle }
    }

    pub fn with_oracle(mut self, oracle: BitStr) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    pub fn program(&self, e: usize) -> Option<&ToyProgram> {
        self.programs.get(e)
    }

    pub fn oracle(&self) -> Option<&BitStr> {
        self.oracle.as_ref()
    }

    /// φ_e(n) within `steps`: `None` while still running. Monotone in
    /// `steps`. Reading past the oracle prefix is an error.
    pub fn phi(&self, e: usize, n: u64, steps: u64) -> Result<Option<BigUint>, ToyError> {
        let program = self.programs.get(e).ok_or(ToyError::BadIndex {
            index: e,
            size: self.programs.len(),
        })?;
        let input = [BigUint::from(n)];
        let outcome = run(program, &input, self.oracle.as_ref(), steps)?;
        Ok(outcome.natural_output())
    }

    /// The diagonal φ_e(e) for every index, with halting steps. Oracle
    /// faults and suspensions count as divergence here: the diagonal is a
    /// best-effort table of what actually converges.
    pub fn diagonal(&self, steps: u64) -> Vec<Option<(u64, BigUint)>> {
        self.programs
            .iter()
            .enumerate()
            .map(|(e, program)| {
                let input = [BigUint::from(e as u64)];
                match run(program, &input, self.oracle.as_ref(), steps) {
                    Ok(outcome) if outcome.halted() => {
                        let v = outcome.natural_output().expect("halted");
                        Some((outcome.steps_used, v))
                    }
                    _ => None,
                }
            })
            .collect()
    }
}

/// Stage-`stage` snapshot of the bad set: strings σ (inside the cap grid)
/// with φ_e(e) halting within `stage` steps on value σ(e) for some e < |σ|.
pub fn b_dnc_stage(
    enumeration: &ToyEnumeration,
    stage: u64,
    length_cap: u64,
    width_cap: u64,
) -> BTreeSet<OmegaString> {
    let diag = BDncSet::new(enumeration, stage);
    let mut out = BTreeSet::new();
    let mut frontier = vec![OmegaString::root()];
    for _ in 0..length_cap {
        let mut next = Vec::new();
        for node in &frontier {
            for c in 0..width_cap {
                let child = node.child(c);
                if diag.contains_at(&child, stage) {
                    out.insert(child.clone());
                }
                next.push(child);
            }
        }
        frontier = next;
    }
    out
}

/// True when no e < |σ| has φ_e(e) halting within `steps` on value σ(e).
pub fn is_dnc_prefix(
    sigma: &OmegaString,
    enumeration: &ToyEnumeration,
    steps: u64,
) -> bool {
    BDncSet::new(enumeration, steps).is_dnc_prefix(sigma, steps)
}

/// The bad set as a reusable stage-indexed membership test: the diagonal is
/// evaluated once up to a budget and shared.
#[derive(Clone, Debug)]
pub struct BDncSet {
    diag: Arc<Vec<Option<(u64, BigUint)>>>,
}

impl BDncSet {
    pub fn new(enumeration: &ToyEnumeration, max_steps: u64) -> Self {
        BDncSet {
            diag: Arc::new(enumeration.diagonal(max_steps)),
        }
    }

    /// φ_e(e) if it halts within `stage` steps.
    pub fn value_at(&self, e: usize, stage: u64) -> Option<&BigUint> {
        match self.diag.get(e) {
            Some(Some((halt, v))) if *halt <= stage => Some(v),
            _ => None,
        }
    }

    pub fn is_dnc_prefix(&self, sigma: &OmegaString, stage: u64) -> bool {
        !(0..sigma.len()).any(|e| self.value_at(e, stage) == sigma.get(e))
    }
}

impl EnumerableSet for BDncSet {
    fn contains_at(&self, s: &OmegaString, stage: u64) -> bool {
        !self.is_dnc_prefix(s, stage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::Instr;

    fn constant_program(v: u64) -> ToyProgram {
        ToyProgram::new(vec![Instr::Push(v), Instr::Halt])
    }

    fn looper() -> ToyProgram {
        ToyProgram::new(vec![Instr::Jmp(0)])
    }

    #[test]
    fn phi_of_constant_and_loop() {
        let enun = ToyEnumeration::from_programs(vec![constant_program(7), looper()], None);
        assert_eq!(enun.phi(0, 0, 1).unwrap(), None); // needs 2 steps
        assert_eq!(enun.phi(0, 0, 2).unwrap(), Some(BigUint::from(7u32)));
        for s in [1, 10, 10_000] {
            assert_eq!(enun.phi(1, 3, s).unwrap(), None);
        }
        assert!(matches!(
            enun.phi(9, 0, 5),
            Err(ToyError::BadIndex { index: 9, size: 2 })
        ));
    }

    #[test]
    fn b_dnc_is_empty_at_stage_zero() {
        let enun = ToyEnumeration::shipped();
        assert!(b_dnc_stage(&enun, 0, 3, 3).is_empty());
    }

    #[test]
    fn b_dnc_contains_diagonal_disagreements() {
        // φ_0(0) = 5 halting at step 2
        let enun = ToyEnumeration::from_programs(vec![constant_program(5)], None);
        let bad = b_dnc_stage(&enun, 3, 2, 8);
        for sigma in [
            OmegaString::from_u64s(&[5]),
            OmegaString::from_u64s(&[5, 0]),
            OmegaString::from_u64s(&[5, 7]),
        ] {
            assert!(bad.contains(&sigma), "{sigma} missing");
        }
        assert!(!bad.contains(&OmegaString::from_u64s(&[4])));
        // nothing halts in 1 step
        assert!(b_dnc_stage(&enun, 1, 2, 8).is_empty());
    }

    #[test]
    fn b_dnc_is_upward_closed_within_caps() {
        let enun = ToyEnumeration::shipped();
        let bad = b_dnc_stage(&enun, 500, 3, 4);
        for sigma in &bad {
            if (sigma.len() as u64) < 3 {
                for c in 0..4u64 {
                    assert!(bad.contains(&sigma.child(c)));
                }
            }
        }
    }

    #[test]
    fn at_most_one_forbidden_value_per_coordinate() {
        // the literal fact that makes the bad set 2-small: at every stage the
        // diagonal pins down at most one value per coordinate, and it never
        // changes once converged
        let enun = ToyEnumeration::shipped();
        let diag = BDncSet::new(&enun, 2_000);
        for e in 0..enun.len() {
            let mut seen: Option<&BigUint> = None;
            for stage in [0u64, 1, 5, 50, 500, 2_000] {
                match (seen, diag.value_at(e, stage)) {
                    (None, next) => seen = next,
                    (Some(v), Some(w)) => assert_eq!(v, w, "coordinate {e} changed value"),
                    (Some(_), None) => panic!("coordinate {e} retracted its value"),
                }
            }
        }
    }

    #[test]
    fn dnc_prefix_matches_bad_set() {
        let enun = ToyEnumeration::shipped();
        let stage = 300;
        let bad = b_dnc_stage(&enun, stage, 3, 3);
        let mut frontier = vec![OmegaString::root()];
        for _ in 0..3 {
            frontier = frontier
                .iter()
                .flat_map(|n| (0..3u64).map(|c| n.child(c)))
                .collect();
            for sigma in &frontier {
                let by_def = is_dnc_prefix(sigma, &enun, stage);
                let by_set = sigma.prefixes().all(|p| p.is_empty() || !bad.contains(&p));
                assert_eq!(by_def, by_set, "disagree at {sigma}");
            }
        }
    }

    #[test]
    fn empty_string_is_dnc() {
        let enun = ToyEnumeration::shipped();
        assert!(is_dnc_prefix(&OmegaString::root(), &enun, 1_000));
    }

    #[test]
    fn diagonal_plus_one_is_dnc_at_coordinate() {
        let enun = ToyEnumeration::shipped();
        let diag = enun.diagonal(1_000);
        let (e, v) = diag
            .iter()
            .enumerate()
            .find_map(|(e, d)| d.as_ref().map(|(_, v)| (e, v.clone())))
            .expect("something halts");
        assert_eq!(e, 0, "shortest programs halt immediately");
        let good = OmegaString::new(vec![v.clone() + 1u32]);
        assert!(is_dnc_prefix(&good, &enun, 1_000));
        let bad = OmegaString::new(vec![v]);
        assert!(!is_dnc_prefix(&bad, &enun, 1_000));
    }
}
