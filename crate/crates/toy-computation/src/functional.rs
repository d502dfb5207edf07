//! Monotone functionals from strings of naturals to bit strings.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use bushy_core::OmegaString;

use crate::bits::BitStr;
use crate::interp::run;
use crate::program::ToyProgram;

/// A monotone map from string prefixes to bit strings: output bits are
/// committed and never retracted, so σ ⪯ τ gives output(σ) ⪯ output(τ).
///
/// The named variants are the test library; `Program` wraps an arbitrary toy
/// program whose monotonicity comes from the suspend-on-missing-input
/// semantics of the interpreter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Functional {
    /// Emits nothing on any input.
    EverywherePartial,
    /// Emits the same fixed string on every input, including the empty one.
    Constant { bits: BitStr },
    /// Emits one bit of the fixed string per input value consumed.
    FixedStringEmitter { bits: BitStr },
    /// Bit i is input value i mod 2.
    CopyParity,
    /// Bit i is the parity of the first i+1 input values.
    UseAllInput,
    /// Emits the payload once the pinned coordinate is ≡ 0 mod `modulus`,
    /// nothing otherwise.
    TriggerEmitter {
        level: u64,
        modulus: u64,
        payload: BitStr,
    },
    /// Like `TriggerEmitter` but the payload is `len` zeros, so the
    /// description stays short however long the output is.
    TriggerZeros { level: u64, modulus: u64, len: u64 },
    /// An arbitrary toy program run on the input string.
    Program { program: ToyProgram },
}

/// Output plus use bookkeeping.
#[derive(Clone, Debug)]
pub struct FunctionalOutput {
    pub bits: BitStr,
    /// Largest input coordinate consulted, if any.
    pub use_bound: Option<u64>,
}

impl Functional {
    /// Longest committed output on `tau` within the step budget. The named
    /// functionals are budget-free; programs are step-counted.
    pub fn output(&self, tau: &OmegaString, steps: u64) -> FunctionalOutput {
        match self {
            Functional::EverywherePartial => FunctionalOutput {
                bits: BitStr::new(),
                use_bound: None,
            },
            Functional::Constant { bits } => FunctionalOutput {
                bits: bits.clone(),
                use_bound: None,
            },
            Functional::FixedStringEmitter { bits } => FunctionalOutput {
                bits: bits.prefix(tau.len()),
                use_bound: tau.len().checked_sub(1).map(|i| i as u64),
            },
            Functional::CopyParity => FunctionalOutput {
                bits: BitStr::from_bits(
                    tau.values().iter().map(|v| v.bit(0)).collect(),
                ),
                use_bound: tau.len().checked_sub(1).map(|i| i as u64),
            },
            Functional::UseAllInput => {
                let mut parity = false;
                let bits = tau
                    .values()
                    .iter()
                    .map(|v| {
                        parity ^= v.bit(0);
                        parity
                    })
                    .collect();
                FunctionalOutput {
                    bits: BitStr::from_bits(bits),
                    use_bound: tau.len().checked_sub(1).map(|i| i as u64),
                }
            }
            Functional::TriggerEmitter {
                level,
                modulus,
                payload,
            } => {
                let fired = tau
                    .get(*level as usize)
                    .map(|v| (v % BigUint::from(*modulus)) == BigUint::from(0u32));
                FunctionalOutput {
                    bits: if fired == Some(true) {
                        payload.clone()
                    } else {
                        BitStr::new()
                    },
                    use_bound: fired.is_some().then_some(*level),
                }
            }
            Functional::TriggerZeros { level, modulus, len } => {
                let fired = tau
                    .get(*level as usize)
                    .map(|v| (v % BigUint::from(*modulus)) == BigUint::from(0u32));
                FunctionalOutput {
                    bits: if fired == Some(true) {
                        BitStr::repeat(false, *len as usize)
                    } else {
                        BitStr::new()
                    },
                    use_bound: fired.is_some().then_some(*level),
                }
            }
            Functional::Program { program } => {
                match run(program, tau.values(), None, steps) {
                    Ok(outcome) => FunctionalOutput {
                        bits: outcome.emitted,
                        use_bound: outcome.max_input_read,
                    },
                    Err(_) => FunctionalOutput {
                        bits: BitStr::new(),
                        use_bound: None,
                    },
                }
            }
        }
    }

    /// |Γ^τ| at the budget, computed without materializing the bits.
    pub fn output_len(&self, tau: &OmegaString, steps: u64) -> u64 {
        match self {
            Functional::EverywherePartial => 0,
            Functional::Constant { bits } => bits.len() as u64,
            Functional::FixedStringEmitter { bits } => bits.len().min(tau.len()) as u64,
            Functional::CopyParity | Functional::UseAllInput => tau.len() as u64,
            Functional::TriggerEmitter { level, modulus, payload } => {
                match tau.get(*level as usize) {
                    Some(v) if (v % BigUint::from(*modulus)) == BigUint::from(0u32) => {
                        payload.len() as u64
                    }
                    _ => 0,
                }
            }
            Functional::TriggerZeros { level, modulus, len } => {
                match tau.get(*level as usize) {
                    Some(v) if (v % BigUint::from(*modulus)) == BigUint::from(0u32) => *len,
                    _ => 0,
                }
            }
            Functional::Program { .. } => self.output(tau, steps).bits.len() as u64,
        }
    }

    /// A declared upper bound (in bits) on the description length of this
    /// functional, used where a complexity bound for Γ is needed. Generated
    /// payloads count their parameters (16 bits each), literal payloads
    /// count their bits.
    pub fn complexity_bits(&self) -> u64 {
        match self {
            Functional::EverywherePartial | Functional::CopyParity | Functional::UseAllInput => 8,
            Functional::Constant { bits } | Functional::FixedStringEmitter { bits } => {
                8 + bits.len() as u64
            }
            Functional::TriggerEmitter { payload, .. } => 8 + 32 + payload.len() as u64,
            Functional::TriggerZeros { .. } => 8 + 48,
            Functional::Program { program } => program.code_bits(),
        }
    }

    /// Short display name for traces and reports.
    pub fn label(&self) -> String {
        match self {
            Functional::EverywherePartial => "everywhere-partial".into(),
            Functional::Constant { bits } => format!("constant[{}b]", bits.len()),
            Functional::FixedStringEmitter { bits } => format!("fixed-emitter[{}b]", bits.len()),
            Functional::CopyParity => "copy-parity".into(),
            Functional::UseAllInput => "use-all-input".into(),
            Functional::TriggerEmitter { level, modulus, .. } => {
                format!("trigger[{level}%{modulus}]")
            }
            Functional::TriggerZeros { level, modulus, len } => {
                format!("trigger-zeros[{level}%{modulus}->{len}]")
            }
            Functional::Program { program } => format!("program[{}i]", program.len()),
        }
    }
}

/// `gamma_output`: the committed output of Γ on τ within the step budget.
pub fn gamma_output(gamma: &Functional, tau: &OmegaString, steps: u64) -> BitStr {
    gamma.output(tau, steps).bits
}
