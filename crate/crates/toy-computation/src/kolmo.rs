//! Time-bounded prefix-free complexity on one fixed machine.
//!
//! Codewords are self-delimiting by construction: a flag bit selects either
//! a literal (gamma-coded length + raw bits) or an encoded program, so no
//! codeword is a proper prefix of another.

use serde::{Deserialize, Serialize};

use bushy_core::GrowthFn;

use crate::bits::BitStr;
use crate::error::ToyError;
use crate::interp::run;
use crate::program::{enumerate_programs, gamma_len, ToyProgram};

/// Codeword length of the literal encoding of an `len`-bit string.
pub fn literal_code_len(len: u64) -> u64 {
    1 + gamma_len(len + 1) + len
}

/// The literal encoding's overhead over the raw string.
pub fn literal_overhead(len: u64) -> u64 {
    1 + gamma_len(len + 1)
}

/// A prefix-free machine: the literal decoder, a shipped basis of named
/// programs, and an exhaustive sweep of every program with a short codeword.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "MachineRepr", into = "MachineRepr")]
pub struct PrefixFreeMachine {
    pub basis: Vec<ToyProgram>,
    /// Programs with codewords up to this many bits are swept exhaustively.
    pub exhaustive_code_bits: u64,
    swept: Vec<ToyProgram>,
}

#[derive(Serialize, Deserialize)]
struct MachineRepr {
    basis: Vec<ToyProgram>,
    exhaustive_code_bits: u64,
}

impl From<PrefixFreeMachine> for MachineRepr {
    fn from(m: PrefixFreeMachine) -> Self {
        MachineRepr { basis: m.basis, exhaustive_code_bits: m.exhaustive_code_bits }
    }
}

impl From<MachineRepr> for PrefixFreeMachine {
    fn from(r: MachineRepr) -> Self {
        PrefixFreeMachine::new(r.basis, r.exhaustive_code_bits)
    }
}

impl PrefixFreeMachine {
    pub fn new(basis: Vec<ToyProgram>, exhaustive_code_bits: u64) -> Self {
        PrefixFreeMachine {
            basis,
            swept: enumerate_programs(exhaustive_code_bits),
            exhaustive_code_bits,
        }
    }

    /// The machine shipped with the tooling: repeat/alternate compressors
    /// plus a 12-bit exhaustive sweep.
    pub fn standard() -> Self {
        PrefixFreeMachine::new(
            vec![
                ToyProgram::repeat_bit(false, 64),
                ToyProgram::repeat_bit(true, 64),
                ToyProgram::repeat_bit(false, 256),
                ToyProgram::repeat_bit(true, 256),
                ToyProgram::alternate(32),
                ToyProgram::alternate(128),
            ],
            12,
        )
    }

    /// Every codeword the machine will consider for `k_approx`, paired with
    /// its program. Used by the prefix-freeness audit.
    pub fn codewords(&self) -> Vec<BitStr> {
        self.basis
            .iter()
            .chain(self.swept.iter())
            .map(|p| p.encode())
            .collect()
    }

    /// K_t(x): the shortest codeword producing exactly `x` within `t` steps,
    /// falling back to the literal encoding. Non-increasing in `t`.
    pub fn k_approx(&self, x: &BitStr, t: u64) -> u64 {
        let mut best = literal_code_len(x.len() as u64);
        let mut consider = |p: &ToyProgram| {
            let bits = p.code_bits();
            if bits >= best {
                return;
            }
            if let Ok(outcome) = run(p, &[], None, t) {
                if outcome.halted() && outcome.emitted == *x {
                    best = bits;
                }
            }
        };
        for p in &self.basis {
            consider(p);
        }
        for p in &self.swept {
            consider(p);
        }
        best
    }
}

/// True when every tested prefix cut of `x` along `h0` is incompressible up
/// to slack `c`: for all n with h0(n) ≤ |x|, `K_t(x ↾ h0(n)) ≥ n − c`.
/// `h0` must be strictly increasing on the tested range.
pub fn is_h_complex_prefix(
    x: &BitStr,
    h0: &GrowthFn,
    c: u64,
    machine: &PrefixFreeMachine,
    t: u64,
) -> Result<bool, ToyError> {
    let mut prev: Option<u64> = None;
    for n in 0u64.. {
        let cut = match h0.eval(n) {
            Ok(v) => match u64::try_from(&v) {
                Ok(cut) => cut,
                Err(_) => break,
            },
            Err(_) => break,
        };
        if let Some(p) = prev {
            if cut <= p {
                return Err(ToyError::NotIncreasing { depth: n });
            }
        }
        prev = Some(cut);
        if cut > x.len() as u64 {
            break;
        }
        let k = machine.k_approx(&x.prefix(cut as usize), t);
        if (k as i128) < n as i128 - c as i128 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The measured description constant of this machine: the worst literal
/// overhead across probe lengths up to the horizon. Used as the additive
/// constant in threshold computations.
pub fn measured_description_constant(horizon: u64) -> u64 {
    (0..=horizon.min(1 << 20))
        .step_by(64)
        .map(literal_overhead)
        .max()
        .unwrap_or(2)
}
