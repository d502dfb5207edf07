//! The step-bounded interpreter. Deterministic; halting is monotone in the
//! step budget and emitted bits are committed, never retracted.

use num_bigint::BigUint;

use crate::bits::BitStr;
use crate::error::ToyError;
use crate::program::{Instr, ToyProgram};

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    /// Halted with a natural output.
    HaltedNat(u64),
    /// Halted with the emitted bit string as output.
    HaltedBits,
    /// Step budget exhausted.
    OutOfFuel,
    /// Read past the supplied input prefix; more input could resume it.
    NeedsInput,
}

/// Everything a bounded run reveals.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    /// Output bits committed so far (complete on `HaltedBits`).
    pub emitted: BitStr,
    pub steps_used: u64,
    /// Largest input index read, if any (use bound).
    pub max_input_read: Option<u64>,
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        matches!(self.status, RunStatus::HaltedNat(_) | RunStatus::HaltedBits)
    }

    /// Halting output read as a natural: the stack value for `Halt`, the
    /// emitted bits read big-endian for `HaltStr`.
    pub fn natural_output(&self) -> Option<BigUint> {
        match self.status {
            RunStatus::HaltedNat(v) => Some(BigUint::from(v)),
            RunStatus::HaltedBits => Some(self.emitted.as_natural()),
            _ => None,
        }
    }
}

/// Run `program` for at most `fuel` steps.
///
/// `input` is a finite sequence of naturals (a single value for the
/// enumerated partial functions, a string prefix for functionals); reading
/// past it suspends the run. `oracle` is a finite bit prefix with a hard
/// horizon; reading past it is an error.
pub fn run(
    program: &ToyProgram,
    input: &[BigUint],
    oracle: Option<&BitStr>,
    fuel: u64,
) -> Result<RunOutcome, ToyError> {
    let mut stack: Vec<u64> = Vec::new();
    let mut emitted = BitStr::new();
    let mut pc = 0usize;
    let mut steps = 0u64;
    let mut max_read: Option<u64> = None;

    let done = |status, emitted: BitStr, steps, max_read| {
        Ok(RunOutcome {
            status,
            emitted,
            steps_used: steps,
            max_input_read: max_read,
        })
    };

    loop {
        if pc >= program.code.len() {
            // falling off the end halts with the top of the stack
            let v = stack.last().copied().unwrap_or(0);
            return done(RunStatus::HaltedNat(v), emitted, steps, max_read);
        }
        if steps >= fuel {
            return done(RunStatus::OutOfFuel, emitted, steps, max_read);
        }
        steps += 1;
        let mut pop = || stack.pop().unwrap_or(0);
        match program.code[pc] {
            Instr::Push(v) => stack.push(v),
            Instr::Dup => {
                let v = stack.last().copied().unwrap_or(0);
                stack.push(v);
            }
            Instr::Dec => {
                let v = pop();
                stack.push(v.saturating_sub(1));
            }
            Instr::Add => {
                let b = pop();
                let a = pop();
                stack.push(a.wrapping_add(b));
            }
            Instr::Sub => {
                let b = pop();
                let a = pop();
                stack.push(a.saturating_sub(b));
            }
            Instr::Mul => {
                let b = pop();
                let a = pop();
                stack.push(a.wrapping_mul(b));
            }
            Instr::Eq => {
                let b = pop();
                let a = pop();
                stack.push(u64::from(a == b));
            }
            Instr::Lt => {
                let b = pop();
                let a = pop();
                stack.push(u64::from(a < b));
            }
            Instr::Jmp(t) => {
                pc = t as usize;
                continue;
            }
            Instr::Jz(t) => {
                if pop() == 0 {
                    pc = t as usize;
                    continue;
                }
            }
            Instr::Input => {
                let i = pop();
                max_read = Some(max_read.map_or(i, |m| m.max(i)));
                match input.get(i as usize).map(u64::try_from) {
                    Some(Ok(v)) => stack.push(v),
                    // beyond the prefix, or not representable on the stack
                    _ => return done(RunStatus::NeedsInput, emitted, steps, max_read),
                }
            }
            Instr::Oracle => {
                let i = pop();
                let bit = oracle
                    .and_then(|x| x.get(i as usize))
                    .ok_or(ToyError::OracleHorizonExceeded { index: i })?;
                stack.push(u64::from(bit));
            }
            Instr::Emit0 => emitted.push(false),
            Instr::Emit1 => emitted.push(true),
            Instr::Halt => {
                let v = stack.last().copied().unwrap_or(0);
                return done(RunStatus::HaltedNat(v), emitted, steps, max_read);
            }
            Instr::HaltStr => return done(RunStatus::HaltedBits, emitted, steps, max_read),
        }
        pc += 1;
    }
}
