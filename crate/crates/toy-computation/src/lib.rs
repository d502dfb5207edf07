//! A step-bounded toy model of computation: a 16-opcode deterministic stack
//! machine, the canonical enumeration of its short programs (with optional
//! finite oracle), the diagonal bad set, monotone functionals to bit
//! strings, and time-bounded prefix-free complexity on one fixed machine.

mod bits;
mod enumeration;
mod error;
mod functional;
mod interp;
mod kolmo;
mod program;

pub use bits::BitStr;
pub use enumeration::{
    b_dnc_stage, is_dnc_prefix, BDncSet, ToyEnumeration, DEFAULT_ENUM_CODE_BITS,
};
pub use error::ToyError;
pub use functional::{gamma_output, Functional, FunctionalOutput};
pub use interp::{run, RunOutcome, RunStatus};
pub use kolmo::{
    is_h_complex_prefix, literal_code_len, literal_overhead, measured_description_constant,
    PrefixFreeMachine,
};
pub use program::{enumerate_programs, gamma_encode, gamma_len, Instr, ToyProgram};

use std::io::BufRead;

/// Load a program corpus: one program per line, `#` starts a comment.
pub fn load_corpus(reader: impl BufRead) -> Result<Vec<ToyProgram>, ToyError> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| ToyError::BadMnemonic(e.to_string()))?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(line.parse()?);
    }
    Ok(out)
}
