//! The toy instruction set, its self-delimiting binary encoding, and the
//! canonical enumeration of all short programs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitStr;
use crate::error::ToyError;

/// One instruction of the deterministic stack machine. Sixteen opcodes:
/// constants, arithmetic, comparison, branching, input and oracle reads,
/// bit emission, and two halting modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Instr {
    /// Push a constant.
    Push(u64),
    /// Duplicate the top of the stack.
    Dup,
    /// Decrement the top (saturating at 0).
    Dec,
    Add,
    Sub,
    Mul,
    /// Pop b, a; push 1 if a = b else 0.
    Eq,
    /// Pop b, a; push 1 if a < b else 0.
    Lt,
    /// Unconditional jump to an instruction index.
    Jmp(u32),
    /// Pop; jump if zero.
    Jz(u32),
    /// Pop an index i; push the i-th input value.
    Input,
    /// Pop an index i; push the i-th oracle bit.
    Oracle,
    /// Append a 0 to the output tape.
    Emit0,
    /// Append a 1 to the output tape.
    Emit1,
    /// Halt with the top of the stack as natural output.
    Halt,
    /// Halt with the emitted bit string as output.
    HaltStr,
}

impl Instr {
    pub fn opcode(&self) -> u8 {
        match self {
            Instr::Push(_) => 0,
            Instr::Dup => 1,
            Instr::Dec => 2,
            Instr::Add => 3,
            Instr::Sub => 4,
            Instr::Mul => 5,
            Instr::Eq => 6,
            Instr::Lt => 7,
            Instr::Jmp(_) => 8,
            Instr::Jz(_) => 9,
            Instr::Input => 10,
            Instr::Oracle => 11,
            Instr::Emit0 => 12,
            Instr::Emit1 => 13,
            Instr::Halt => 14,
            Instr::HaltStr => 15,
        }
    }

    fn operand(&self) -> Option<u64> {
        match self {
            Instr::Push(v) => Some(*v),
            Instr::Jmp(t) | Instr::Jz(t) => Some(*t as u64),
            _ => None,
        }
    }

    /// Encoded width: 4 opcode bits plus a gamma-coded operand where present.
    pub fn code_bits(&self) -> u64 {
        4 + self.operand().map_or(0, |v| gamma_len(v + 1))
    }
}

/// Elias gamma code length of `n ≥ 1`.
pub fn gamma_len(n: u64) -> u64 {
    2 * (64 - n.leading_zeros() as u64) - 1
}

/// Append the Elias gamma code of `n ≥ 1`.
pub fn gamma_encode(n: u64, out: &mut BitStr) {
    let width = 64 - n.leading_zeros();
    for _ in 0..width - 1 {
        out.push(false);
    }
    for i in (0..width).rev() {
        out.push(n >> i & 1 == 1);
    }
}

/// A program: a non-empty instruction list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ToyProgram {
    pub code: Vec<Instr>,
}

impl ToyProgram {
    pub fn new(code: Vec<Instr>) -> Self {
        ToyProgram { code }
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    /// Length in bits of the self-delimiting codeword (flag + count + body).
    pub fn code_bits(&self) -> u64 {
        1 + gamma_len(self.code.len() as u64)
            + self.code.iter().map(|i| i.code_bits()).sum::<u64>()
    }

    /// The self-delimiting codeword itself: flag bit 1, gamma-coded
    /// instruction count, then each instruction as 4 opcode bits plus a
    /// gamma-coded operand.
    pub fn encode(&self) -> BitStr {
        let mut out = BitStr::new();
        out.push(true);
        gamma_encode(self.code.len() as u64, &mut out);
        for instr in &self.code {
            let op = instr.opcode();
            for i in (0..4).rev() {
                out.push(op >> i & 1 == 1);
            }
            if let Some(v) = instr.operand() {
                gamma_encode(v + 1, &mut out);
            }
        }
        out
    }

    /// Emit `n` zero bits and halt: the machine's canonical compressor for
    /// constant strings.
    pub fn repeat_bit(bit: bool, n: u64) -> Self {
        ToyProgram::new(vec![
            Instr::Push(n),
            Instr::Dup,
            Instr::Jz(6),
            if bit { Instr::Emit1 } else { Instr::Emit0 },
            Instr::Dec,
            Instr::Jmp(1),
            Instr::HaltStr,
        ])
    }

    /// Emit `n` "01" pairs and halt.
    pub fn alternate(n: u64) -> Self {
        ToyProgram::new(vec![
            Instr::Push(n),
            Instr::Dup,
            Instr::Jz(7),
            Instr::Emit0,
            Instr::Emit1,
            Instr::Dec,
            Instr::Jmp(1),
            Instr::HaltStr,
        ])
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Push(v) => write!(f, "PUSH {v}"),
            Instr::Dup => write!(f, "DUP"),
            Instr::Dec => write!(f, "DEC"),
            Instr::Add => write!(f, "ADD"),
            Instr::Sub => write!(f, "SUB"),
            Instr::Mul => write!(f, "MUL"),
            Instr::Eq => write!(f, "EQ"),
            Instr::Lt => write!(f, "LT"),
            Instr::Jmp(t) => write!(f, "JMP {t}"),
            Instr::Jz(t) => write!(f, "JZ {t}"),
            Instr::Input => write!(f, "INPUT"),
            Instr::Oracle => write!(f, "ORACLE"),
            Instr::Emit0 => write!(f, "EMIT0"),
            Instr::Emit1 => write!(f, "EMIT1"),
            Instr::Halt => write!(f, "HALT"),
            Instr::HaltStr => write!(f, "HALTSTR"),
        }
    }
}

impl fmt::Display for ToyProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, instr) in self.code.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{instr}")?;
        }
        Ok(())
    }
}

impl FromStr for ToyProgram {
    type Err = ToyError;

    /// Parse space-separated mnemonics, one program per string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut toks = s.split_whitespace().peekable();
        let mut code = Vec::new();
        let bad = |t: &str| ToyError::BadMnemonic(t.to_string());
        while let Some(tok) = toks.next() {
            let operand = |toks: &mut std::iter::Peekable<std::str::SplitWhitespace>| {
                toks.next()
                    .ok_or_else(|| bad(tok))?
                    .parse::<u64>()
                    .map_err(|_| bad(tok))
            };
            let instr = match tok.to_ascii_uppercase().as_str() {
                "PUSH" => Instr::Push(operand(&mut toks)?),
                "DUP" => Instr::Dup,
                "DEC" => Instr::Dec,
                "ADD" => Instr::Add,
                "SUB" => Instr::Sub,
                "MUL" => Instr::Mul,
                "EQ" => Instr::Eq,
                "LT" => Instr::Lt,
                "JMP" => Instr::Jmp(operand(&mut toks)? as u32),
                "JZ" => Instr::Jz(operand(&mut toks)? as u32),
                "INPUT" => Instr::Input,
                "ORACLE" => Instr::Oracle,
                "EMIT0" => Instr::Emit0,
                "EMIT1" => Instr::Emit1,
                "HALT" => Instr::Halt,
                "HALTSTR" => Instr::HaltStr,
                other => return Err(bad(other)),
            };
            code.push(instr);
        }
        if code.is_empty() {
            return Err(ToyError::BadMnemonic("empty program".into()));
        }
        Ok(ToyProgram::new(code))
    }
}

impl Serialize for ToyProgram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ToyProgram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All programs whose codeword is at most `max_code_bits` long, ordered by
/// (codeword length, componentwise instruction order). Index in this list is
/// the program's code number.
pub fn enumerate_programs(max_code_bits: u64) -> Vec<ToyProgram> {
    let mut out = Vec::new();
    let mut current: Vec<Instr> = Vec::new();
    // header for a j-instruction program costs 1 + gamma_len(j); grow greedily
    fn rec(current: &mut Vec<Instr>, body_bits: u64, max: u64, out: &mut Vec<ToyProgram>) {
        if !current.is_empty() {
            let total = 1 + gamma_len(current.len() as u64) + body_bits;
            if total <= max {
                out.push(ToyProgram::new(current.clone()));
            }
        }
        // smallest possible continuation: one more 4-bit instruction
        let header_next = 1 + gamma_len(current.len() as u64 + 1);
        if header_next + body_bits + 4 > max {
            return;
        }
        let budget = max - header_next - body_bits;
        for instr in instructions_fitting(budget) {
            current.push(instr);
            rec(current, body_bits + instr.code_bits(), max, out);
            current.pop();
        }
    }
    rec(&mut current, 0, max_code_bits, &mut out);
    out.sort_by(|a, b| (a.code_bits(), &a.code).cmp(&(b.code_bits(), &b.code)));
    out
}

/// Instructions with code width ≤ `budget`, in componentwise order.
fn instructions_fitting(budget: u64) -> Vec<Instr> {
    let mut out = Vec::new();
    let operands = |f: &mut dyn FnMut(u64) -> Instr, out: &mut Vec<Instr>| {
        let mut v = 0u64;
        while 4 + gamma_len(v + 1) <= budget {
            out.push(f(v));
            v += 1;
        }
    };
    operands(&mut |v| Instr::Push(v), &mut out);
    if budget >= 4 {
        out.extend([
            Instr::Dup,
            Instr::Dec,
            Instr::Add,
            Instr::Sub,
            Instr::Mul,
            Instr::Eq,
            Instr::Lt,
        ]);
    }
    operands(&mut |v| Instr::Jmp(v as u32), &mut out);
    operands(&mut |v| Instr::Jz(v as u32), &mut out);
    if budget >= 4 {
        out.extend([
            Instr::Input,
            Instr::Oracle,
            Instr::Emit0,
            Instr::Emit1,
            Instr::Halt,
            Instr::HaltStr,
        ]);
    }
    out.sort();
    out
}
