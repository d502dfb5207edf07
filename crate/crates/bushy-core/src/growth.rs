//! Growth functions: depth-indexed bounds used for bushiness and draw widths.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::BushyError;

/// Hard cap on shift amounts so runaway tower values fail cleanly instead of
/// exhausting memory (2^27 bits ≈ 16 MiB per value).
pub const MAX_SHIFT_BITS: u64 = 1 << 27;

/// A total function from depths to positive bounds, kept in one of a few
/// declared representations so instances serialize exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthFn {
    /// Closed form: constant `value` at every depth.
    Const {
        #[serde(with = "crate::serde_nat")]
        value: BigUint,
    },
    /// Closed form: `i ↦ 2^(i + offset)`.
    Pow2 { offset: u64 },
    /// Closed form: `i ↦ slope·i + offset`.
    Linear {
        #[serde(with = "crate::serde_nat")]
        slope: BigUint,
        #[serde(with = "crate::serde_nat")]
        offset: BigUint,
    },
    /// Finite table with an explicit horizon; evaluation past it errors.
    Table {
        #[serde(with = "crate::serde_nat_vec")]
        values: Vec<BigUint>,
    },
    /// Exact pointwise sum of the terms.
    SumOf { terms: Vec<GrowthFn> },
}

impl GrowthFn {
    pub fn constant(v: impl Into<BigUint>) -> Self {
        GrowthFn::Const { value: v.into() }
    }

    /// `i ↦ 2^(i + offset)`.
    pub fn pow2_plus(offset: u64) -> Self {
        GrowthFn::Pow2 { offset }
    }

    /// `i ↦ slope·i + offset`.
    pub fn linear(slope: impl Into<BigUint>, offset: impl Into<BigUint>) -> Self {
        GrowthFn::Linear { slope: slope.into(), offset: offset.into() }
    }

    pub fn table(values: Vec<BigUint>) -> Self {
        GrowthFn::Table { values }
    }

    pub fn table_u64(values: &[u64]) -> Self {
        GrowthFn::Table {
            values: values.iter().map(|&v| BigUint::from(v)).collect(),
        }
    }

    pub fn sum_of(terms: Vec<GrowthFn>) -> Self {
        GrowthFn::SumOf { terms }
    }

    /// Evaluate at depth `i`.
    pub fn eval(&self, i: u64) -> Result<BigUint, BushyError> {
        match self {
            GrowthFn::Const { value } => Ok(value.clone()),
            GrowthFn::Pow2 { offset } => {
                let shift = i
                    .checked_add(*offset)
                    .filter(|&s| s <= MAX_SHIFT_BITS)
                    .ok_or(BushyError::ValueTooLarge)?;
                Ok(BigUint::one() << shift)
            }
            GrowthFn::Linear { slope, offset } => Ok(slope * i + offset),
            GrowthFn::Table { values } => values
                .get(usize::try_from(i).map_err(|_| BushyError::BeyondHorizon { depth: i })?)
                .cloned()
                .ok_or(BushyError::BeyondHorizon { depth: i }),
            GrowthFn::SumOf { terms } => {
                let mut acc = BigUint::zero();
                for t in terms {
                    acc += t.eval(i)?;
                }
                Ok(acc)
            }
        }
    }

    /// Evaluation clamped into `usize`, for grid-sized uses.
    pub fn eval_usize(&self, i: u64) -> Result<usize, BushyError> {
        let v = self.eval(i)?;
        usize::try_from(&v).map_err(|_| BushyError::ValueTooLarge)
    }

    /// Evaluate at an arbitrarily large point, where the representation
    /// supports it.
    pub fn eval_big(&self, arg: &BigUint) -> Result<BigUint, BushyError> {
        match self {
            GrowthFn::Const { value } => Ok(value.clone()),
            GrowthFn::Linear { slope, offset } => Ok(slope * arg + offset),
            GrowthFn::SumOf { terms } => {
                let mut acc = BigUint::zero();
                for t in terms {
                    acc += t.eval_big(arg)?;
                }
                Ok(acc)
            }
            _ => {
                let i = u64::try_from(arg).map_err(|_| BushyError::ValueTooLarge)?;
                self.eval(i)
            }
        }
    }

    /// The declared horizon, if the representation has one.
    pub fn horizon(&self) -> Option<u64> {
        match self {
            GrowthFn::Table { values } => Some(values.len() as u64),
            GrowthFn::SumOf { terms } => terms.iter().filter_map(|t| t.horizon()).min(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_exact() {
        let g = GrowthFn::sum_of(vec![GrowthFn::constant(3u32), GrowthFn::pow2_plus(4)]);
        // (g1+g2)(i) = g1(i) + g2(i), checked pointwise
        for i in 0..10 {
            assert_eq!(
                g.eval(i).unwrap(),
                BigUint::from(3u32) + (BigUint::one() << (i + 4))
            );
        }
    }

    #[test]
    fn table_has_horizon() {
        let g = GrowthFn::table_u64(&[1, 2, 3]);
        assert_eq!(g.eval(2).unwrap(), BigUint::from(3u32));
        assert!(matches!(
            g.eval(3),
            Err(BushyError::BeyondHorizon { depth: 3 })
        ));
    }

    #[test]
    fn pow2_rejects_absurd_shift() {
        let g = GrowthFn::pow2_plus(u64::MAX);
        assert!(matches!(g.eval(1), Err(BushyError::ValueTooLarge)));
    }

    #[test]
    fn serde_tags_match_declared_representations() {
        let g = GrowthFn::sum_of(vec![GrowthFn::constant(2u32)]);
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("sum-of"));
        let back: GrowthFn = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
