//! Plans: the random caps that drive the passive/active guessing.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use bushy_core::{BushyError, GrowthFn};

/// The caps `n_i`, drawn once at initialization, plus error counters'
/// starting state. `1 ≤ n_i ≤ N(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FireworksPlan {
    #[serde(with = "bushy_core::serde_nat_vec")]
    pub caps: Vec<BigUint>,
}

impl FireworksPlan {
    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn cap(&self, i: usize) -> &BigUint {
        &self.caps[i]
    }

    /// The same plan with one cap replaced (for replay experiments).
    pub fn with_cap(&self, i: usize, value: BigUint) -> FireworksPlan {
        let mut caps = self.caps.clone();
        caps[i] = value;
        FireworksPlan { caps }
    }
}

/// Draw `n_i` uniformly from `[1, N(i)]`, independently per requirement.
/// Reproducible from the rng seed.
pub fn draw_plan(
    n_fn: &GrowthFn,
    req_count: usize,
    rng: &mut impl Rng,
) -> Result<FireworksPlan, BushyError> {
    let mut caps = Vec::with_capacity(req_count);
    for i in 0..req_count {
        let n = n_fn.eval(i as u64)?;
        if n.is_zero() {
            return Err(BushyError::ValueTooLarge);
        }
        caps.push(rng.gen_biguint_below(&n) + 1u32);
    }
    Ok(FireworksPlan { caps })
}

/// The failure-budget sum `Σ_{i<req_count} 1/N(i)`, exact.
pub fn stuck_bound(n_fn: &GrowthFn, req_count: usize) -> Result<BigRational, BushyError> {
    let mut acc = BigRational::zero();
    for i in 0..req_count {
        let n = n_fn.eval(i as u64)?;
        if n.is_zero() {
            return Err(BushyError::ValueTooLarge);
        }
        acc += BigRational::new(BigInt::one(), BigInt::from(n));
    }
    Ok(acc)
}
