//! Bushy-tree combinatorics at desk scale: strings of naturals, growth
//! functions, big/small decisions with extractable witnesses, closures, and
//! seeded downward random walks with exact avoidance bounds.
//!
//! Everything is decided inside explicit (depth, width) caps; "small" always
//! means "small within the caps". All operations are pure given their inputs
//! and the supplied random source.

mod bigness;
mod enumset;
mod error;
mod growth;
mod string;
mod walk;
mod witness;

pub use bigness::{closure, is_big_bounded, is_big_bounded_with, Caps};
pub use enumset::{EnumerableSet, FiniteSet, StagedSet};
pub use error::BushyError;
pub use growth::{GrowthFn, MAX_SHIFT_BITS};
pub use string::OmegaString;
pub use walk::{
    avoidance_lower_bound, exact_hit_probability, max_small_closed_set, random_walk, Restriction,
    WalkResult,
};
pub use witness::{verify_witness, verify_witness_with, WitnessTree};

/// Serde helpers: big naturals as decimal strings.
pub mod serde_nat {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helpers: vectors of big naturals as decimal strings.
pub mod serde_nat_vec {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        strings
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde helper: rationals as `"p/q"` strings.
pub mod serde_ratio {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        let (n, q) = s
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom("expected p/q"))?;
        let n: BigInt = n.parse().map_err(serde::de::Error::custom)?;
        let q: BigInt = q.parse().map_err(serde::de::Error::custom)?;
        Ok(BigRational::new(n, q))
    }
}
