//! Finite strings of naturals: the nodes of the full branching tree.

use num_bigint::BigUint;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A finite sequence of naturals. Entry `i` is the child index chosen at
/// depth `i`, so the empty string is the root of the tree.
///
/// Ordering is lexicographic on the value vector, which puts every prefix
/// before all of its extensions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaString {
    values: Vec<BigUint>,
}

impl OmegaString {
    /// The empty string λ.
    pub fn root() -> Self {
        OmegaString { values: Vec::new() }
    }

    pub fn new(values: Vec<BigUint>) -> Self {
        OmegaString { values }
    }

    pub fn from_u64s(values: &[u64]) -> Self {
        OmegaString {
            values: values.iter().map(|&v| BigUint::from(v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<&BigUint> {
        self.values.get(i)
    }

    /// The string extended by one more value.
    pub fn child(&self, value: impl Into<BigUint>) -> Self {
        let mut values = self.values.clone();
        values.push(value.into());
        OmegaString { values }
    }

    /// Immediate parent, or `None` for λ.
    pub fn parent(&self) -> Option<Self> {
        if self.values.is_empty() {
            None
        } else {
            Some(OmegaString {
                values: self.values[..self.values.len() - 1].to_vec(),
            })
        }
    }

    /// First `n` values (whole string if `n ≥ len`).
    pub fn prefix(&self, n: usize) -> Self {
        OmegaString {
            values: self.values[..n.min(self.values.len())].to_vec(),
        }
    }

    /// σ ⪯ τ: is `self` an initial segment of `other`?
    pub fn is_prefix_of(&self, other: &OmegaString) -> bool {
        self.values.len() <= other.values.len()
            && self.values[..] == other.values[..self.values.len()]
    }

    /// Comparable in the prefix partial order (one extends the other).
    pub fn comparable_with(&self, other: &OmegaString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// All proper and improper prefixes, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = OmegaString> + '_ {
        (0..=self.values.len()).map(move |n| self.prefix(n))
    }
}

impl From<Vec<u64>> for OmegaString {
    fn from(v: Vec<u64>) -> Self {
        OmegaString::from_u64s(&v)
    }
}

impl fmt::Display for OmegaString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "⟩")
    }
}

// Values are serialized as decimal strings so traces stay readable and
// stable no matter how large the draws get.
impl Serialize for OmegaString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.values.len()))?;
        for v in &self.values {
            seq.serialize_element(&v.to_string())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for OmegaString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OmegaString;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a sequence of decimal strings")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut values = Vec::new();
                while let Some(s) = seq.next_element::<String>()? {
                    let v = s
                        .parse::<BigUint>()
                        .map_err(|e| serde::de::Error::custom(format!("bad natural: {e}")))?;
                    values.push(v);
                }
                Ok(OmegaString { values })
            }
        }
        deserializer.deserialize_seq(V)
    }
}
