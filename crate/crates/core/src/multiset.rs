//! Multisets of lattice vectors: the canonical encoding of an integral zonotope.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{is_primitive, primitive_part};
use crate::error::{check_dim, Error, Result};

/// Map from lattice vector to positive multiplicity.
///
/// Canonical multisets have primitive keys only; they are in bijection with
/// integral zonotopes having one vertex at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorMultiset {
    d: usize,
    entries: BTreeMap<Vec<i64>, u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MultisetFile {
    Entries { d: usize, entries: Vec<Entry> },
    Vectors { d: usize, generators: Vec<Vec<i64>> },
}

#[derive(Serialize, Deserialize)]
struct Entry {
    v: Vec<i64>,
    mult: u64,
}

impl GeneratorMultiset {
    /// The empty multiset in dimension `d`.
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            entries: BTreeMap::new(),
        }
    }

    /// Build from `(primitive key, multiplicity)` pairs; repeated keys add up.
    ///
    /// # Errors
    /// Non-primitive keys, wrong lengths or zero multiplicities.
    pub fn from_entries(d: usize, entries: impl IntoIterator<Item = (Vec<i64>, u64)>) -> Result<Self> {
        let mut out = Self::empty(d);
        for (k, m) in entries {
            check_dim(d, k.len())?;
            if !is_primitive(&k) {
                return Err(Error::InvalidInput(format!("key {k:?} is not primitive")));
            }
            if m == 0 {
                return Err(Error::InvalidInput("zero multiplicity".into()));
            }
            *out.entries.entry(k).or_insert(0) += m;
        }
        Ok(out)
    }

    /// Multiset of arbitrary nonzero vectors (used for non-strict partitions).
    pub fn from_vectors_unchecked(d: usize, vectors: impl IntoIterator<Item = Vec<i64>>) -> Self {
        let mut out = Self::empty(d);
        for v in vectors {
            *out.entries.entry(v).or_insert(0) += 1;
        }
        out
    }

    /// Replace each `v = h·w` (`w` primitive) by `h` copies of `w`.
    ///
    /// # Errors
    /// A zero vector or a length mismatch.
    pub fn canonicalize(d: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let mut out = Self::empty(d);
        for v in vectors {
            check_dim(d, v.len())?;
            let (h, w) = primitive_part(v).ok_or_else(|| Error::InvalidInput("zero vector".into()))?;
            *out.entries.entry(w).or_insert(0) += h as u64;
        }
        Ok(out)
    }

    /// Canonical form of this multiset (identity when already canonical).
    pub fn canonical(&self) -> Self {
        let mut out = Self::empty(self.d);
        for (v, &m) in &self.entries {
            let (h, w) = primitive_part(v).expect("nonzero keys");
            *out.entries.entry(w).or_insert(0) += h as u64 * m;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, u64)> {
        self.entries.iter().map(|(k, &m)| (k, m))
    }

    /// Number of distinct keys, `|G(T)|`.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.entries.keys().all(|k| is_primitive(k))
    }

    /// Add `mult` copies of `key`.
    pub fn insert(&mut self, key: Vec<i64>, mult: u64) {
        if mult > 0 {
            *self.entries.entry(key).or_insert(0) += mult;
        }
    }

    /// Endpoint `X(ω) = Σ ω(x) x`.
    pub fn endpoint(&self) -> Vec<i64> {
        let mut x = vec![0i64; self.d];
        for (k, &m) in &self.entries {
            for (a, &b) in x.iter_mut().zip(k) {
                *a += m as i64 * b;
            }
        }
        x
    }

    /// Multiset union (multiplicities add).
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, &m) in &other.entries {
            out.insert(k.clone(), m);
        }
        out
    }

    /// Parse `{"d", "entries": [{"v", "mult"}]}` or `{"d", "generators": [...]}`;
    /// the second form is canonicalized.
    pub fn from_json(text: &str) -> Result<Self> {
        let f: MultisetFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match f {
            MultisetFile::Entries { d, entries } => {
                Self::from_entries(d, entries.into_iter().map(|e| (e.v, e.mult)))
            }
            MultisetFile::Vectors { d, generators } => Self::canonicalize(d, &generators),
        }
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|(k, &m)| Entry { v: k.clone(), mult: m })
            .collect();
        serde_json::json!({"d": self.d, "entries": entries}).to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(GeneratorMultiset::empty(2).endpoint(), vec![0, 0]);
        let w = GeneratorMultiset::from_entries(2, [(vec![1, 0], 2), (vec![0, 1], 1)]).unwrap();
        assert_eq!(w.endpoint(), vec![2, 1]);
        let c = GeneratorMultiset::canonicalize(2, &[vec![2, 2]]).unwrap();
        assert_eq!(c.endpoint(), vec![2, 2]);
    }

    #[test]
    fn canonical_forms() {
        let c = GeneratorMultiset::canonicalize(2, &[vec![2, 2]]).unwrap();
        assert_eq!(c.entries().get(&vec![1, 1]), Some(&2));
        let c = GeneratorMultiset::canonicalize(2, &[vec![4, 6]]).unwrap();
        assert_eq!(c.entries().get(&vec![2, 3]), Some(&2));
        let u = GeneratorMultiset::canonicalize(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(u.support_size(), 2);
        assert!(GeneratorMultiset::canonicalize(2, &[vec![0, 0]]).is_err());
        assert!(GeneratorMultiset::from_entries(2, [(vec![2, 0], 1)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let w = GeneratorMultiset::from_entries(3, [(vec![1, 0, 0], 2), (vec![1, 2, 3], 1)]).unwrap();
        assert_eq!(GeneratorMultiset::from_json(&w.to_json()).unwrap(), w);
        let g = GeneratorMultiset::from_json(r#"{"d":2,"generators":[[2,0],[0,1]]}"#).unwrap();
        assert_eq!(g.entries().get(&vec![1, 0]), Some(&2));
    }
}
