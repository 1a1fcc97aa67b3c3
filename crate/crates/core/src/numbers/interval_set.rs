//! Finite disjoint unions of half-open rational intervals `[a, b)` inside
//! `Q>=0`, kept in a unique normal form.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalSet {
    blocks: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// `[a, b)`; empty when `a >= b`.
    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        IntervalSet::from_blocks(vec![(a, b)])
    }

    /// Normalizes arbitrary (possibly overlapping, unsorted) blocks. Blocks
    /// with `a >= b` are dropped; negative endpoints are rejected.
    pub fn from_blocks(mut blocks: Vec<(Rational, Rational)>) -> Result<Self> {
        if let Some((a, _)) = blocks.iter().find(|(a, b)| a < b && a.is_negative()) {
            return Err(Error::Domain(format!("interval starts below zero at {a}")));
        }
        blocks.retain(|(a, b)| a < b);
        blocks.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(blocks.len());
        for (a, b) in blocks {
            match merged.last_mut() {
                Some((_, last_b)) if a <= *last_b => {
                    if b > *last_b {
                        *last_b = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalSet { blocks: merged })
    }

    pub fn blocks(&self) -> &[(Rational, Rational)] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // Blocks are sorted, so the candidate is the last block starting at or before x.
        let idx = self.blocks.partition_point(|(a, _)| a <= x);
        idx > 0 && *x < self.blocks[idx - 1].1
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        IntervalSet::from_blocks(blocks).expect("inputs already validated")
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.blocks.len() && j < other.blocks.len() {
            let (a1, b1) = &self.blocks[i];
            let (a2, b2) = &other.blocks[j];
            let lo = if a1 > a2 { a1 } else { a2 };
            let hi = if b1 < b2 { b1 } else { b2 };
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { blocks: out }
    }

    pub fn is_disjoint(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// All block endpoints in increasing order.
    pub fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.blocks.iter().flat_map(|(a, b)| [a, b])
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|(a, b)| format!("[{}, {})", format_rational(a), format_rational(b)))
            .collect();
        write!(f, "{}", parts.join(" u "))
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.blocks.len()))?;
        for (a, b) in &self.blocks {
            seq.serialize_element(&[format_rational(a), format_rational(b)])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<[String; 2]> = Vec::deserialize(d)?;
        let mut blocks = Vec::with_capacity(raw.len());
        for [a, b] in raw {
            let a = super::rational::parse_rational(&a).map_err(serde::de::Error::custom)?;
            let b = super::rational::parse_rational(&b).map_err(serde::de::Error::custom)?;
            blocks.push((a, b));
        }
        IntervalSet::from_blocks(blocks).map_err(serde::de::Error::custom)
    }
}
