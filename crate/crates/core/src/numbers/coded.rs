//! Set-coded reals `q0 + sum_j q_j * <gamma_k, B_j>` and their enclosures.
//!
//! `<gamma_k, B>` is the sum of `2^-(2^i + k)` over all indices `i` whose
//! enumerated rational `Q(i)` lies in `B`. Index sets are [`IntervalSet`]s,
//! so each one is either empty or infinite.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::enumeration::RationalEnumeration;
use super::interval_set::IntervalSet;
use super::rational::{format_rational, parse_rational, pow2, Rational};

/// `F_k(n) = 2^n + k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentSchedule {
    pub k: u32,
}

impl ExponentSchedule {
    pub fn new(k: u32) -> Self {
        ExponentSchedule { k }
    }

    pub fn exponent(&self, n: u32) -> BigUint {
        (BigUint::one() << n) + self.k
    }

    /// `gamma_{k,i} = 2^-F_k(i)`. The result has `2^i + k` bits, so `i` is
    /// limited to values where that is materializable.
    pub fn gamma(&self, i: u32) -> Rational {
        assert!(i < 40, "gamma_{{k,{i}}} is too small to materialize");
        pow2(-((1i64 << i) + self.k as i64))
    }
}

pub fn gamma(schedule: ExponentSchedule, i: u32) -> Rational {
    schedule.gamma(i)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub coeff: Rational,
    pub schedule: ExponentSchedule,
    pub index_set: IntervalSet,
}

/// Rigorous bounds `lo <= value <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn point(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_within(&self, outer: &Enclosure) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CodedReal {
    offset: Rational,
    terms: Vec<Term>,
}

impl CodedReal {
    /// Builds a normalized value: equal `(schedule, index_set)` pairs are
    /// merged, empty sets and zero coefficients dropped, terms sorted.
    pub fn new(offset: Rational, terms: Vec<Term>) -> Self {
        let mut terms: Vec<Term> = terms
            .into_iter()
            .filter(|t| !t.coeff.is_zero() && !t.index_set.is_empty())
            .collect();
        terms.sort_by(|a, b| {
            (a.schedule, &a.index_set).cmp(&(b.schedule, &b.index_set))
        });
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.schedule == t.schedule && last.index_set == t.index_set => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        CodedReal { offset, terms: merged }
    }

    pub fn zero() -> Self {
        CodedReal::default()
    }

    pub fn rational(q: Rational) -> Self {
        CodedReal { offset: q, terms: Vec::new() }
    }

    /// `<gamma_k, set>`.
    pub fn set_sum(schedule: ExponentSchedule, set: IntervalSet) -> Self {
        CodedReal::new(
            Rational::zero(),
            vec![Term { coeff: Rational::one(), schedule, index_set: set }],
        )
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.offset)
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.offset.is_zero()
    }

    pub fn scale(&self, factor: &Rational) -> CodedReal {
        CodedReal::new(
            &self.offset * factor,
            self.terms
                .iter()
                .map(|t| Term { coeff: &t.coeff * factor, ..t.clone() })
                .collect(),
        )
    }

    /// Encloses the value by summing every index `i <= n` exactly and
    /// bounding each tail by `|coeff| * 2^(1 - F_k(n + 1))`.
    pub fn eval(&self, n: u32) -> Enclosure {
        let q = RationalEnumeration;
        let values: Vec<Rational> = (0..=n as u64).map(|i| q.value(i)).collect();
        let mut lo = self.offset.clone();
        let mut hi = self.offset.clone();
        for t in &self.terms {
            let mut partial = Rational::zero();
            for (i, v) in values.iter().enumerate() {
                if t.index_set.contains(v) {
                    partial += t.schedule.gamma(i as u32);
                }
            }
            let partial = &t.coeff * partial;
            let tail = &t.coeff * (t.schedule.gamma(n + 1) * Rational::from_integer(2.into()));
            lo += &partial;
            hi += &partial;
            if tail.is_positive() {
                hi += tail;
            } else {
                lo += tail;
            }
        }
        Enclosure { lo, hi }
    }
}

impl From<Rational> for CodedReal {
    fn from(q: Rational) -> Self {
        CodedReal::rational(q)
    }
}

impl Add for &CodedReal {
    type Output = CodedReal;
    fn add(self, rhs: &CodedReal) -> CodedReal {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        CodedReal::new(&self.offset + &rhs.offset, terms)
    }
}

impl Add for CodedReal {
    type Output = CodedReal;
    fn add(self, rhs: CodedReal) -> CodedReal {
        &self + &rhs
    }
}

impl Neg for &CodedReal {
    type Output = CodedReal;
    fn neg(self) -> CodedReal {
        self.scale(&-Rational::one())
    }
}

impl Sub for &CodedReal {
    type Output = CodedReal;
    fn sub(self, rhs: &CodedReal) -> CodedReal {
        self + &(-rhs)
    }
}

impl Mul<&Rational> for &CodedReal {
    type Output = CodedReal;
    fn mul(self, rhs: &Rational) -> CodedReal {
        self.scale(rhs)
    }
}

impl fmt::Display for CodedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.offset))?;
        for t in &self.terms {
            write!(f, " + {}*<g{}, {}>", format_rational(&t.coeff), t.schedule.k, t.index_set)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    coeff: String,
    k: u32,
    intervals: IntervalSet,
}

#[derive(Serialize, Deserialize)]
struct CodedWire {
    offset: String,
    terms: Vec<TermWire>,
}

impl Serialize for CodedReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CodedWire {
            offset: format_rational(&self.offset),
            terms: self
                .terms
                .iter()
                .map(|t| TermWire {
                    coeff: format_rational(&t.coeff),
                    k: t.schedule.k,
                    intervals: t.index_set.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CodedReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = CodedWire::deserialize(d)?;
        let offset = parse_rational(&wire.offset).map_err(serde::de::Error::custom)?;
        let mut terms = Vec::with_capacity(wire.terms.len());
        for t in wire.terms {
            terms.push(Term {
                coeff: parse_rational(&t.coeff).map_err(serde::de::Error::custom)?,
                schedule: ExponentSchedule::new(t.k),
                index_set: t.intervals,
            });
        }
        Ok(CodedReal::new(offset, terms))
    }
}
