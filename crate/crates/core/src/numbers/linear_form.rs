//! Exact sign determination for finite rational combinations of set-coded
//! sums and isolated powers `t_j = 2^-(2^j)`.
//!
//! Write the value as `offset + sum_i c(i) t_i` where `c(i)` collects every
//! coefficient attached to index `i`. Only finitely many distinct `c(i)`
//! values occur (one per cell of the endpoint arrangement, plus the isolated
//! points), so `|c(i)| <= C` and every nonzero `c(i)` has `|c(i)| >= 1/D`.
//! Because `t_{i+1} = t_i^2`, the tail after index `i` is below `2 C t_{i+1}`;
//! once `2^(2^i) > 2 C D` the first nonzero coefficient decides the sign.
//! Finding that coefficient is a least-index search over the active cells.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::coded::CodedReal;
use super::enumeration::{min_index_at_least, RationalEnumeration, Span, DEFAULT_DEPTH_CAP};
use super::interval_set::IntervalSet;
use super::rational::{floor_log2, pow2, Rational};
use crate::error::{Error, Result};

/// Default cap on how many coefficient events are inspected after the
/// exact prefix before a comparison gives up.
pub const DEFAULT_MAX_PRECISION: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Unresolved,
}

impl Comparison {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }

    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Equal => Some(Ordering::Equal),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Unresolved => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            other => other,
        }
    }
}

fn sign_of(q: &Rational) -> Comparison {
    Comparison::from_ordering(q.cmp(&Rational::zero()))
}

#[derive(Clone, Debug, Default)]
pub struct LinearForm {
    offset: Rational,
    sets: Vec<(Rational, IntervalSet)>,
    points: BTreeMap<BigUint, Rational>,
}

impl LinearForm {
    pub fn from_coded(x: &CodedReal) -> Self {
        let mut form = LinearForm { offset: x.offset().clone(), ..Default::default() };
        for t in x.terms() {
            form.sets.push((&t.coeff * pow2(-(t.schedule.k as i64)), t.index_set.clone()));
        }
        form
    }

    pub fn add_rational(&mut self, q: &Rational) -> &mut Self {
        self.offset += q;
        self
    }

    pub fn add_coded(&mut self, x: &CodedReal, factor: &Rational) -> &mut Self {
        self.offset += x.offset() * factor;
        for t in x.terms() {
            self.sets
                .push((&t.coeff * factor * pow2(-(t.schedule.k as i64)), t.index_set.clone()));
        }
        self
    }

    /// Adds `coeff * 2^-(2^j + k)`, i.e. `coeff * gamma_{k,j}` for arbitrary `j`.
    pub fn add_gamma(&mut self, coeff: &Rational, k: u32, j: &BigUint) -> &mut Self {
        let c = coeff * pow2(-(k as i64));
        let entry = self.points.entry(j.clone()).or_insert_with(Rational::zero);
        *entry += c;
        self
    }

    fn weight_at(&self, x: &Rational) -> Rational {
        self.sets
            .iter()
            .filter(|(_, s)| s.contains(x))
            .fold(Rational::zero(), |acc, (w, _)| acc + w)
    }

    fn point_coeff(&self, j: &BigUint) -> Rational {
        self.points.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Cells of the endpoint arrangement carrying a nonzero weight.
    fn active_cells(&self) -> Vec<(Span, Rational)> {
        let mut ends: Vec<&Rational> = self.sets.iter().flat_map(|(_, s)| s.endpoints()).collect();
        ends.sort();
        ends.dedup();
        ends.windows(2)
            .filter_map(|w| {
                let weight = self.weight_at(w[0]);
                (!weight.is_zero())
                    .then(|| (Span::half_open(w[0].clone(), w[1].clone()), weight))
            })
            .collect()
    }

    /// The sign of the represented real number.
    pub fn sign(&self, max_precision: u64) -> Comparison {
        self.sign_inner(max_precision).unwrap_or(Comparison::Unresolved)
    }

    fn sign_inner(&self, max_precision: u64) -> Result<Comparison> {
        let cells = self.active_cells();
        let points: Vec<(&BigUint, &Rational)> =
            self.points.iter().filter(|(_, c)| !c.is_zero()).collect();
        if cells.is_empty() && points.is_empty() {
            return Ok(sign_of(&self.offset));
        }
        let cmax = cells.iter().map(|(_, w)| w.abs()).max().unwrap_or_else(Rational::zero)
            + points.iter().fold(Rational::zero(), |acc, (_, c)| acc + c.abs());
        let denom = cells
            .iter()
            .map(|(_, w)| w)
            .chain(points.iter().map(|(_, c)| *c))
            .chain(std::iter::once(&self.offset))
            .fold(num_bigint::BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let bound = &cmax * Rational::from_integer(denom) * Rational::from_integer(2.into());
        // Least i0 with 2^(2^i0) > bound.
        let log = if bound >= Rational::one() { floor_log2(&bound) } else { -1 };
        let mut i0: u64 = 0;
        while (1i64 << i0) <= log {
            i0 += 1;
        }
        if i0 > max_precision.max(24) {
            return Ok(Comparison::Unresolved);
        }

        let q = RationalEnumeration;
        let mut acc = self.offset.clone();
        for i in 0..=i0 {
            let idx = BigUint::from(i);
            let c = self.weight_at(&q.value(i)) + self.point_coeff(&idx);
            let t = pow2(-(1i64 << i));
            acc += c * &t;
            let tail = &cmax * pow2(1 - (1i64 << (i + 1)));
            if acc.abs() > tail {
                return Ok(sign_of(&acc));
            }
        }
        if !acc.is_zero() {
            // Unreachable by the choice of i0; kept as a guard.
            return Err(Error::Unresolved("prefix did not separate".into()));
        }

        // The prefix cancels exactly: the first nonzero coefficient wins.
        let mut cursor = BigUint::from(i0 + 1);
        let mut next_in_cell: Vec<Option<(BigUint, Rational)>> = Vec::with_capacity(cells.len());
        for (span, _) in &cells {
            next_in_cell.push(min_index_at_least(span, &cursor, DEFAULT_DEPTH_CAP)?);
        }
        for _ in 0..max_precision {
            for (slot, (span, _)) in next_in_cell.iter_mut().zip(&cells) {
                if let Some((i, _)) = slot {
                    if *i < cursor {
                        *slot = min_index_at_least(span, &cursor, DEFAULT_DEPTH_CAP)?;
                    }
                }
            }
            let from_cells = next_in_cell.iter().flatten().map(|(i, _)| i).min();
            let from_points = points.iter().map(|(j, _)| *j).filter(|j| **j >= cursor).min();
            let event = match (from_cells, from_points) {
                (None, None) => return Ok(Comparison::Equal),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (Some(a), Some(b)) => a.min(b).clone(),
            };
            let value = q.value_big(&event);
            let c = self.weight_at(&value) + self.point_coeff(&event);
            if !c.is_zero() {
                return Ok(sign_of(&c));
            }
            cursor = event + 1u32;
        }
        Ok(Comparison::Unresolved)
    }
}

/// Three-valued comparison of two coded reals.
pub fn compare(x: &CodedReal, y: &CodedReal, max_precision: u64) -> Comparison {
    if x == y {
        return Comparison::Equal;
    }
    if let (Some(a), Some(b)) = (x.as_rational(), y.as_rational()) {
        return Comparison::from_ordering(a.cmp(b));
    }
    let mut form = LinearForm::from_coded(x);
    form.add_coded(y, &-Rational::one());
    form.sign(max_precision)
}

/// Value equality. Identical normal forms are equal outright; otherwise the
/// sign procedure must either separate the values or prove the difference
/// vanishes.
pub fn equals(x: &CodedReal, y: &CodedReal, max_precision: u64) -> Result<bool> {
    match compare(x, y, max_precision) {
        Comparison::Equal => Ok(true),
        Comparison::Less | Comparison::Greater => Ok(false),
        Comparison::Unresolved => Err(Error::Unresolved(format!(
            "could not decide whether {x} equals {y}"
        ))),
    }
}

/// Sign of `x - c * gamma_{k,j}` for an index `j` that may be far too large
/// to materialize `gamma_{k,j}` as a rational.
pub fn compare_with_gamma(
    x: &CodedReal,
    c: &Rational,
    k: u32,
    j: &BigUint,
    max_precision: u64,
) -> Comparison {
    let mut form = LinearForm::from_coded(x);
    form.add_gamma(&-c, k, j);
    form.sign(max_precision)
}
