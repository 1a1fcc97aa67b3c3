//! Certificates of linear independence over `Q` for set-coded sums.
//!
//! [`IndependenceWitness`] certifies that `1` and the sums `<gamma_k, P_i>`
//! are independent: inside one block `S`, every `P_i` traces exactly
//! `[a, b_i)` with a common `a` and pairwise distinct `b_i`.
//! [`SumIndependence`] certifies that two sums of gauge-tagged components
//! are independent from the tags alone.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::coded::{CodedReal, ExponentSchedule, Term};
use super::interval_set::IntervalSet;
use super::rational::{floor_int, serde_rational, serde_rational_vec, Rational};
use crate::error::{Error, Result};
use crate::registry::{ValueRegistry, HUB_GAUGE};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceWitness {
    pub k: u32,
    pub sets: Vec<IntervalSet>,
    #[serde(with = "serde_rational")]
    pub block_lo: Rational,
    #[serde(with = "serde_rational")]
    pub block_hi: Rational,
    #[serde(with = "serde_rational")]
    pub a: Rational,
    #[serde(with = "serde_rational_vec")]
    pub b: Vec<Rational>,
}

impl IndependenceWitness {
    pub fn block(&self) -> IntervalSet {
        IntervalSet::interval(self.block_lo.clone(), self.block_hi.clone())
            .expect("validated block")
    }

    /// Re-derives every trace by interval intersection.
    pub fn verify(&self) -> std::result::Result<(), String> {
        if self.sets.is_empty() || self.sets.len() != self.b.len() {
            return Err("witness must name one b per set".into());
        }
        if self.block_lo >= self.block_hi {
            return Err("block is empty".into());
        }
        let block = IntervalSet::interval(self.block_lo.clone(), self.block_hi.clone())
            .map_err(|e| e.to_string())?;
        for (i, (set, b)) in self.sets.iter().zip(&self.b).enumerate() {
            if &self.a >= b {
                return Err(format!("b[{i}] does not exceed a"));
            }
            let expected = IntervalSet::interval(self.a.clone(), b.clone())
                .map_err(|e| e.to_string())?;
            if set.intersect(&block) != expected {
                return Err(format!("set {i} does not trace [a, b[{i}]) in the block"));
            }
        }
        let mut sorted: Vec<&Rational> = self.b.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err("b values are not distinct".into());
        }
        Ok(())
    }
}

fn single_block(set: &IntervalSet) -> Option<&(Rational, Rational)> {
    match set.blocks() {
        [only] => Some(only),
        _ => None,
    }
}

fn try_block(sets: &[IntervalSet], lo: &Rational, hi: &Rational, k: u32) -> Option<IndependenceWitness> {
    let block = IntervalSet::interval(lo.clone(), hi.clone()).ok()?;
    let mut a: Option<Rational> = None;
    let mut b = Vec::with_capacity(sets.len());
    for set in sets {
        let trace = set.intersect(&block);
        let (start, end) = single_block(&trace)?;
        match &a {
            None => a = Some(start.clone()),
            Some(common) if common != start => return None,
            _ => {}
        }
        b.push(end.clone());
    }
    let witness = IndependenceWitness {
        k,
        sets: sets.to_vec(),
        block_lo: lo.clone(),
        block_hi: hi.clone(),
        a: a?,
        b,
    };
    witness.verify().is_ok().then_some(witness)
}

/// Searches unit blocks `[n, n+1)` first, then blocks `[a, h)` anchored at
/// a common left endpoint. `None` is inconclusive, not a dependence proof.
pub fn independence_witness(
    terms: &[IntervalSet],
    schedule: ExponentSchedule,
) -> Option<IndependenceWitness> {
    if terms.is_empty() || terms.iter().any(|t| t.is_empty()) {
        return None;
    }
    let mut starts: Vec<Rational> = terms
        .iter()
        .flat_map(|t| t.blocks().iter().map(|(a, _)| a.clone()))
        .collect();
    starts.sort();
    starts.dedup();

    let mut units: Vec<BigInt> = starts.iter().map(floor_int).collect();
    units.dedup();
    for n in &units {
        let lo = Rational::from_integer(n.clone());
        let hi = &lo + Rational::one();
        if let Some(w) = try_block(terms, &lo, &hi, schedule.k) {
            return Some(w);
        }
    }

    for a in &starts {
        let mut ends = Vec::with_capacity(terms.len());
        let mut limit: Option<Rational> = None;
        for t in terms {
            let pos = t.blocks().iter().position(|(s, e)| s <= a && a < e);
            let Some(pos) = pos else { break };
            ends.push(t.blocks()[pos].1.clone());
            if let Some((next, _)) = t.blocks().get(pos + 1) {
                if limit.as_ref().is_none_or(|l| next < l) {
                    limit = Some(next.clone());
                }
            }
        }
        if ends.len() != terms.len() {
            continue;
        }
        let top = ends.iter().max().cloned().expect("nonempty");
        let hi = limit.unwrap_or_else(|| &top + Rational::one());
        if let Some(w) = try_block(terms, a, &hi, schedule.k) {
            return Some(w);
        }
    }
    None
}

/// A summand in the three-component shape: a block value tagged with its
/// gauge, or a hub value (rational part plus reserved-gauge terms).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub gauge: u64,
    pub value: CodedReal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumIndependence {
    pub x: Vec<Component>,
    pub y: Vec<Component>,
    /// A nonzero component present in exactly one of the two sums.
    pub distinguishing: Component,
}

fn smallest_prime_factor(n: &BigInt) -> Option<u64> {
    let n = n.to_u64()?;
    if n < 2 {
        return None;
    }
    (2..).take_while(|p| p * p <= n).find(|p| n % p == 0).or(Some(n))
}

/// The gauge that produced `term`, recognized from the prime powers in its
/// fractional endpoints.
pub fn gauge_of_term(term: &Term, registry: &ValueRegistry) -> Result<u64> {
    let mut prime: Option<u64> = None;
    for e in term.index_set.endpoints() {
        if e.denom().is_one() {
            continue;
        }
        let p = smallest_prime_factor(e.denom())
            .ok_or_else(|| Error::Domain(format!("endpoint {e} has no small prime tag")))?;
        let mut rest = e.denom().clone();
        let pb = BigInt::from(p);
        while rest.is_multiple_of(&pb) {
            rest /= &pb;
        }
        if !rest.is_one() || prime.is_some_and(|q| q != p) {
            return Err(Error::Domain(format!("term {} mixes value families", term.index_set)));
        }
        prime = Some(p);
    }
    let p = prime.ok_or_else(|| Error::Domain("term carries no family tag".into()))?;
    registry
        .gauge_for_prime(p)
        .ok_or_else(|| Error::Domain(format!("no registered family uses prime {p}")))
}

/// Splits a sum into gauge-tagged components; the offset joins the hub part.
pub fn components(x: &CodedReal, registry: &ValueRegistry) -> Result<Vec<Component>> {
    let mut hub_terms = Vec::new();
    let mut out = Vec::new();
    for t in x.terms() {
        let gauge = gauge_of_term(t, registry)?;
        if gauge == HUB_GAUGE {
            hub_terms.push(t.clone());
        } else {
            out.push(Component { gauge, value: CodedReal::new(Rational::zero(), vec![t.clone()]) });
        }
    }
    if !hub_terms.is_empty() || !x.offset().is_zero() {
        out.push(Component { gauge: HUB_GAUGE, value: CodedReal::new(x.offset().clone(), hub_terms) });
    }
    Ok(out)
}

fn shape_ok(parts: &[Component]) -> bool {
    let blocks: Vec<u64> =
        parts.iter().filter(|c| c.gauge != HUB_GAUGE).map(|c| c.gauge).collect();
    let hubs: Vec<&Component> = parts.iter().filter(|c| c.gauge == HUB_GAUGE).collect();
    let distinct_blocks = blocks.len() <= 2 && (blocks.len() < 2 || blocks[0] != blocks[1]);
    let hub_ok = match hubs.as_slice() {
        [] => true,
        [h] => h.value.terms().len() == 1 && h.value.terms()[0].coeff > Rational::zero(),
        _ => false,
    };
    let block_terms_ok = parts
        .iter()
        .filter(|c| c.gauge != HUB_GAUGE)
        .all(|c| c.value.terms().len() == 1 && c.value.terms()[0].coeff.is_one());
    distinct_blocks && hub_ok && block_terms_ok
}

/// Checks the hypotheses under which two sums of at most three components
/// (two block values from distinct gauges and one hub value) are independent:
/// both sums nonzero, components from disjoint families, and the component
/// multisets differ. `Ok(None)` means the hypotheses fail (inconclusive).
pub fn sum_independence_check(
    x: &CodedReal,
    y: &CodedReal,
    registry: &ValueRegistry,
) -> Result<Option<SumIndependence>> {
    let cx = components(x, registry)?;
    let cy = components(y, registry)?;
    if cx.is_empty() || cy.is_empty() || !shape_ok(&cx) || !shape_ok(&cy) {
        return Ok(None);
    }
    let in_other = |c: &Component, other: &[Component]| other.iter().any(|o| o == c);
    let distinguishing = cx
        .iter()
        .find(|c| !in_other(c, &cy))
        .or_else(|| cy.iter().find(|c| !in_other(c, &cx)))
        .cloned();
    Ok(distinguishing.map(|d| SumIndependence { x: cx, y: cy, distinguishing: d }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rational::{int, rat};

    fn iv(a: Rational, b: Rational) -> IntervalSet {
        IntervalSet::interval(a, b).unwrap()
    }

    #[test]
    fn unit_block_witnesses() {
        let s = ExponentSchedule::new(0);
        let w = independence_witness(&[iv(int(0), rat(1, 2)), iv(int(0), rat(3, 4))], s).unwrap();
        assert_eq!((w.block_lo.clone(), w.block_hi.clone()), (int(0), int(1)));
        assert_eq!(w.a, int(0));
        assert_eq!(w.b, vec![rat(1, 2), rat(3, 4)]);
        assert!(w.verify().is_ok());

        let sets = [iv(int(2), rat(5, 2)), iv(int(2), rat(9, 4)), iv(int(2), rat(11, 5))];
        let w = independence_witness(&sets, s).unwrap();
        assert_eq!((w.block_lo.clone(), w.block_hi.clone(), w.a.clone()), (int(2), int(3), int(2)));
        assert_eq!(w.b, vec![rat(5, 2), rat(9, 4), rat(11, 5)]);
    }

    #[test]
    fn identical_sets_fail() {
        let s = ExponentSchedule::new(0);
        assert!(independence_witness(&[iv(int(0), int(1)), iv(int(0), int(1))], s).is_none());
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let s = ExponentSchedule::new(0);
        let mut w =
            independence_witness(&[iv(int(0), rat(1, 2)), iv(int(0), rat(3, 4))], s).unwrap();
        w.b[1] = rat(2, 3);
        assert!(w.verify().is_err());
    }

    #[test]
    fn falls_back_to_anchored_blocks() {
        let s = ExponentSchedule::new(0);
        // Both sets straddle an integer, so no unit block works.
        let sets = [iv(rat(1, 2), rat(3, 2)), iv(rat(1, 2), rat(7, 4))];
        let w = independence_witness(&sets, s).unwrap();
        assert_eq!(w.a, rat(1, 2));
        assert!(w.verify().is_ok());
    }
}
