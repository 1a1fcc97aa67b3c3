//! Self-contained evidence that a pipeline output is within `epsilon` of its
//! input and has pairwise `Q`-independent distances.
//!
//! Independence is argued in two layers. A single [`IndependenceWitness`]
//! shows that `1` together with every distinct index set occurring in the
//! metric is independent, so each distance is a coordinate vector over that
//! basis; two distances are then independent exactly when some 2x2 minor of
//! their vectors is nonzero. Each pair-of-pairs entry also records the
//! gauge-tag check on the three-component shape of the two sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glue::Partition;
use crate::metric::FiniteMetric;
use crate::numbers::rational::{pow2, serde_rational};
use crate::numbers::{
    independence_witness, sum_independence_check, CodedReal, ExponentSchedule,
    IndependenceWitness, IntervalSet, Rational, DEFAULT_MAX_PRECISION,
};
use crate::registry::ValueRegistry;
use crate::rigidify::in_family;
use crate::verify::{self, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupBound {
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "serde_rational")]
    pub achieved_lo: Rational,
    #[serde(with = "serde_rational")]
    pub achieved_hi: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairIndependence {
    /// Two unordered point pairs, by point index.
    pub pairs: [[usize; 2]; 2],
    /// Coordinates (0 = the constant, `j + 1` = basis set `j`) of a nonzero
    /// 2x2 minor.
    pub minor: [usize; 2],
    /// Gauge ids of the components of each sum, as found by the tag check.
    pub gauges: [Vec<u64>; 2],
    /// Gauge of a component occurring in exactly one of the sums.
    pub distinguishing_gauge: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub metric: FiniteMetric,
    pub input: FiniteMetric,
    pub k: u32,
    pub partition: Partition,
    pub registry: ValueRegistry,
    pub basis: IndependenceWitness,
    pub independence: Vec<PairIndependence>,
    pub sup_bound: SupBound,
}

/// Every distinct index set in `metric`, in first-seen order. All terms must
/// use schedule `k` with no repeated set inside one entry.
fn basis_sets(metric: &FiniteMetric, k: u32) -> Result<Vec<IntervalSet>> {
    let mut sets: Vec<IntervalSet> = Vec::new();
    for (i, j) in metric.pairs() {
        for t in metric.get(i, j).terms() {
            if t.schedule != ExponentSchedule::new(k) {
                return Err(Error::Domain(format!("term uses schedule {} instead of {k}", t.schedule.k)));
            }
            if !sets.contains(&t.index_set) {
                sets.push(t.index_set.clone());
            }
        }
    }
    Ok(sets)
}

fn coordinates(x: &CodedReal, basis: &[IntervalSet]) -> Result<Vec<Rational>> {
    let mut v = vec![Rational::default(); basis.len() + 1];
    v[0] = x.offset().clone();
    for t in x.terms() {
        let pos = basis
            .iter()
            .position(|s| *s == t.index_set)
            .ok_or_else(|| Error::Domain(format!("index set {} is not in the basis", t.index_set)))?;
        v[pos + 1] += &t.coeff;
    }
    Ok(v)
}

fn minor(a: &[Rational], b: &[Rational], c: [usize; 2]) -> Rational {
    &a[c[0]] * &b[c[1]] - &a[c[1]] * &b[c[0]]
}

fn find_minor(a: &[Rational], b: &[Rational]) -> Option<[usize; 2]> {
    let n = a.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| [i, j]))
        .find(|&c| minor(a, b, c) != Rational::default())
}

pub(crate) fn build_certificate(
    input: &FiniteMetric,
    metric: &FiniteMetric,
    epsilon: &Rational,
    k: u32,
    partition: &Partition,
    registry: ValueRegistry,
) -> Result<Certificate> {
    let sets = basis_sets(metric, k)?;
    let basis = independence_witness(&sets, ExponentSchedule::new(k))
        .ok_or_else(|| Error::Unresolved("no independence witness for the basis sets".into()))?;
    let pairs: Vec<(usize, usize)> = metric.pairs().collect();
    let coords: Vec<Vec<Rational>> = pairs
        .iter()
        .map(|&(i, j)| coordinates(metric.get(i, j), &sets))
        .collect::<Result<_>>()?;
    let mut independence = Vec::new();
    for a in 0..pairs.len() {
        for b in a + 1..pairs.len() {
            let (x, y) = (metric.get(pairs[a].0, pairs[a].1), metric.get(pairs[b].0, pairs[b].1));
            let minor = find_minor(&coords[a], &coords[b]).ok_or_else(|| {
                Error::InvalidMetric(format!("distances of {:?} and {:?} are dependent", pairs[a], pairs[b]))
            })?;
            let tags = sum_independence_check(x, y, &registry)?.ok_or_else(|| {
                Error::Unresolved(format!("tag check failed for {:?} and {:?}", pairs[a], pairs[b]))
            })?;
            independence.push(PairIndependence {
                pairs: [[pairs[a].0, pairs[a].1], [pairs[b].0, pairs[b].1]],
                minor,
                gauges: [
                    tags.x.iter().map(|c| c.gauge).collect(),
                    tags.y.iter().map(|c| c.gauge).collect(),
                ],
                distinguishing_gauge: tags.distinguishing.gauge,
            });
        }
    }
    let achieved = verify::sup_distance(input, metric)?;
    Ok(Certificate {
        metric: metric.clone(),
        input: input.clone(),
        k,
        partition: partition.clone(),
        registry,
        basis,
        independence,
        sup_bound: SupBound {
            epsilon: epsilon.clone(),
            achieved_lo: achieved.lo,
            achieved_hi: achieved.hi,
        },
    })
}

impl Certificate {
    /// Re-checks everything from the certificate's own contents.
    pub fn verify(&self, max_precision: u64) -> std::result::Result<(), String> {
        self.basis.verify()?;
        if self.basis.k != self.k {
            return Err("witness schedule differs from the certificate's".into());
        }
        let sets = basis_sets(&self.metric, self.k).map_err(|e| e.to_string())?;
        if sets.len() != self.basis.sets.len() || sets.iter().any(|s| !self.basis.sets.contains(s)) {
            return Err("witness does not cover exactly the metric's index sets".into());
        }
        let basis = &self.basis.sets;

        let pairs: Vec<(usize, usize)> = self.metric.pairs().collect();
        let expected = pairs.len() * pairs.len().saturating_sub(1) / 2;
        if self.independence.len() != expected {
            return Err(format!("expected {expected} pair-of-pairs entries, found {}", self.independence.len()));
        }
        let mut covered = std::collections::HashSet::new();
        for entry in &self.independence {
            let [[a, b], [c, d]] = entry.pairs;
            let valid = |x: usize, y: usize| x < y && y < self.metric.len();
            if !valid(a, b) || !valid(c, d) || (a, b) == (c, d) {
                return Err(format!("malformed entry {:?}", entry.pairs));
            }
            let key = if (a, b) < (c, d) { (a, b, c, d) } else { (c, d, a, b) };
            if !covered.insert(key) {
                return Err(format!("entry {:?} repeated", entry.pairs));
            }
            let (x, y) = (self.metric.get(a, b), self.metric.get(c, d));
            let vx = coordinates(x, basis).map_err(|e| e.to_string())?;
            let vy = coordinates(y, basis).map_err(|e| e.to_string())?;
            if entry.minor[0] >= entry.minor[1]
                || entry.minor[1] > basis.len()
                || minor(&vx, &vy, entry.minor) == Rational::default()
            {
                return Err(format!("minor {:?} vanishes for {:?}", entry.minor, entry.pairs));
            }
            let tags = sum_independence_check(x, y, &self.registry)
                .map_err(|e| e.to_string())?
                .ok_or_else(|| format!("tag hypotheses fail for {:?}", entry.pairs))?;
            let gx: Vec<u64> = tags.x.iter().map(|c| c.gauge).collect();
            let gy: Vec<u64> = tags.y.iter().map(|c| c.gauge).collect();
            if [gx, gy] != entry.gauges {
                return Err(format!("gauge tags differ for {:?}", entry.pairs));
            }
            let in_x = tags.x.iter().any(|c| c.gauge == entry.distinguishing_gauge && !tags.y.contains(c));
            let in_y = tags.y.iter().any(|c| c.gauge == entry.distinguishing_gauge && !tags.x.contains(c));
            if !(in_x || in_y) {
                return Err(format!("no distinguishing component for {:?}", entry.pairs));
            }
        }

        self.verify_registry()?;

        let eps = &self.sup_bound.epsilon;
        let within = verify::sup_distance_within(&self.input, &self.metric, eps, max_precision)
            .map_err(|e| e.to_string())?;
        if within.verdict != Verdict::Pass {
            return Err(format!("sup bound not met: {}", within.message));
        }
        let achieved = verify::sup_distance(&self.input, &self.metric).map_err(|e| e.to_string())?;
        if achieved.lo != self.sup_bound.achieved_lo || achieved.hi != self.sup_bound.achieved_hi {
            return Err("recorded sup enclosure does not match".into());
        }
        if &achieved.lo > eps {
            return Err("achieved deviation exceeds epsilon".into());
        }
        Ok(())
    }

    fn verify_registry(&self) -> std::result::Result<(), String> {
        let mut all = std::collections::HashSet::new();
        for g in self.registry.gauges() {
            for v in &g.drawn {
                let frac = v - Rational::from_integer(v.to_integer());
                if !in_family(g.prime, &frac) {
                    return Err(format!("value {v} of gauge {} lies outside its family", g.id));
                }
                if !all.insert(v.clone()) {
                    return Err(format!("value {v} drawn twice"));
                }
            }
        }
        for h in self.registry.hubs() {
            let bound = &h.coeff * h.basis.eval(4).hi;
            if bound > pow2(-(h.index as i64)) {
                return Err(format!("hub {} violates q * s <= 2^-i", h.index));
            }
            let expected = &CodedReal::rational(h.rational_part.clone()) + &h.basis.scale(&h.coeff);
            if expected != h.value {
                return Err(format!("hub {} value is inconsistent", h.index));
            }
        }
        Ok(())
    }

    pub fn verify_default(&self) -> std::result::Result<(), String> {
        self.verify(DEFAULT_MAX_PRECISION)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
