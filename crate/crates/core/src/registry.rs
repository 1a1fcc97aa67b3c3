//! Allocation of disjoint value families: gauges for block metrics and hub
//! values `P(i) + q * s` built on the reserved gauge.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::rational::{floor_int, floor_log2, pow2, serde_rational, serde_rational_vec};
use crate::numbers::{CodedReal, Rational};
use crate::product::{self, SemiMetricGauge, Word};

/// Gauge id reserved for hub basis terms; block metrics never use it.
pub const HUB_GAUGE: u64 = 0;

/// Enclosure depth used for the upper bound of a hub basis term.
pub const HUB_BOUND_DEPTH: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeRecord {
    pub id: u64,
    pub prime: u64,
    /// Every semi-metric value handed out, sorted and without repeats.
    #[serde(with = "serde_rational_vec")]
    pub drawn: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HubAllocation {
    pub index: u64,
    pub k: u32,
    #[serde(with = "serde_rational")]
    pub target: Rational,
    #[serde(with = "serde_rational")]
    pub rational_part: Rational,
    #[serde(with = "serde_rational")]
    pub coeff: Rational,
    /// The basis term `s` is `tau` on the reserved gauge between the words
    /// `(0)` and `(basis_letter)`.
    pub basis_letter: u64,
    pub basis: CodedReal,
    pub value: CodedReal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueRegistry {
    gauges: Vec<GaugeRecord>,
    hubs: Vec<HubAllocation>,
}

impl Default for ValueRegistry {
    fn default() -> Self {
        ValueRegistry::new()
    }
}

impl ValueRegistry {
    pub fn new() -> Self {
        let hub = SemiMetricGauge::new(HUB_GAUGE);
        ValueRegistry {
            gauges: vec![GaugeRecord { id: hub.id, prime: hub.prime, drawn: Vec::new() }],
            hubs: Vec::new(),
        }
    }

    /// A gauge id never handed out before, with its own prime family.
    pub fn fresh_gauge(&mut self) -> SemiMetricGauge {
        let gauge = SemiMetricGauge::new(self.gauges.len() as u64);
        self.gauges.push(GaugeRecord { id: gauge.id, prime: gauge.prime, drawn: Vec::new() });
        gauge
    }

    pub fn gauge(&self, id: u64) -> Option<SemiMetricGauge> {
        self.gauges
            .get(id as usize)
            .map(|r| SemiMetricGauge { id: r.id, prime: r.prime })
    }

    pub fn gauges(&self) -> &[GaugeRecord] {
        &self.gauges
    }

    pub fn gauge_for_prime(&self, p: u64) -> Option<u64> {
        self.gauges.iter().find(|r| r.prime == p).map(|r| r.id)
    }

    pub fn hubs(&self) -> &[HubAllocation] {
        &self.hubs
    }

    fn record(&mut self, id: u64, value: Rational) {
        let drawn = &mut self.gauges[id as usize].drawn;
        if let Err(pos) = drawn.binary_search(&value) {
            drawn.insert(pos, value);
        }
    }

    /// A semi-metric value of gauge `id`, recorded as drawn.
    pub fn semi_metric(&mut self, id: u64, level: usize, a: u64, b: u64) -> Result<Rational> {
        let gauge = self.require(id)?;
        let v = gauge.value(level, &a.into(), &b.into());
        if a != b {
            self.record(id, v.clone());
        }
        Ok(v)
    }

    /// `tau` on gauge `id`, recording every semi-metric value it uses.
    pub fn tau(&mut self, id: u64, k: u32, x: &Word, y: &Word) -> Result<CodedReal> {
        let gauge = self.require(id)?;
        let value = product::tau(&gauge, k, x, y)?;
        for (m, a, b) in product::tau_levels(x, y) {
            self.record(id, gauge.value(m, &a, &b));
        }
        Ok(value)
    }

    fn require(&self, id: u64) -> Result<SemiMetricGauge> {
        self.gauge(id)
            .ok_or_else(|| Error::Domain(format!("gauge {id} was never allocated")))
    }

    /// All drawn semi-metric values across every gauge.
    pub fn drawn_values(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.gauges.iter().flat_map(|r| r.drawn.iter().map(move |v| (r.id, v)))
    }

    /// `P(i) + q * s`: `P(i)` is `target` rounded to the grid `2^-(i+1)`,
    /// `s` a fresh `tau` value on the reserved gauge, and `q` the largest
    /// power of two with `q * s <= 2^-i` (checked against an upper
    /// enclosure of `s`).
    pub fn hub_value(&mut self, k: u32, i: u64, target: &Rational) -> Result<CodedReal> {
        if !target.is_positive() {
            return Err(Error::Domain("hub targets must be positive".into()));
        }
        if self.hubs.iter().any(|h| h.index == i) {
            return Err(Error::Domain(format!("hub index {i} already allocated")));
        }
        let grid = pow2(i as i64 + 1);
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let rational_part = Rational::from_integer(floor_int(&(target * &grid + half))) / &grid;

        let basis_letter = self.hubs.len() as u64 + 1;
        let basis = self.tau(
            HUB_GAUGE,
            k,
            &Word::from_letters(&[0]),
            &Word::from_letters(&[basis_letter]),
        )?;
        let upper = basis.eval(HUB_BOUND_DEPTH).hi;
        // Least t with upper * 2^i <= 2^t, so q = 2^-t.
        let scaled = &upper * pow2(i as i64);
        let mut t = floor_log2(&scaled);
        if pow2(t) < scaled {
            t += 1;
        }
        let coeff = pow2(-t);
        let value = &CodedReal::rational(rational_part.clone()) + &basis.scale(&coeff);
        self.hubs.push(HubAllocation {
            index: i,
            k,
            target: target.clone(),
            rational_part,
            coeff,
            basis_letter,
            basis,
            value: value.clone(),
        });
        Ok(value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("registry serializes")
    }
}
