//! Amalgamation of block metrics through hub points, and the full pipeline
//! producing metrics whose distances are pairwise independent over `Q`.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::certificate::{build_certificate, Certificate};
use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::numbers::rational::{ceil_int, floor_log2, format_rational, pow2, serde_rational};
use crate::numbers::{compare, CodedReal, Comparison, Enclosure, Rational, DEFAULT_MAX_PRECISION};
use crate::product::Word;
use crate::registry::ValueRegistry;
use crate::rigidify::interval_window;
use crate::verify::{self, Verdict};

/// A disjoint cover by blocks of point indices, with one hub per block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub hubs: Vec<usize>,
}

impl Partition {
    pub fn block_of(&self, x: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&x))
    }

    fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        if self.blocks.len() != self.hubs.len() {
            return Err(Error::Domain("one hub per block required".into()));
        }
        for (b, &h) in self.blocks.iter().zip(&self.hubs) {
            if !b.contains(&h) {
                return Err(Error::Domain(format!("hub {h} lies outside its block")));
            }
            for &x in b {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Domain(format!("point {x} is out of range or repeated")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("partition does not cover every point".into()));
        }
        Ok(())
    }
}

fn decided(c: Comparison, what: &str) -> Result<Comparison> {
    if c == Comparison::Unresolved {
        return Err(Error::Unresolved(format!("could not decide {what}")));
    }
    Ok(c)
}

/// Greedy clustering: each unassigned point in turn seeds a block and
/// absorbs every unassigned point within `bound / 2` of it.
pub fn partition_by_diameter(d: &FiniteMetric, bound: &Rational) -> Result<Partition> {
    if !bound.is_positive() {
        return Err(Error::Domain("diameter bound must be positive".into()));
    }
    let radius = CodedReal::rational(bound / Rational::from_integer(2.into()));
    let n = d.len();
    let mut assigned = vec![false; n];
    let mut partition = Partition { blocks: Vec::new(), hubs: Vec::new() };
    for seed in 0..n {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut block = vec![seed];
        for x in seed + 1..n {
            if assigned[x] {
                continue;
            }
            let c = decided(compare(d.get(seed, x), &radius, DEFAULT_MAX_PRECISION), "block radius")?;
            if c != Comparison::Greater {
                assigned[x] = true;
                block.push(x);
            }
        }
        partition.blocks.push(block);
        partition.hubs.push(seed);
    }
    Ok(partition)
}

/// `D(x, y) = e_i(x, y)` inside block `i`, and
/// `e_i(x, p_i) + h(p_i, p_j) + e_j(p_j, y)` across blocks.
pub fn amalgamate(
    partition: &Partition,
    block_metrics: &[FiniteMetric],
    hub_metric: &FiniteMetric,
) -> Result<FiniteMetric> {
    if block_metrics.len() != partition.blocks.len() || hub_metric.len() != partition.hubs.len() {
        return Err(Error::Domain("need one block metric per block and one hub per block".into()));
    }
    let n: usize = partition.blocks.iter().map(Vec::len).sum();
    partition.validate(n)?;
    let mut labels = vec![String::new(); n];
    // Position of each point inside its block metric.
    let mut local = vec![(0usize, 0usize); n];
    for (b, (block, metric)) in partition.blocks.iter().zip(block_metrics).enumerate() {
        if metric.len() != block.len() {
            return Err(Error::Domain(format!("block {b} metric has the wrong size")));
        }
        for (pos, &x) in block.iter().enumerate() {
            labels[x] = metric.label(pos).to_string();
            local[x] = (b, pos);
        }
    }
    for (b, &h) in partition.hubs.iter().enumerate() {
        if hub_metric.label(b) != labels[h] {
            return Err(Error::Domain(format!("hub metric point {b} is not hub {:?}", labels[h])));
        }
    }
    let zero = CodedReal::zero();
    for (a, b) in hub_metric.pairs() {
        if decided(compare(hub_metric.get(a, b), &zero, DEFAULT_MAX_PRECISION), "hub distance sign")?
            != Comparison::Greater
        {
            return Err(Error::Domain(format!(
                "hub distance between {:?} and {:?} is not positive",
                hub_metric.label(a),
                hub_metric.label(b)
            )));
        }
    }
    let hub_pos: Vec<usize> = partition
        .hubs
        .iter()
        .enumerate()
        .map(|(b, &h)| {
            debug_assert_eq!(local[h].0, b);
            local[h].1
        })
        .collect();
    FiniteMetric::from_fn(labels, |x, y| {
        let ((bx, px), (by, py)) = (local[x], local[y]);
        if bx == by {
            return Ok(block_metrics[bx].get(px, py).clone());
        }
        let left = block_metrics[bx].get(px, hub_pos[bx]);
        let right = block_metrics[by].get(hub_pos[by], py);
        Ok(&(left + hub_metric.get(bx, by)) + right)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVerdict {
    Pass,
    Fail,
    PreconditionFailure,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupBoundReport {
    pub verdict: BoundVerdict,
    #[serde(with = "serde_rational")]
    pub achieved_lo: Rational,
    #[serde(with = "serde_rational")]
    pub achieved_hi: Rational,
    /// Enclosure of `4 epsilon + D_P(d|P, h)`.
    #[serde(with = "serde_rational")]
    pub bound_lo: Rational,
    #[serde(with = "serde_rational")]
    pub bound_hi: Rational,
    pub message: String,
}

fn abs_sides(x: &CodedReal) -> [CodedReal; 2] {
    [x.clone(), -x]
}

/// Checks `D_X(D, d) <= 4 epsilon + D_P(d|P, h)` exactly, where `h` is the
/// restriction of `D` to the hubs.
pub fn sup_bound_check(
    d: &FiniteMetric,
    amalgam: &FiniteMetric,
    partition: &Partition,
    epsilon: &Rational,
) -> Result<SupBoundReport> {
    let p = DEFAULT_MAX_PRECISION;
    let achieved = verify::sup_distance(d, amalgam)?;
    let d_hubs = d.restrict(&partition.hubs);
    let h = amalgam.restrict(&partition.hubs);
    let hub_gap = verify::sup_distance(&d_hubs, &h)?;
    let four_eps = epsilon * Rational::from_integer(4.into());
    let mut report = SupBoundReport {
        verdict: BoundVerdict::Pass,
        achieved_lo: achieved.lo,
        achieved_hi: achieved.hi,
        bound_lo: &four_eps + &hub_gap.lo,
        bound_hi: &four_eps + &hub_gap.hi,
        message: String::new(),
    };
    let eps = CodedReal::rational(epsilon.clone());
    for block in &partition.blocks {
        for (a, &x) in block.iter().enumerate() {
            for &y in &block[a + 1..] {
                for metric in [d, amalgam] {
                    match compare(metric.get(x, y), &eps, p) {
                        Comparison::Greater => {
                            report.verdict = BoundVerdict::PreconditionFailure;
                            report.message = format!(
                                "block diameter exceeds epsilon at ({}, {})",
                                d.label(x),
                                d.label(y)
                            );
                            return Ok(report);
                        }
                        Comparison::Unresolved => {
                            report.verdict = BoundVerdict::Unresolved;
                            return Ok(report);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    // Candidates for the hub term: each signed hub deviation (the max is one of them).
    let mut hub_terms: Vec<CodedReal> = h
        .pairs()
        .flat_map(|(a, b)| abs_sides(&(h.get(a, b) - d_hubs.get(a, b))))
        .collect();
    hub_terms.push(CodedReal::zero());
    let base = CodedReal::rational(four_eps);
    for (x, y) in d.pairs() {
        for side in abs_sides(&(amalgam.get(x, y) - d.get(x, y))) {
            let mut ok = false;
            let mut unresolved = false;
            for t in &hub_terms {
                match compare(&side, &(&base + t), p) {
                    Comparison::Unresolved => unresolved = true,
                    Comparison::Greater => {}
                    _ => {
                        ok = true;
                        break;
                    }
                }
            }
            if !ok {
                report.verdict =
                    if unresolved { BoundVerdict::Unresolved } else { BoundVerdict::Fail };
                report.message = format!("pair ({}, {}) exceeds the bound", d.label(x), d.label(y));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub max_precision: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { max_precision: DEFAULT_MAX_PRECISION }
    }
}

/// Least `k >= 0` with `2^-k <= eta`.
pub fn schedule_for(eta: &Rational) -> u32 {
    if *eta >= Rational::one() {
        return 0;
    }
    let mut k = (-floor_log2(eta)).max(0);
    while pow2(-k) > *eta {
        k += 1;
    }
    while k > 0 && pow2(-(k - 1)) <= *eta {
        k -= 1;
    }
    k as u32
}

/// The pipeline: blocks of diameter at most `eta = epsilon / 5`, block
/// metrics `tau` on length-1 words from fresh gauges, a strongly rigid hub
/// metric of hub values within `eta` of `d`, and their amalgamation.
pub fn rigidify_full(d: &FiniteMetric, epsilon: &Rational) -> Result<(FiniteMetric, Certificate)> {
    rigidify_full_with(d, epsilon, &PipelineOptions::default())
}

pub fn rigidify_full_with(
    d: &FiniteMetric,
    epsilon: &Rational,
    options: &PipelineOptions,
) -> Result<(FiniteMetric, Certificate)> {
    if d.len() < 2 {
        return Err(Error::Degenerate("need at least two points".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    if !d.is_rational() {
        return Err(Error::Domain("input distances must be rational".into()));
    }
    let p = options.max_precision;
    let eta = epsilon / Rational::from_integer(5.into());
    let k = schedule_for(&eta);
    let partition = partition_by_diameter(d, &eta)?;
    let mut registry = ValueRegistry::new();

    let mut block_metrics = Vec::with_capacity(partition.blocks.len());
    for block in &partition.blocks {
        let gauge = registry.fresh_gauge();
        let words: Vec<Word> = (0..block.len() as u64).map(|l| Word::from_letters(&[l])).collect();
        let labels = block.iter().map(|&x| d.label(x).to_string()).collect();
        let metric = FiniteMetric::from_fn(labels, |i, j| registry.tau(gauge.id, k, &words[i], &words[j]))?;
        block_metrics.push(metric);
    }

    let hub_metric = hub_metric(d, &partition, &eta, k, &mut registry, p)?;
    let amalgam = amalgamate(&partition, &block_metrics, &hub_metric)?;

    for report in [verify::is_metric(&amalgam, p), verify::is_strongly_rigid(&amalgam, p)] {
        match report.verdict {
            Verdict::Pass => {}
            Verdict::Unresolved => {
                return Err(Error::Unresolved(format!("{} check: {}", report.check, report.message)))
            }
            Verdict::Fail => {
                return Err(Error::InvalidMetric(format!(
                    "pipeline output failed {} at {:?}: {}",
                    report.check, report.witness, report.message
                )))
            }
        }
    }
    let within = verify::sup_distance_within(d, &amalgam, epsilon, p)?;
    if within.verdict != Verdict::Pass {
        return Err(Error::Unresolved(format!("sup bound not certified: {}", within.message)));
    }
    let certificate = build_certificate(d, &amalgam, epsilon, k, &partition, registry)?;
    Ok((amalgam, certificate))
}

/// Hub values snapped into the windows `eta_h (N + 2^(-N-1), N + 2^-N)` with
/// `eta_h = eta / 2` and `N = ceil(d / eta_h)`, so strict triangle
/// inequalities hold among hubs and every value is within `eta` of `d`.
fn hub_metric(
    d: &FiniteMetric,
    partition: &Partition,
    eta: &Rational,
    k: u32,
    registry: &mut ValueRegistry,
    p: u64,
) -> Result<FiniteMetric> {
    let eta_h = eta / Rational::from_integer(2.into());
    let hubs = d.restrict(&partition.hubs);
    let mut next_index = 0u64;
    FiniteMetric::from_fn(hubs.points().to_vec(), |a, b| {
        let dist = hubs.rational(a, b).expect("rational input");
        let n = ceil_int(&(dist / &eta_h));
        let n: u64 = n
            .try_into()
            .map_err(|_| Error::Resource(format!("grid index for {} too large", format_rational(dist))))?;
        let (lo, hi) = interval_window(n);
        let (lo, hi) = (&lo * &eta_h, &hi * &eta_h);
        let target = (&lo + &hi) / Rational::from_integer(2.into());
        let half_width = (&hi - &lo) / Rational::from_integer(2.into());
        // Least i with 5 * 2^(-i-2) < half_width.
        let mut i = next_index;
        while pow2(-(i as i64) - 2) * Rational::from_integer(5.into()) >= half_width {
            i += 1;
        }
        next_index = i + 1;
        let value = registry.hub_value(k, i, &target)?;
        let window = Enclosure { lo: lo.clone(), hi: hi.clone() };
        let inside = decided(compare(&value, &CodedReal::rational(window.lo), p), "hub window")?
            == Comparison::Greater
            && decided(compare(&value, &CodedReal::rational(window.hi), p), "hub window")?
                == Comparison::Less;
        if !inside {
            return Err(Error::InvalidMetric("hub value escaped its window".into()));
        }
        Ok(value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::metric_from_upper;
    use crate::numbers::{int, rat};

    #[test]
    fn schedule_choice() {
        assert_eq!(schedule_for(&int(1)), 0);
        assert_eq!(schedule_for(&rat(1, 2)), 1);
        assert_eq!(schedule_for(&rat(1, 10)), 4);
        assert_eq!(schedule_for(&rat(1, 8)), 3);
    }

    #[test]
    fn partition_examples() {
        let far = metric_from_upper(&[int(5), int(6), int(7)]).unwrap();
        assert_eq!(partition_by_diameter(&far, &int(3)).unwrap().blocks.len(), 3);
        let near = metric_from_upper(&[int(1), int(1), int(1)]).unwrap();
        assert_eq!(partition_by_diameter(&near, &int(2)).unwrap().blocks.len(), 1);
        // Points 0..3 at mutual distance 1 except d(0, 3) = 10.
        let mixed = metric_from_upper(&[int(1), int(1), int(10), int(1), int(1), int(1)]).unwrap();
        let p = partition_by_diameter(&mixed, &int(3)).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn amalgamation_example() {
        let e1 = FiniteMetric::from_rationals(
            vec!["a".into(), "b".into()],
            vec![vec![int(0), rat(1, 2)], vec![rat(1, 2), int(0)]],
        )
        .unwrap();
        let e2 = FiniteMetric::from_rationals(vec!["c".into()], vec![vec![int(0)]]).unwrap();
        let h = FiniteMetric::from_rationals(
            vec!["a".into(), "c".into()],
            vec![vec![int(0), int(2)], vec![int(2), int(0)]],
        )
        .unwrap();
        let p = Partition { blocks: vec![vec![0, 1], vec![2]], hubs: vec![0, 2] };
        let d = amalgamate(&p, &[e1, e2], &h).unwrap();
        assert_eq!(d.rational(1, 2), Some(&rat(5, 2)));
        assert_eq!(d.rational(0, 1), Some(&rat(1, 2)));

        let zero_hub = FiniteMetric::from_rationals(
            vec!["a".into(), "c".into()],
            vec![vec![int(0), int(0)], vec![int(0), int(0)]],
        )
        .unwrap();
        let e1 = d.restrict(&[0, 1]);
        let e2 = d.restrict(&[2]);
        assert!(amalgamate(&p, &[e1, e2], &zero_hub).is_err());
    }
}
