//! Brute-force oracles: metric axioms, sup distance, strong rigidity,
//! isometry groups, `L_{n,m}` membership and distance-function injectivity.
//! Every comparison goes through the exact sign procedure, so a verdict is
//! `unresolved` only when that procedure hits its precision cap.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::numbers::rational::{ceil_int, floor_log2, format_rational, pow2};
use crate::numbers::{compare, CodedReal, Comparison, Enclosure, Rational};

/// Enclosure depth used to pre-sort values before exact comparison.
const SWEEP_DEPTH: u32 = 5;

/// Largest point count accepted by the isometry search.
pub const MAX_ISOMETRY_POINTS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub verdict: Verdict,
    /// Labels of the offending (or, for unresolved, undecided) tuple.
    pub witness: Vec<String>,
    pub message: String,
    pub max_precision: u64,
}

impl Report {
    fn pass(check: &str, max_precision: u64) -> Self {
        Report {
            check: check.into(),
            verdict: Verdict::Pass,
            witness: Vec::new(),
            message: String::new(),
            max_precision,
        }
    }

    fn with(check: &str, verdict: Verdict, witness: Vec<String>, message: String, p: u64) -> Self {
        Report { check: check.into(), verdict, witness, message, max_precision: p }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn labels(d: &FiniteMetric, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| d.label(i).to_string()).collect()
}

/// Checks zero diagonal, symmetry, positivity and every triangle inequality.
pub fn is_metric(d: &FiniteMetric, max_precision: u64) -> Report {
    triangle_report(d, false, max_precision)
}

/// As [`is_metric`] but with strict triangle inequalities.
pub fn is_strict_triangle(d: &FiniteMetric, max_precision: u64) -> Report {
    triangle_report(d, true, max_precision)
}

fn triangle_report(d: &FiniteMetric, strict: bool, p: u64) -> Report {
    let check = if strict { "strict" } else { "metric" };
    let n = d.len();
    let zero = CodedReal::zero();
    for i in 0..n {
        if !d.get(i, i).is_zero() {
            return Report::with(check, Verdict::Fail, labels(d, &[i, i]), "nonzero diagonal".into(), p);
        }
        for j in 0..i {
            if d.get(i, j) != d.get(j, i) {
                return Report::with(check, Verdict::Fail, labels(d, &[i, j]), "asymmetric".into(), p);
            }
        }
    }
    for (i, j) in d.pairs() {
        match compare(d.get(i, j), &zero, p) {
            Comparison::Greater => {}
            Comparison::Unresolved => {
                return Report::with(check, Verdict::Unresolved, labels(d, &[i, j]), "sign undecided".into(), p)
            }
            _ => {
                return Report::with(check, Verdict::Fail, labels(d, &[i, j]), "distance not positive".into(), p)
            }
        }
    }
    for (i, j) in d.pairs() {
        for l in 0..n {
            if l == i || l == j {
                continue;
            }
            let detour = d.get(i, l) + d.get(l, j);
            let verdict = compare(d.get(i, j), &detour, p);
            let ok = match verdict {
                Comparison::Less => true,
                Comparison::Equal => !strict,
                Comparison::Greater => false,
                Comparison::Unresolved => {
                    return Report::with(
                        check,
                        Verdict::Unresolved,
                        labels(d, &[i, l, j]),
                        "triangle comparison undecided".into(),
                        p,
                    )
                }
            };
            if !ok {
                return Report::with(
                    check,
                    Verdict::Fail,
                    labels(d, &[i, l, j]),
                    format!(
                        "d({0},{2}) {1} d({0},{3}) + d({3},{2})",
                        d.label(i),
                        if verdict == Comparison::Equal { "=" } else { ">" },
                        d.label(j),
                        d.label(l)
                    ),
                    p,
                );
            }
        }
    }
    Report::pass(check, p)
}

fn abs_enclosure(x: &CodedReal) -> Enclosure {
    let e = match x.as_rational() {
        Some(q) => Enclosure::point(q.clone()),
        None => x.eval(SWEEP_DEPTH + 1),
    };
    if !e.lo.is_negative() {
        e
    } else if !e.hi.is_positive() {
        Enclosure { lo: -e.hi, hi: -e.lo }
    } else {
        let hi = if -&e.lo > e.hi { -e.lo } else { e.hi };
        Enclosure { lo: Rational::zero(), hi }
    }
}

fn require_same_points(d: &FiniteMetric, e: &FiniteMetric) -> Result<()> {
    if !d.same_points(e) {
        return Err(Error::Domain("metrics are defined on different point lists".into()));
    }
    Ok(())
}

/// `max |d - e|` over all pairs, exact for rational entries.
pub fn sup_distance(d: &FiniteMetric, e: &FiniteMetric) -> Result<Enclosure> {
    require_same_points(d, e)?;
    let mut out = Enclosure::point(Rational::zero());
    for (i, j) in d.pairs() {
        let diff = abs_enclosure(&(d.get(i, j) - e.get(i, j)));
        if diff.lo > out.lo {
            out.lo = diff.lo;
        }
        if diff.hi > out.hi {
            out.hi = diff.hi;
        }
    }
    Ok(out)
}

/// Exact check of `|d(x,y) - e(x,y)| <= bound` for every pair.
pub fn sup_distance_within(
    d: &FiniteMetric,
    e: &FiniteMetric,
    bound: &Rational,
    max_precision: u64,
) -> Result<Report> {
    require_same_points(d, e)?;
    let check = "sup";
    let b = CodedReal::rational(bound.clone());
    for (i, j) in d.pairs() {
        let diff = d.get(i, j) - e.get(i, j);
        for side in [diff.clone(), -&diff] {
            match compare(&side, &b, max_precision) {
                Comparison::Greater => {
                    return Ok(Report::with(
                        check,
                        Verdict::Fail,
                        labels(d, &[i, j]),
                        format!("deviation exceeds {}", format_rational(bound)),
                        max_precision,
                    ))
                }
                Comparison::Unresolved => {
                    return Ok(Report::with(
                        check,
                        Verdict::Unresolved,
                        labels(d, &[i, j]),
                        "deviation comparison undecided".into(),
                        max_precision,
                    ))
                }
                _ => {}
            }
        }
    }
    Ok(Report::pass(check, max_precision))
}

/// Groups `values` into classes of equal value. Enclosures sort the values
/// first, so only overlapping candidates are compared exactly.
fn value_classes(values: &[&CodedReal], p: u64) -> std::result::Result<Vec<usize>, (usize, usize)> {
    let encl: Vec<Enclosure> = values
        .iter()
        .map(|v| match v.as_rational() {
            Some(q) => Enclosure::point(q.clone()),
            None => v.eval(SWEEP_DEPTH),
        })
        .collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| encl[a].lo.cmp(&encl[b].lo));
    let mut class: Vec<usize> = (0..values.len()).collect();
    fn find(class: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while class[r] != r {
            r = class[r];
        }
        class[x] = r;
        r
    }
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if encl[b].lo > encl[a].hi {
                break;
            }
            match compare(values[a], values[b], p) {
                Comparison::Equal => {
                    let (ra, rb) = (find(&mut class, a), find(&mut class, b));
                    class[ra.max(rb)] = ra.min(rb);
                }
                Comparison::Unresolved => return Err((a, b)),
                _ => {}
            }
        }
    }
    Ok((0..values.len()).map(|i| find(&mut class, i)).collect())
}

/// All positive distances are attained by exactly one unordered pair.
pub fn is_strongly_rigid(d: &FiniteMetric, max_precision: u64) -> Report {
    let check = "sr";
    let pairs: Vec<(usize, usize)> = d.pairs().collect();
    let values: Vec<&CodedReal> = pairs.iter().map(|&(i, j)| d.get(i, j)).collect();
    match value_classes(&values, max_precision) {
        Err((a, b)) => Report::with(
            check,
            Verdict::Unresolved,
            labels(d, &[pairs[a].0, pairs[a].1, pairs[b].0, pairs[b].1]),
            "equality undecided".into(),
            max_precision,
        ),
        Ok(class) => {
            for a in 0..class.len() {
                if class[a] != a {
                    let b = class[a];
                    let zero = CodedReal::zero();
                    if compare(values[a], &zero, max_precision) == Comparison::Equal {
                        continue;
                    }
                    return Report::with(
                        check,
                        Verdict::Fail,
                        labels(d, &[pairs[b].0, pairs[b].1, pairs[a].0, pairs[a].1]),
                        "two pairs share a distance".into(),
                        max_precision,
                    );
                }
            }
            Report::pass(check, max_precision)
        }
    }
}

/// Every distance-preserving permutation, as image lists `perm[i]`.
pub fn isometry_group(d: &FiniteMetric, max_precision: u64) -> Result<Vec<Vec<usize>>> {
    let n = d.len();
    if n > MAX_ISOMETRY_POINTS {
        return Err(Error::Resource(format!(
            "isometry search is limited to {MAX_ISOMETRY_POINTS} points, got {n}"
        )));
    }
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let values: Vec<&CodedReal> = cells.iter().map(|&(i, j)| d.get(i, j)).collect();
    let class = value_classes(&values, max_precision).map_err(|(a, b)| {
        Error::Unresolved(format!("entries {:?} and {:?} could not be compared", cells[a], cells[b]))
    })?;
    let id = |i: usize, j: usize| class[i * n + j];
    let fingerprints: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut row: Vec<usize> = (0..n).map(|j| id(i, j)).collect();
            row.sort_unstable();
            row
        })
        .collect();

    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        i: usize,
        n: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        fp: &[Vec<usize>],
        id: &dyn Fn(usize, usize) -> usize,
    ) {
        if i == n {
            out.push(perm.clone());
            return;
        }
        for img in 0..n {
            if used[img] || fp[i] != fp[img] {
                continue;
            }
            if (0..i).all(|j| id(i, j) == id(img, perm[j])) {
                perm[i] = img;
                used[img] = true;
                extend(i + 1, n, perm, used, out, fp, id);
                used[img] = false;
            }
        }
    }
    extend(0, n, &mut perm, &mut used, &mut out, &fingerprints, &id);
    Ok(out)
}

/// Passes when the only isometry is the identity.
pub fn is_rigid(d: &FiniteMetric, max_precision: u64) -> Report {
    let check = "rigid";
    match isometry_group(d, max_precision) {
        Err(e @ Error::Unresolved(_)) => {
            Report::with(check, Verdict::Unresolved, vec![], e.to_string(), max_precision)
        }
        Err(e) => Report::with(check, Verdict::Unresolved, vec![], e.to_string(), max_precision),
        Ok(group) => match group.iter().find(|p| p.iter().enumerate().any(|(i, &j)| i != j)) {
            None => Report::pass(check, max_precision),
            Some(p) => Report::with(
                check,
                Verdict::Fail,
                p.iter().map(|&j| d.label(j).to_string()).collect(),
                format!("{} isometries; witness lists the image of each point", group.len()),
                max_precision,
            ),
        },
    }
}

/// Outcome of the `L_{n,m}` membership search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member([usize; 4]),
    NonMember,
    Unresolved([usize; 4]),
}

fn at_least(x: &CodedReal, threshold: &CodedReal, p: u64) -> Option<bool> {
    match compare(x, threshold, p) {
        Comparison::Unresolved => None,
        c => Some(c != Comparison::Less),
    }
}

/// Searches for `(x, y, u, v)` with `d(x,y) = d(u,v) >= 2^-m` and both
/// cross sums `d(x,u) + d(y,v)` and `d(x,v) + d(u,y)` at least `2^-m`.
pub fn lnm_search(d: &FiniteMetric, m: u32, max_precision: u64) -> Membership {
    let n = d.len();
    let threshold = CodedReal::rational(pow2(-(m as i64)));
    let mut undecided = None;
    for (x, y) in d.pairs() {
        match at_least(d.get(x, y), &threshold, max_precision) {
            Some(true) => {}
            Some(false) => continue,
            None => {
                undecided.get_or_insert([x, y, x, y]);
                continue;
            }
        }
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let same = match compare(d.get(x, y), d.get(u, v), max_precision) {
                    Comparison::Equal => true,
                    Comparison::Unresolved => {
                        undecided.get_or_insert([x, y, u, v]);
                        continue;
                    }
                    _ => false,
                };
                if !same {
                    continue;
                }
                let c1 = at_least(&(d.get(x, u) + d.get(y, v)), &threshold, max_precision);
                let c2 = at_least(&(d.get(x, v) + d.get(u, y)), &threshold, max_precision);
                match (c1, c2) {
                    (Some(true), Some(true)) => return Membership::Member([x, y, u, v]),
                    (Some(false), _) | (_, Some(false)) => {}
                    _ => {
                        undecided.get_or_insert([x, y, u, v]);
                    }
                }
            }
        }
    }
    match undecided {
        Some(w) => Membership::Unresolved(w),
        None => Membership::NonMember,
    }
}

/// Report form of [`lnm_search`]: passes when `d` is *not* in `L_{n,m}`.
pub fn lnm_membership(d: &FiniteMetric, m: u32, max_precision: u64) -> Report {
    let check = "lnm";
    match lnm_search(d, m, max_precision) {
        Membership::NonMember => Report::pass(check, max_precision),
        Membership::Member(w) => Report::with(
            check,
            Verdict::Fail,
            labels(d, &w),
            format!("member of L(m={m}): d(x,y) = d(u,v) with both cross sums >= 2^-{m}"),
            max_precision,
        ),
        Membership::Unresolved(w) => {
            Report::with(check, Verdict::Unresolved, labels(d, &w), "comparison undecided".into(), max_precision)
        }
    }
}

/// Scales `m = 0 ..= ceil(-log2(min positive distance)) + 2`; beyond these
/// every positive distance and every nonzero cross sum clears `2^-m`.
pub fn relevant_scales(d: &FiniteMetric) -> u32 {
    let mut min: Option<Rational> = None;
    for (i, j) in d.pairs() {
        let e = abs_enclosure(d.get(i, j));
        if e.lo.is_positive() && min.as_ref().is_none_or(|m| e.lo < *m) {
            min = Some(e.lo);
        }
    }
    let Some(min) = min else { return 2 };
    let neg_log = -floor_log2(&min);
    let ceil = ceil_int(&Rational::from_integer(neg_log.into()));
    let base: i64 = ceil.try_into().unwrap_or(0);
    (base.max(0) + 2) as u32
}

/// `None` when some scale is undecided; otherwise whether `d` avoids every
/// `L_{n,m}` for the relevant scales.
pub fn avoids_all_lnm(d: &FiniteMetric, max_precision: u64) -> Option<bool> {
    for m in 0..=relevant_scales(d) {
        match lnm_search(d, m, max_precision) {
            Membership::Member(_) => return Some(false),
            Membership::Unresolved(_) => return None,
            Membership::NonMember => {}
        }
    }
    Some(true)
}

/// `x -> d(x, xi)` is injective.
pub fn distance_embedding_check(d: &FiniteMetric, xi: usize, max_precision: u64) -> Report {
    let check = "embed";
    let column: Vec<&CodedReal> = (0..d.len()).map(|x| d.get(x, xi)).collect();
    match value_classes(&column, max_precision) {
        Err((a, b)) => Report::with(check, Verdict::Unresolved, labels(d, &[a, b]), "undecided".into(), max_precision),
        Ok(class) => match (0..class.len()).find(|&a| class[a] != a) {
            None => Report::pass(check, max_precision),
            Some(a) => Report::with(
                check,
                Verdict::Fail,
                labels(d, &[class[a], a]),
                format!("both points are equidistant from {}", d.label(xi)),
                max_precision,
            ),
        },
    }
}
