//! Fixtures shared by the benchmarks.

use rigidmetric::numbers::{rat, Rational};
use rigidmetric::FiniteMetric;

/// `n` points on a line at spacing 1/2, with a small twist so distances are
/// not all multiples of one step.
pub fn line_metric(n: usize) -> FiniteMetric {
    let pos: Vec<Rational> = (0..n as i64).map(|i| rat(i, 2) + rat(i * i, 97)).collect();
    let matrix = pos
        .iter()
        .map(|a| pos.iter().map(|b| if a > b { a - b } else { b - a }).collect())
        .collect();
    FiniteMetric::from_rationals(FiniteMetric::default_labels(n), matrix).expect("line metric")
}
