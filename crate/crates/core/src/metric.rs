//! Labeled finite metric spaces with exact entries.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::{format_rational, parse_rational, CodedReal, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetric {
    points: Vec<String>,
    matrix: Vec<Vec<CodedReal>>,
}

impl FiniteMetric {
    /// Checks shape, labels, zero diagonal and symmetry. Triangle
    /// inequalities and positivity are left to [`crate::verify::is_metric`].
    pub fn new(points: Vec<String>, matrix: Vec<Vec<CodedReal>>) -> Result<Self> {
        let n = points.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric(format!("matrix is not {n}x{n}")));
        }
        let mut seen = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if let Some(j) = seen.insert(p.as_str(), i) {
                return Err(Error::InvalidMetric(format!("label {p:?} repeated at {j} and {i}")));
            }
        }
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(Error::InvalidMetric(format!("nonzero diagonal at {:?}", points[i])));
            }
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidMetric(format!(
                        "asymmetric entry between {:?} and {:?}",
                        points[i], points[j]
                    )));
                }
            }
        }
        Ok(FiniteMetric { points, matrix })
    }

    pub fn from_rationals(points: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let coded = matrix
            .into_iter()
            .map(|row| row.into_iter().map(CodedReal::rational).collect())
            .collect();
        FiniteMetric::new(points, coded)
    }

    /// Builds a symmetric matrix from the strict upper triangle.
    pub fn from_fn(
        points: Vec<String>,
        mut dist: impl FnMut(usize, usize) -> Result<CodedReal>,
    ) -> Result<Self> {
        let n = points.len();
        let mut matrix = vec![vec![CodedReal::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = dist(i, j)?;
                matrix[j][i] = v.clone();
                matrix[i][j] = v;
            }
        }
        FiniteMetric::new(points, matrix)
    }

    /// Points labeled `0, 1, ..., n-1`.
    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn get(&self, i: usize, j: usize) -> &CodedReal {
        &self.matrix[i][j]
    }

    pub fn matrix(&self) -> &[Vec<CodedReal>] {
        &self.matrix
    }

    /// Unordered pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    pub fn is_rational(&self) -> bool {
        self.matrix.iter().flatten().all(CodedReal::is_rational)
    }

    pub fn rational(&self, i: usize, j: usize) -> Option<&Rational> {
        self.matrix[i][j].as_rational()
    }

    pub fn rational_matrix(&self) -> Option<Vec<Vec<Rational>>> {
        self.matrix
            .iter()
            .map(|row| row.iter().map(|v| v.as_rational().cloned()).collect())
            .collect()
    }

    /// The sub-metric on `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> FiniteMetric {
        FiniteMetric {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            matrix: indices
                .iter()
                .map(|&i| indices.iter().map(|&j| self.matrix[i][j].clone()).collect())
                .collect(),
        }
    }

    pub fn same_points(&self, other: &FiniteMetric) -> bool {
        self.points == other.points
    }

    /// Comma-separated output: a header of labels, then one row per point.
    /// Only pure-rational matrices have a CSV form.
    pub fn to_csv(&self) -> Result<String> {
        let rows = self
            .rational_matrix()
            .ok_or_else(|| Error::Domain("CSV output needs rational entries".into()))?;
        let mut out = self.points.join(",");
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let points: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut matrix = Vec::with_capacity(points.len());
        for line in lines {
            let row = line.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            matrix.push(row);
        }
        FiniteMetric::from_rationals(points, matrix)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metric serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A matrix entry on the wire: `"p/q"` when rational, a coded object otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryWire {
    Rational(String),
    Coded(CodedReal),
}

#[derive(Serialize, Deserialize)]
struct MetricWire {
    points: Vec<String>,
    matrix: Vec<Vec<EntryWire>>,
}

impl Serialize for FiniteMetric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| match v.as_rational() {
                        Some(q) => EntryWire::Rational(format_rational(q)),
                        None => EntryWire::Coded(v.clone()),
                    })
                    .collect()
            })
            .collect();
        MetricWire { points: self.points.clone(), matrix }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteMetric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = MetricWire::deserialize(d)?;
        let mut matrix = Vec::with_capacity(wire.matrix.len());
        for row in wire.matrix {
            let mut out = Vec::with_capacity(row.len());
            for entry in row {
                out.push(match entry {
                    EntryWire::Rational(s) => {
                        CodedReal::rational(parse_rational(&s).map_err(serde::de::Error::custom)?)
                    }
                    EntryWire::Coded(c) => c,
                });
            }
            matrix.push(out);
        }
        FiniteMetric::new(wire.points, matrix).map_err(serde::de::Error::custom)
    }
}

/// A convenience for tests and examples: the metric with the given strict
/// upper triangle, row by row.
pub fn metric_from_upper(values: &[Rational]) -> Result<FiniteMetric> {
    let mut n = 1;
    while n * (n - 1) / 2 < values.len() {
        n += 1;
    }
    if n * (n - 1) / 2 != values.len() {
        return Err(Error::InvalidMetric(format!(
            "{} values do not form an upper triangle",
            values.len()
        )));
    }
    let mut it = values.iter();
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = it.next().expect("counted").clone();
            matrix[i][j] = v.clone();
            matrix[j][i] = v;
        }
    }
    FiniteMetric::from_rationals(FiniteMetric::default_labels(n), matrix)
}
