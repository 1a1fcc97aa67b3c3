//! Metrics on finite words over the alphabet `Z>=0`: level-wise semi-metrics,
//! the set-coded metrics `rho`, `sigma`, `tau`, and the prism map.
//!
//! `sigma(x, y) = <gamma_k, U_m [m, r_m(x_m, y_m))>` where `r_m` takes
//! values in `(m, m+1)`, and `tau(x, y) = sigma(prism x, prism y)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::numbers::{CodedReal, ExponentSchedule, IntervalSet, Rational};
use crate::rigidify::{family_unit, nth_prime};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<BigUint>);

impl Word {
    pub fn from_letters(letters: &[u64]) -> Self {
        Word(letters.iter().map(|&l| BigUint::from(l)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[BigUint] {
        &self.0
    }

    /// The first `n + 1` letters.
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..=n].to_vec())
    }

    /// All `alphabet^length` words in lexicographic order.
    pub fn all(alphabet: u64, length: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        for _ in 0..length {
            out = out
                .into_iter()
                .flat_map(|w: Vec<u64>| {
                    (0..alphabet).map(move |l| {
                        let mut next = w.clone();
                        next.push(l);
                        next
                    })
                })
                .collect();
        }
        out.iter().map(|w| Word::from_letters(w)).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// `(a + b)(a + b + 1)/2 + b`.
pub fn cantor_pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    (&s * (&s + 1u32) >> 1u32) + b
}

pub fn cantor_unpair(z: &BigUint) -> (BigUint, BigUint) {
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1u32;
    let y = z - t;
    let x = w - &y;
    (x, y)
}

/// `f_n` on a prefix of length `n + 1`: the identity for `n = 0`, otherwise
/// the left fold of Cantor pairing over the letters.
pub fn pair_encode(n: usize, prefix: &Word) -> Result<BigUint> {
    if prefix.len() != n + 1 {
        return Err(Error::Domain(format!(
            "level {n} needs a prefix of length {}, got {}",
            n + 1,
            prefix.len()
        )));
    }
    let mut letters = prefix.0.iter();
    let first = letters.next().expect("length checked").clone();
    Ok(letters.fold(first, |acc, l| cantor_pair(&acc, l)))
}

/// Interleaves each letter with the code of the prefix ending there.
pub fn prism(x: &Word) -> Word {
    let mut out = Vec::with_capacity(2 * x.len());
    let mut code = BigUint::zero();
    for (n, l) in x.0.iter().enumerate() {
        code = if n == 0 { l.clone() } else { cantor_pair(&code, l) };
        out.push(l.clone());
        out.push(code.clone());
    }
    Word(out)
}

/// A family of strongly rigid semi-metrics, one per level, all valued in
/// the family of rationals tagged by this gauge's prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SemiMetricGauge {
    pub id: u64,
    pub prime: u64,
}

impl SemiMetricGauge {
    pub fn new(id: u64) -> Self {
        SemiMetricGauge { id, prime: nth_prime(id) }
    }

    /// `r_level(a, b)`: zero on the diagonal, otherwise in `(level, level+1)`
    /// and injective on unordered pairs.
    pub fn value(&self, level: usize, a: &BigUint, b: &BigUint) -> Rational {
        if a == b {
            return Rational::zero();
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let code = cantor_pair(lo, hi);
        Rational::from_integer(level.into()) + family_unit(self.prime, &code)
    }
}

pub fn semi_metric(gauge: &SemiMetricGauge, level: usize, a: &BigUint, b: &BigUint) -> Rational {
    gauge.value(level, a, b)
}

fn level_interval(gauge: &SemiMetricGauge, m: usize, a: &BigUint, b: &BigUint) -> (Rational, Rational) {
    (Rational::from_integer(m.into()), gauge.value(m, a, b))
}

/// `<gamma_k, [m, r_m(a, b))>`.
pub fn rho(gauge: &SemiMetricGauge, k: u32, m: usize, a: &BigUint, b: &BigUint) -> CodedReal {
    let (lo, hi) = level_interval(gauge, m, a, b);
    let set = IntervalSet::interval(lo, hi).expect("level interval is nonnegative");
    CodedReal::set_sum(ExponentSchedule::new(k), set)
}

fn check_lengths(x: &Word, y: &Word) -> Result<()> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Domain(format!(
            "words must be nonempty and of equal length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// The index set `U_m [m, r_m(x_m, y_m))` of `sigma`.
pub fn sigma_index_set(gauge: &SemiMetricGauge, x: &Word, y: &Word) -> Result<IntervalSet> {
    check_lengths(x, y)?;
    let blocks = x
        .0
        .iter()
        .zip(&y.0)
        .enumerate()
        .map(|(m, (a, b))| level_interval(gauge, m, a, b))
        .collect();
    IntervalSet::from_blocks(blocks)
}

pub fn sigma(gauge: &SemiMetricGauge, k: u32, x: &Word, y: &Word) -> Result<CodedReal> {
    Ok(CodedReal::set_sum(ExponentSchedule::new(k), sigma_index_set(gauge, x, y)?))
}

pub fn tau(gauge: &SemiMetricGauge, k: u32, x: &Word, y: &Word) -> Result<CodedReal> {
    check_lengths(x, y)?;
    sigma(gauge, k, &prism(x), &prism(y))
}

/// Every `(level, a, b)` whose semi-metric value enters `tau(x, y)`.
pub fn tau_levels(x: &Word, y: &Word) -> Vec<(usize, BigUint, BigUint)> {
    let (px, py) = (prism(x), prism(y));
    px.0.into_iter()
        .zip(py.0)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(m, (a, b))| (m, a, b))
        .collect()
}

/// The full `tau` distance matrix on `words`, labeled by the words.
pub fn tau_metric(gauge: &SemiMetricGauge, k: u32, words: &[Word]) -> Result<FiniteMetric> {
    let labels = words.iter().map(Word::to_string).collect();
    FiniteMetric::from_fn(labels, |i, j| tau(gauge, k, &words[i], &words[j]))
}

/// Least `n` such that truncating every word to its first `n + 1` letters
/// keeps each pair's members apart and all unordered pairs distinct.
pub fn find_separating_prefix(pairs: &[(Word, Word)]) -> Result<usize> {
    let len = pairs
        .first()
        .map(|(x, _)| x.len())
        .ok_or_else(|| Error::Domain("no pairs given".into()))?;
    if len == 0 || pairs.iter().any(|(x, y)| x.len() != len || y.len() != len) {
        return Err(Error::Domain("all words must share one nonzero length".into()));
    }
    'level: for n in 0..len {
        let mut seen = std::collections::HashSet::new();
        for (x, y) in pairs {
            let (a, b) = (x.prefix(n), y.prefix(n));
            if a == b {
                continue 'level;
            }
            let key = if a < b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                continue 'level;
            }
        }
        return Ok(n);
    }
    Err(Error::Domain("pairs are not separated even at full length".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::int;

    fn w(letters: &[u64]) -> Word {
        Word::from_letters(letters)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pair_encode(0, &w(&[3])).unwrap(), BigUint::from(3u32));
        assert_eq!(pair_encode(1, &w(&[3, 5])).unwrap(), BigUint::from(41u32));
        assert_eq!(pair_encode(2, &w(&[0, 0, 0])).unwrap(), BigUint::zero());
        assert!(pair_encode(1, &w(&[3])).is_err());
    }

    #[test]
    fn cantor_round_trip() {
        let mut seen = std::collections::HashSet::new();
        for a in 0u32..50 {
            for b in 0u32..50 {
                let z = cantor_pair(&a.into(), &b.into());
                assert_eq!(cantor_unpair(&z), (a.into(), b.into()));
                assert!(seen.insert(z));
            }
        }
    }

    #[test]
    fn prism_examples() {
        assert_eq!(prism(&w(&[3, 5])), w(&[3, 3, 5, 41]));
        assert_eq!(prism(&w(&[0])), w(&[0, 0]));
    }

    #[test]
    fn semi_metric_axioms() {
        let g = SemiMetricGauge::new(1);
        let seven = BigUint::from(7u32);
        assert_eq!(g.value(0, &seven, &seven), Rational::zero());
        let v01 = g.value(0, &0u32.into(), &1u32.into());
        let v02 = g.value(0, &0u32.into(), &2u32.into());
        assert_ne!(v01, v02);
        assert!(v01 > int(0) && v01 < int(1));
        assert_eq!(g.value(3, &4u32.into(), &1u32.into()), g.value(3, &1u32.into(), &4u32.into()));
        let other = SemiMetricGauge::new(2);
        assert_ne!(other.value(0, &0u32.into(), &1u32.into()), v01);
    }

    #[test]
    fn separating_prefixes() {
        let pairs = [(w(&[0, 0]), w(&[0, 1])), (w(&[1, 0]), w(&[1, 1]))];
        assert_eq!(find_separating_prefix(&pairs).unwrap(), 1);
        assert_eq!(find_separating_prefix(&[(w(&[0, 5]), w(&[1, 5]))]).unwrap(), 0);
        let shared = [(w(&[0, 0, 0]), w(&[0, 0, 1])), (w(&[0, 0, 0]), w(&[0, 0, 2]))];
        assert_eq!(find_separating_prefix(&shared).unwrap(), 2);
        let same = [(w(&[0, 1]), w(&[0, 1]))];
        assert!(find_separating_prefix(&same).is_err());
    }
}
