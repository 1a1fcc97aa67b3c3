#![allow(dead_code)]

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rigidmetric::numbers::{rat, Rational};
use rigidmetric::FiniteMetric;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A rational drawn uniformly from `{ lo + i/den : 0 <= i <= (hi-lo)*den }`.
pub fn random_rational(rng: &mut StdRng, lo: &Rational, hi: &Rational, den: i64) -> Rational {
    let steps = ((hi - lo) * Rational::from_integer(den.into())).floor().to_integer();
    let steps: i64 = steps.try_into().unwrap();
    lo + rat(rng.random_range(0..=steps), den)
}

/// Shortest-path closure of positive symmetric weights.
pub fn closure(mut w: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = w.len();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &w[i][m] + &w[m][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    w
}

fn from_weights(w: Vec<Vec<Rational>>) -> FiniteMetric {
    let n = w.len();
    FiniteMetric::from_rationals(FiniteMetric::default_labels(n), closure(w)).unwrap()
}

/// Random metric with weights in `[1/2, 3]`.
pub fn random_metric(rng: &mut StdRng, n: usize) -> FiniteMetric {
    let mut w = vec![vec![Rational::default(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = random_rational(rng, &rat(1, 2), &rat(3, 1), 12);
            w[i][j] = v.clone();
            w[j][i] = v;
        }
    }
    from_weights(w)
}

/// Random metric made of tight clusters far apart, so partitions have
/// blocks of several points.
pub fn clustered_metric(rng: &mut StdRng, n: usize) -> FiniteMetric {
    let clusters = rng.random_range(1..=n.div_ceil(2));
    let tag: Vec<usize> = (0..n).map(|_| rng.random_range(0..clusters)).collect();
    let mut w = vec![vec![Rational::default(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if tag[i] == tag[j] {
                random_rational(rng, &rat(1, 200), &rat(1, 100), 1000)
            } else {
                random_rational(rng, &rat(1, 1), &rat(4, 1), 12)
            };
            w[i][j] = v.clone();
            w[j][i] = v;
        }
    }
    from_weights(w)
}

/// Symmetric zero-diagonal matrix with entries from a small pool, so equal
/// distances are common. Not necessarily a metric.
pub fn random_pool_matrix(rng: &mut StdRng, n: usize) -> FiniteMetric {
    let pool_size = rng.random_range(2..=n * n);
    let pool: Vec<Rational> =
        (0..pool_size).map(|_| random_rational(rng, &rat(1, 16), &rat(4, 1), 16)).collect();
    let mut w = vec![vec![Rational::default(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = pool[rng.random_range(0..pool.len())].clone();
            w[i][j] = v.clone();
            w[j][i] = v;
        }
    }
    FiniteMetric::from_rationals(FiniteMetric::default_labels(n), w).unwrap()
}

pub fn big(n: u64) -> BigInt {
    BigInt::from(n)
}
