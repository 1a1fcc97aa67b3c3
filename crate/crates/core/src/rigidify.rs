//! Grid snapping, disjoint dense streams of rationals, and the discrete
//! strongly rigid perturbation.
//!
//! Stream `alpha` draws from `A(alpha) = { a / p^e : e >= 1, p does not
//! divide a }` where `p` is the `alpha`-th prime. Distinct primes give
//! disjoint families, and each family is dense in `(0, inf)`.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::numbers::rational::{ceil_int, floor_int, pow2};
use crate::numbers::{CodedReal, RationalEnumeration, Rational};
use crate::product::cantor_unpair;

/// The `n`-th prime, counting from `nth_prime(0) = 2`.
pub fn nth_prime(n: u64) -> u64 {
    let mut count = 0;
    let mut candidate = 1u64;
    loop {
        candidate += 1;
        if (2..).take_while(|d| d * d <= candidate).all(|d| candidate % d != 0) {
            if count == n {
                return candidate;
            }
            count += 1;
        }
    }
}

/// Whether `q` belongs to the family built on prime `p`.
pub fn in_family(p: u64, q: &Rational) -> bool {
    if !q.is_positive() || q.denom().is_one() {
        return false;
    }
    let pb = BigInt::from(p);
    let mut d = q.denom().clone();
    while d.is_multiple_of(&pb) {
        d /= &pb;
    }
    d.is_one()
}

/// The `j`-th element of the family on `p` inside `(0, 1)`, listing
/// exponent 1 first and numerators increasingly within each exponent.
pub fn family_unit(p: u64, j: &BigUint) -> Rational {
    let pb = BigUint::from(p);
    let mut rest = j.clone();
    let mut scale = pb.clone();
    loop {
        // p^(e-1) (p - 1) numerators at exponent e.
        let count = &scale / &pb * (p - 1);
        if rest < count {
            let a: BigUint = &rest + &rest / (p - 1) + 1u32;
            return Rational::new(BigInt::from(a), BigInt::from(scale));
        }
        rest -= count;
        scale *= &pb;
    }
}

/// The open window `(N + 2^(-N-1), N + 2^-N)`.
pub fn interval_window(n: u64) -> (Rational, Rational) {
    let base = Rational::from_integer(BigInt::from(n));
    let e = n as i64;
    (&base + pow2(-e - 1), base + pow2(-e))
}

/// A stateful, single-owner stream of rationals from one family.
#[derive(Clone, Debug)]
pub struct DenseStream {
    alpha: u64,
    prime: u64,
    rng: ChaCha8Rng,
    emitted: HashSet<Rational>,
    cursor: u64,
}

const CANDIDATES_PER_DRAW: usize = 64;

impl DenseStream {
    pub fn new(alpha: u64, seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&alpha.to_le_bytes());
        DenseStream {
            alpha,
            prime: nth_prime(alpha),
            rng: ChaCha8Rng::from_seed(key),
            emitted: HashSet::new(),
            cursor: 0,
        }
    }

    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn contains(&self, q: &Rational) -> bool {
        in_family(self.prime, q)
    }

    pub fn emitted(&self) -> &HashSet<Rational> {
        &self.emitted
    }

    /// The `n`-th base interval `(Q(x), Q(y))` with `(x, y)` the `n`-th
    /// Cantor pair; `None` when the endpoints are out of order.
    pub fn base_interval(n: u64) -> Option<(Rational, Rational)> {
        let (x, y) = cantor_unpair(&BigUint::from(n));
        let q = RationalEnumeration;
        let c = q.value_big(&x);
        let d = q.value_big(&y);
        (c < d).then_some((c, d))
    }

    /// A not-yet-emitted family element strictly inside `(lo, hi)`. Among
    /// the smallest exponent with fresh candidates, one is picked at random.
    pub fn draw_in(&mut self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        if lo >= hi || lo.is_negative() {
            return Err(Error::Domain(format!("cannot draw from ({lo}, {hi})")));
        }
        let p = BigInt::from(self.prime);
        let mut scale = p.clone();
        loop {
            let scale_q = Rational::from_integer(scale.clone());
            let first: BigInt = floor_int(&(lo * &scale_q)) + 1;
            let last: BigInt = ceil_int(&(hi * &scale_q)) - 1;
            let mut candidates = Vec::new();
            let mut a = first;
            while a <= last && candidates.len() < CANDIDATES_PER_DRAW {
                if !a.is_multiple_of(&p) {
                    let q = Rational::new(a.clone(), scale.clone());
                    if !self.emitted.contains(&q) {
                        candidates.push(q);
                    }
                }
                a += 1;
            }
            if !candidates.is_empty() {
                let pick = self.rng.random_range(0..candidates.len());
                let q = candidates.swap_remove(pick);
                self.emitted.insert(q.clone());
                return Ok(q);
            }
            scale *= &p;
        }
    }
}

impl Iterator for DenseStream {
    type Item = Rational;

    /// Walks the base intervals in order, emitting one fresh element in each.
    fn next(&mut self) -> Option<Rational> {
        loop {
            let n = self.cursor;
            self.cursor += 1;
            if let Some((c, d)) = DenseStream::base_interval(n) {
                return Some(self.draw_in(&c, &d).expect("base intervals are nonempty"));
            }
        }
    }
}

/// Stream `alpha` with the default seed.
pub fn dense_decomposition(alpha: u64) -> DenseStream {
    DenseStream::new(alpha, 0)
}

/// A stream element inside `(N + 2^(-N-1), N + 2^-N)`.
pub fn pick_interval_value(n: u64, stream: &mut DenseStream) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("interval index must be at least 1".into()));
    }
    let (lo, hi) = interval_window(n);
    stream.draw_in(&lo, &hi)
}

fn rational_entries(d: &FiniteMetric) -> Result<Vec<Vec<Rational>>> {
    d.rational_matrix()
        .ok_or_else(|| Error::Domain("operation needs rational distances".into()))
}

/// `e(x, y) = eta * ceil(d(x, y) / eta)` off the diagonal.
pub fn snap_to_grid(d: &FiniteMetric, eta: &Rational) -> Result<FiniteMetric> {
    if !eta.is_positive() {
        return Err(Error::Domain("grid step must be positive".into()));
    }
    let m = rational_entries(d)?;
    FiniteMetric::from_fn(d.points().to_vec(), |i, j| {
        if !m[i][j].is_positive() {
            return Err(Error::InvalidMetric(format!(
                "distance between {:?} and {:?} is not positive",
                d.label(i),
                d.label(j)
            )));
        }
        let steps = Rational::from_integer(ceil_int(&(&m[i][j] / eta)));
        Ok(CodedReal::rational(eta * steps))
    })
}

/// Strongly rigid, uniformly discrete metric within `epsilon` of `d`, with
/// strict triangle inequalities. Pair number `alpha` (lexicographic order)
/// takes its value from stream `alpha`.
pub fn perturb_strongly_rigid(
    d: &FiniteMetric,
    epsilon: &Rational,
    seed: u64,
) -> Result<FiniteMetric> {
    if d.len() < 2 {
        return Err(Error::Degenerate("need at least two points".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let eta = epsilon / Rational::from_integer(2.into());
    let snapped = snap_to_grid(d, &eta)?;
    let grid = rational_entries(&snapped)?;
    let mut alpha = 0u64;
    FiniteMetric::from_fn(d.points().to_vec(), |i, j| {
        let steps = (&grid[i][j] / &eta).to_integer();
        let n = steps
            .to_u64()
            .ok_or_else(|| Error::Resource(format!("grid index {steps} too large")))?;
        let mut stream = DenseStream::new(alpha, seed);
        alpha += 1;
        let w = pick_interval_value(n, &mut stream)?;
        Ok(CodedReal::rational(&eta * w))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::{int, rat};
    use num_traits::Zero;

    #[test]
    fn primes() {
        let first: Vec<u64> = (0..8).map(nth_prime).collect();
        assert_eq!(first, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn family_units_are_distinct_and_in_family() {
        let mut seen = HashSet::new();
        for j in 0u32..200 {
            let u = family_unit(3, &BigUint::from(j));
            assert!(u > Rational::zero() && u < int(1));
            assert!(in_family(3, &u));
            assert!(seen.insert(u));
        }
        assert_eq!(family_unit(3, &BigUint::from(0u32)), rat(1, 3));
        assert_eq!(family_unit(3, &BigUint::from(2u32)), rat(1, 9));
        assert_eq!(family_unit(3, &BigUint::from(4u32)), rat(4, 9));
    }

    #[test]
    fn windows() {
        assert_eq!(interval_window(1), (rat(5, 4), rat(3, 2)));
        assert_eq!(interval_window(2), (rat(17, 8), rat(9, 4)));
    }

    #[test]
    fn draws_stay_inside_and_fresh() {
        let mut s = DenseStream::new(1, 7);
        let (lo, hi) = (rat(1, 3), rat(1, 2));
        let mut seen = HashSet::new();
        for _ in 0..50 {
            let q = s.draw_in(&lo, &hi).unwrap();
            assert!(lo < q && q < hi && s.contains(&q));
            assert!(seen.insert(q));
        }
    }

    #[test]
    fn snapping_example() {
        let d = crate::metric::metric_from_upper(&[rat(7, 10)]).unwrap();
        let e = snap_to_grid(&d, &rat(1, 2)).unwrap();
        assert_eq!(e.rational(0, 1), Some(&int(1)));
    }
}
