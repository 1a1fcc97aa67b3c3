//! The fixed enumeration `Q: Z>=0 -> Q>=0` with property (M), together with
//! the Calkin–Wilf / Stern–Brocot machinery needed to invert it and to find
//! the least index whose enumerated rational falls in a given range.
//!
//! Index layout: `n + 1 = 2^m (2k + 1)`. Index `n` belongs to the integer
//! slice `m`; `k = 0` maps to the integer `m` itself and `k >= 1` maps to
//! `m + cw(2k)`, where `cw` is the Calkin–Wilf sequence (`cw(2k)` ranges
//! over `(0, 1)` exactly once). Consequently the first index landing in
//! `[m, m + 1)` is `2^m - 1` and it lands on `m`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{floor_int, Rational};
use crate::error::{Error, Result};

/// Cap on the length of a Stern–Brocot path, in bits of the resulting index.
pub const DEFAULT_DEPTH_CAP: u64 = 1 << 20;

/// The `n`-th Calkin–Wilf rational (`n >= 1`; `cw(1) = 1`).
pub fn calkin_wilf(n: &BigUint) -> Rational {
    assert!(!n.is_zero(), "Calkin–Wilf indices start at 1");
    let mut a = BigUint::one();
    let mut b = BigUint::one();
    let bits = n.bits();
    for pos in (0..bits - 1).rev() {
        if n.bit(pos) {
            a = &a + &b;
        } else {
            b = &a + &b;
        }
    }
    Rational::new(to_int(a), to_int(b))
}

/// Inverse of [`calkin_wilf`] for a positive rational.
pub fn calkin_wilf_index(q: &Rational, depth_cap: u64) -> Result<BigUint> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("Calkin–Wilf index of non-positive {q}")));
    }
    let mut a = q.numer().magnitude().clone();
    let mut b = q.denom().magnitude().clone();
    // Runs collected leaf to root as (right?, length).
    let mut runs: Vec<(bool, BigUint)> = Vec::new();
    let mut depth = BigUint::zero();
    while !(a.is_one() && b.is_one()) {
        if a < b {
            let steps = b.div_ceil(&a) - 1u32;
            b -= &a * &steps;
            depth += &steps;
            runs.push((false, steps));
        } else {
            let steps = a.div_ceil(&b) - 1u32;
            a -= &b * &steps;
            depth += &steps;
            runs.push((true, steps));
        }
        if depth > BigUint::from(depth_cap) {
            return Err(Error::Resource(format!(
                "Calkin–Wilf index of {q} exceeds {depth_cap} bits"
            )));
        }
    }
    // Reading leaf-to-root runs gives the index bits from least significant.
    let mut index = BigUint::one();
    for (right, len) in runs.iter().rev() {
        let len = len.to_usize().expect("bounded by depth cap");
        index <<= len;
        if *right {
            index |= (BigUint::one() << len) - 1u32;
        }
    }
    let _ = runs;
    Ok(index)
}

/// The property-(M) bijection between indices and non-negative rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalEnumeration;

impl RationalEnumeration {
    pub fn value(&self, i: u64) -> Rational {
        self.value_big(&BigUint::from(i))
    }

    pub fn value_big(&self, i: &BigUint) -> Rational {
        let n = i + 1u32;
        let slice = n.trailing_zeros().unwrap_or(0);
        let odd = &n >> slice;
        let k: BigUint = (odd - 1u32) >> 1;
        let base = Rational::from_integer(BigInt::from(slice));
        if k.is_zero() {
            base
        } else {
            base + calkin_wilf(&(k << 1))
        }
    }

    /// The unique index `i` with `Q(i) = q`.
    pub fn index_of(&self, q: &Rational) -> Result<BigUint> {
        self.index_of_capped(q, DEFAULT_DEPTH_CAP)
    }

    pub fn index_of_capped(&self, q: &Rational, depth_cap: u64) -> Result<BigUint> {
        if q.is_negative() {
            return Err(Error::Domain(format!("enumeration covers Q>=0, got {q}")));
        }
        let slice = slice_of(&floor_int(q), depth_cap)?;
        let frac = q - Rational::from_integer(BigInt::from(slice));
        let k = if frac.is_zero() {
            BigUint::zero()
        } else {
            let x = &frac / (Rational::one() - &frac);
            calkin_wilf_index(&x, depth_cap)?
        };
        Ok(slice_index(slice, &k))
    }

    /// `l_m = min Q^{-1}([m, m+1))`, equal to `2^m - 1` for this enumeration.
    pub fn first_index_in_unit(&self, m: u64) -> BigUint {
        (BigUint::one() << m) - 1u32
    }
}

fn slice_of(m: &BigInt, depth_cap: u64) -> Result<u64> {
    m.to_u64()
        .filter(|&v| v <= depth_cap)
        .ok_or_else(|| Error::Resource(format!("integer part {m} too large to index")))
}

fn slice_index(slice: u64, k: &BigUint) -> BigUint {
    ((k * 2u32 + 1u32) << slice) - 1u32
}

fn to_int(n: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n)
}

/// One end of a [`Span`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Rational,
    pub closed: bool,
}

impl Endpoint {
    pub fn closed(value: Rational) -> Self {
        Endpoint { value, closed: true }
    }
    pub fn open(value: Rational) -> Self {
        Endpoint { value, closed: false }
    }
}

/// A convex set of non-negative rationals; `upper = None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub lower: Endpoint,
    pub upper: Option<Endpoint>,
}

impl Span {
    /// The half-open `[a, b)`.
    pub fn half_open(a: Rational, b: Rational) -> Self {
        Span { lower: Endpoint::closed(a), upper: Some(Endpoint::open(b)) }
    }

    pub fn is_empty(&self) -> bool {
        match &self.upper {
            None => false,
            Some(u) => {
                u.value < self.lower.value
                    || (u.value == self.lower.value && !(u.closed && self.lower.closed))
            }
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above_lower =
            *x > self.lower.value || (self.lower.closed && *x == self.lower.value);
        let below_upper = match &self.upper {
            None => true,
            Some(u) => *x < u.value || (u.closed && *x == u.value),
        };
        above_lower && below_upper
    }

    fn below(&self, x: &Rational) -> Span {
        Span { lower: self.lower.clone(), upper: Some(Endpoint::open(x.clone())) }
    }

    fn above(&self, x: &Rational) -> Span {
        Span { lower: Endpoint::open(x.clone()), upper: self.upper.clone() }
    }
}

/// The least index `i` with `Q(i)` in `span`, with that rational.
pub fn min_index_in(span: &Span, depth_cap: u64) -> Result<Option<(BigUint, Rational)>> {
    if span.is_empty() {
        return Ok(None);
    }
    if span.lower.value.is_negative() {
        return Err(Error::Domain("spans must lie in Q>=0".into()));
    }
    let first = slice_of(&floor_int(&span.lower.value), depth_cap)?;
    let mut best: Option<(BigUint, Rational)> = None;
    let mut m = first;
    loop {
        let m_rat = Rational::from_integer(BigInt::from(m));
        if let Some(u) = &span.upper {
            if m_rat > u.value || (m_rat == u.value && !u.closed) {
                break;
            }
        }
        let slice_floor = (BigUint::one() << m) - 1u32;
        if let Some((b, _)) = &best {
            if &slice_floor >= b {
                break;
            }
        }
        if let Some(candidate) = slice_candidate(span, m, &m_rat, depth_cap)? {
            if best.as_ref().is_none_or(|(b, _)| candidate.0 < *b) {
                best = Some(candidate);
            }
        }
        m += 1;
        if m > depth_cap {
            return Err(Error::Resource("integer slice search exceeded cap".into()));
        }
    }
    Ok(best)
}

fn slice_candidate(
    span: &Span,
    m: u64,
    m_rat: &Rational,
    depth_cap: u64,
) -> Result<Option<(BigUint, Rational)>> {
    if span.contains(m_rat) {
        return Ok(Some(((BigUint::one() << m) - 1u32, m_rat.clone())));
    }
    // Fractional window inside (0, 1); the integer itself is excluded here.
    let lower = if span.lower.value > *m_rat {
        let f = &span.lower.value - m_rat;
        if f >= Rational::one() {
            return Ok(None);
        }
        Endpoint { value: &f / (Rational::one() - &f), closed: span.lower.closed }
    } else {
        Endpoint::open(Rational::zero())
    };
    let next = m_rat + Rational::one();
    let upper = match &span.upper {
        Some(u) if u.value < next => {
            let f = &u.value - m_rat;
            Some(Endpoint { value: &f / (Rational::one() - &f), closed: u.closed })
        }
        _ => None,
    };
    let window = Span { lower, upper };
    Ok(simplest_positive(&window, depth_cap)?.map(|(k, x)| {
        let value = m_rat + &x / (Rational::one() + &x);
        (slice_index(m, &k), value)
    }))
}

/// The Stern–Brocot-simplest positive rational in `window`, returned with its
/// Calkin–Wilf index. Within a convex set the node of least depth is unique,
/// and Calkin–Wilf indices are ordered by depth first.
fn simplest_positive(window: &Span, depth_cap: u64) -> Result<Option<(BigUint, Rational)>> {
    if window.is_empty() {
        return Ok(None);
    }
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    let (mut c, mut d) = (BigInt::one(), BigInt::zero());
    let mut runs: Vec<(bool, usize)> = Vec::new();
    let mut depth: u64 = 0;
    let lo = &window.lower;
    let lo_p = lo.value.numer().clone();
    let lo_q = lo.value.denom().clone();
    loop {
        let mediant = Rational::new(&a + &c, &b + &d);
        if window.contains(&mediant) {
            let mut index = BigUint::one();
            for (right, len) in runs.iter().rev() {
                index <<= *len;
                if *right {
                    index |= (BigUint::one() << *len) - 1u32;
                }
            }
            return Ok(Some((index, mediant)));
        }
        let below = mediant < lo.value || (!lo.closed && mediant == lo.value);
        let (right, steps): (bool, BigInt) = if below {
            // Largest run of right moves whose mediants stay below the window.
            let slope = &lo_q * &c - &lo_p * &d;
            let gap = &lo_p * &b - &lo_q * &a;
            let j = if lo.closed { ceil_div(&gap, &slope) } else { gap.div_floor(&slope) + 1 };
            (true, j - 1)
        } else {
            let hi = window.upper.as_ref().expect("mediant above an unbounded window");
            let hi_p = hi.value.numer();
            let hi_q = hi.value.denom();
            let slope = hi_p * &b - hi_q * &a;
            let gap = hi_q * &c - hi_p * &d;
            let j = if hi.closed { ceil_div(&gap, &slope) } else { gap.div_floor(&slope) + 1 };
            (false, j - 1)
        };
        let steps = steps
            .to_u64()
            .filter(|s| depth + s <= depth_cap)
            .ok_or_else(|| Error::Resource("Stern–Brocot depth cap exceeded".into()))?;
        // The mediant itself is one step in the chosen direction.
        let steps = steps.max(1);
        depth += steps;
        let s = BigInt::from(steps);
        if right {
            a += &s * &c;
            b += &s * &d;
        } else {
            c += &s * &a;
            d += &s * &b;
        }
        runs.push((right, steps as usize));
    }
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_ceil(d)
}

/// The least index `i >= at_least` with `Q(i)` in `span`.
pub fn min_index_at_least(
    span: &Span,
    at_least: &BigUint,
    depth_cap: u64,
) -> Result<Option<(BigUint, Rational)>> {
    let Some((index, value)) = min_index_in(span, depth_cap)? else {
        return Ok(None);
    };
    if &index >= at_least {
        return Ok(Some((index, value)));
    }
    let left = min_index_at_least(&span.below(&value), at_least, depth_cap)?;
    let right = min_index_at_least(&span.above(&value), at_least, depth_cap)?;
    Ok(match (left, right) {
        (Some(l), Some(r)) => Some(if l.0 <= r.0 { l } else { r }),
        (l, r) => l.or(r),
    })
}
