//! Exact numbers: rationals, the property-(M) enumeration, set-coded reals,
//! exact comparison and independence certificates.

pub mod coded;
pub mod enumeration;
pub mod independence;
pub mod interval_set;
pub mod linear_form;
pub mod rational;

pub use coded::{gamma, CodedReal, Enclosure, ExponentSchedule, Term};
pub use enumeration::{RationalEnumeration, Span};
pub use independence::{
    independence_witness, sum_independence_check, Component, IndependenceWitness,
    SumIndependence,
};
pub use interval_set::IntervalSet;
pub use linear_form::{
    compare, compare_with_gamma, equals, Comparison, LinearForm, DEFAULT_MAX_PRECISION,
};
pub use rational::{format_rational, int, parse_rational, pow2, rat, Rational};

/// `Q(i)`.
pub fn enumerate_rationals(i: u64) -> Rational {
    RationalEnumeration.value(i)
}
