//! Exact construction and verification of strongly rigid metrics on finite
//! metric spaces.
//!
//! Distances are [`CodedReal`]s: a rational plus rational multiples of
//! set-coded dyadic sums, compared exactly by a symbolic sign procedure.
//! [`rigidify`] perturbs a rational metric into a strongly rigid one,
//! [`glue::rigidify_full`] produces metrics whose distances are pairwise
//! linearly independent over `Q` together with a checkable certificate, and
//! [`verify`] holds the brute-force oracles.

pub mod certificate;
pub mod error;
pub mod glue;
pub mod metric;
pub mod numbers;
pub mod product;
pub mod registry;
pub mod rigidify;
pub mod verify;

pub use certificate::Certificate;
pub use error::{Error, Result};
pub use metric::FiniteMetric;
pub use numbers::{
    compare, equals, CodedReal, Comparison, Enclosure, ExponentSchedule, IntervalSet, Rational,
};
pub use registry::ValueRegistry;
