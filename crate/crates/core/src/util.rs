//! Small internal helpers.

use std::cmp::Ordering;

/// An `f64` with the IEEE total order, usable as a key in heaps and sorts.
/// Values produced by this crate are never NaN, but total ordering keeps
/// comparisons panic-free regardless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct TotalF64(pub f64);

impl Eq for TotalF64 {}

impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}
