//! Process-wide predicate counters. Relaxed atomics; diagnostics only.

use std::sync::atomic::{AtomicU64, Ordering};

static FILTER_FAILURES: AtomicU64 = AtomicU64::new(0);
static INTERVAL_FAILURES: AtomicU64 = AtomicU64::new(0);
static EXACT_EVALUATIONS: AtomicU64 = AtomicU64::new(0);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PredicateCounters {
    /// Float filter could not certify the sign.
    pub filter_failures: u64,
    /// Interval stage could not certify the sign.
    pub interval_failures: u64,
    /// Predicates resolved by exact arithmetic.
    pub exact_evaluations: u64,
}

impl PredicateCounters {
    pub fn since(self, earlier: PredicateCounters) -> PredicateCounters {
        PredicateCounters {
            filter_failures: self.filter_failures.wrapping_sub(earlier.filter_failures),
            interval_failures: self.interval_failures.wrapping_sub(earlier.interval_failures),
            exact_evaluations: self.exact_evaluations.wrapping_sub(earlier.exact_evaluations),
        }
    }
}

#[inline]
pub(crate) fn filter_failed() {
    FILTER_FAILURES.fetch_add(1, Ordering::Relaxed);
}

#[inline]
pub(crate) fn interval_failed() {
    INTERVAL_FAILURES.fetch_add(1, Ordering::Relaxed);
}

#[inline]
pub(crate) fn exact_evaluated() {
    EXACT_EVALUATIONS.fetch_add(1, Ordering::Relaxed);
}

pub fn snapshot() -> PredicateCounters {
    PredicateCounters {
        filter_failures: FILTER_FAILURES.load(Ordering::Relaxed),
        interval_failures: INTERVAL_FAILURES.load(Ordering::Relaxed),
        exact_evaluations: EXACT_EVALUATIONS.load(Ordering::Relaxed),
    }
}
