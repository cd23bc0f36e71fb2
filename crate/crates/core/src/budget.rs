//! Node and wall-clock budgets for the backtracking searches.
//!
//! Every search node charges one unit against a shared meter. Exhaustion is a
//! hard stop that surfaces as an explicit error or an incomplete report,
//! never as a silently truncated result.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Resource limits for one search or scan.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Maximum number of search nodes (letter placements tried).
    pub max_nodes: u64,
    /// Wall-clock cap for the whole search.
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 1_000_000_000,
            max_time: Some(Duration::from_secs(30 * 60)),
        }
    }
}

impl Budget {
    pub fn with_nodes(max_nodes: u64) -> Self {
        Budget { max_nodes, ..Budget::default() }
    }
}

/// Shared meter; cheap enough to poke from every worker.
#[derive(Debug)]
pub(crate) struct BudgetMeter {
    limit: u64,
    used: AtomicU64,
    deadline: Option<Instant>,
    exhausted: AtomicBool,
}

/// How often a local tally is flushed to the shared counter (and the
/// deadline polled). Purely a contention knob; exact usage totals are
/// preserved because remainders are flushed on drop.
const FLUSH_EVERY: u64 = 4096;

impl BudgetMeter {
    pub(crate) fn new(budget: &Budget) -> Self {
        BudgetMeter {
            limit: budget.max_nodes,
            used: AtomicU64::new(0),
            deadline: budget.max_time.map(|t| Instant::now() + t),
            exhausted: AtomicBool::new(false),
        }
    }

    pub(crate) fn nodes_used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub(crate) fn is_exhausted(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed)
    }

    fn flush(&self, n: u64) -> bool {
        let prev = self.used.fetch_add(n, Ordering::Relaxed);
        if prev.saturating_add(n) > self.limit {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                self.exhausted.store(true, Ordering::Relaxed);
                return false;
            }
        }
        !self.exhausted.load(Ordering::Relaxed)
    }
}

/// Per-worker handle that batches charges before hitting the atomics.
pub(crate) struct MeterHandle<'a> {
    meter: &'a BudgetMeter,
    pending: u64,
}

impl<'a> MeterHandle<'a> {
    pub(crate) fn new(meter: &'a BudgetMeter) -> Self {
        MeterHandle { meter, pending: 0 }
    }

    /// Charge one node. Returns false once the budget is gone.
    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            let n = self.pending;
            self.pending = 0;
            return self.meter.flush(n);
        }
        true
    }
}

impl Drop for MeterHandle<'_> {
    fn drop(&mut self) {
        if self.pending > 0 {
            self.meter.flush(self.pending);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meter_stops_at_limit() {
        let meter = BudgetMeter::new(&Budget { max_nodes: 10_000, max_time: None });
        let mut handle = MeterHandle::new(&meter);
        let mut ticks = 0u64;
        while handle.tick() {
            ticks += 1;
            assert!(ticks < 1_000_000, "meter never tripped");
        }
        drop(handle);
        assert!(meter.is_exhausted());
        assert!(meter.nodes_used() >= 10_000);
    }

    #[test]
    fn exact_accounting_after_drop() {
        let meter = BudgetMeter::new(&Budget { max_nodes: u64::MAX, max_time: None });
        {
            let mut handle = MeterHandle::new(&meter);
            for _ in 0..10_123 {
                assert!(handle.tick());
            }
        }
        assert_eq!(meter.nodes_used(), 10_123);
    }
}
