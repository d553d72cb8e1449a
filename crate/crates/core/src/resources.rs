//! CPU-time and memory budgets, plus the measurements behind them.
//!
//! Heap usage is exact when the host binary installs [`TrackingAllocator`]
//! as its global allocator; otherwise the resident set size from procfs is
//! used where available.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Duration;

use crate::error::{BudgetKind, Error, Result};

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static ACTIVE: AtomicBool = AtomicBool::new(false);

/// Counting wrapper around the system allocator.
pub struct TrackingAllocator;

unsafe impl GlobalAlloc for TrackingAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            grow(layout.size());
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            if new_size >= layout.size() {
                grow(new_size - layout.size());
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

fn grow(bytes: usize) {
    ACTIVE.store(true, Ordering::Relaxed);
    let now = CURRENT.fetch_add(bytes, Ordering::Relaxed) + bytes;
    PEAK.fetch_max(now, Ordering::Relaxed);
}

fn rss_bytes() -> Option<u64> {
    let statm = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    // SAFETY: sysconf has no preconditions.
    let page = unsafe { libc::sysconf(libc::_SC_PAGESIZE) };
    (page > 0).then(|| pages * page as u64)
}

/// Bytes currently in use, if measurable.
pub fn current_memory() -> Option<u64> {
    if ACTIVE.load(Ordering::Relaxed) {
        Some(CURRENT.load(Ordering::Relaxed) as u64)
    } else {
        rss_bytes()
    }
}

/// Peak bytes since the last [`reset_peak_memory`], if measurable.
pub fn peak_memory() -> Option<u64> {
    if ACTIVE.load(Ordering::Relaxed) {
        Some(PEAK.load(Ordering::Relaxed) as u64)
    } else {
        std::fs::read_to_string("/proc/self/status")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("VmHWM:"))
                    .and_then(|l| l.split_whitespace().nth(1)?.parse::<u64>().ok())
                    .map(|kb| kb * 1024)
            })
    }
}

pub fn reset_peak_memory() {
    PEAK.store(CURRENT.load(Ordering::Relaxed), Ordering::Relaxed);
}

/// CPU seconds consumed by the whole process so far.
pub fn process_cpu_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: `ts` is a valid out-pointer for the duration of the call.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_PROCESS_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Resource caps for one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budget {
    pub cpu_time: Option<Duration>,
    pub memory_bytes: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    /// One CPU hour and 8 GB.
    pub fn standard() -> Self {
        Budget {
            cpu_time: Some(Duration::from_secs(3600)),
            memory_bytes: Some(8 * 1024 * 1024 * 1024),
        }
    }

    pub(crate) fn meter(&self) -> Meter {
        Meter {
            budget: *self,
            start_cpu: process_cpu_seconds(),
            ticks: 0,
        }
    }
}

/// Cooperative budget check, sampled on the first tick and every few
/// hundred after.
pub(crate) struct Meter {
    budget: Budget,
    start_cpu: f64,
    ticks: u32,
}

impl Meter {
    const STRIDE: u32 = 256;

    pub(crate) fn tick(&mut self) -> Result<()> {
        let t = self.ticks;
        self.ticks = self.ticks.wrapping_add(1);
        if !t.is_multiple_of(Self::STRIDE) {
            return Ok(());
        }
        self.check()
    }

    pub(crate) fn check(&self) -> Result<()> {
        if let Some(limit) = self.budget.cpu_time {
            if process_cpu_seconds() - self.start_cpu > limit.as_secs_f64() {
                return Err(Error::Budget(BudgetKind::Time));
            }
        }
        if let Some(limit) = self.budget.memory_bytes {
            if current_memory().is_some_and(|m| m > limit) {
                return Err(Error::Budget(BudgetKind::Memory));
            }
        }
        Ok(())
    }
}
