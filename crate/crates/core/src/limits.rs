//! Wall-clock, memory and cancellation limits shared by solvers and engines.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    Timeout,
    Memout,
    StepLimit,
    Cancelled,
}

impl UnknownReason {
    pub fn name(self) -> &'static str {
        match self {
            UnknownReason::Timeout => "timeout",
            UnknownReason::Memout => "memout",
            UnknownReason::StepLimit => "step-limit",
            UnknownReason::Cancelled => "cancelled",
        }
    }
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    /// Resident set size cap in bytes.
    pub memory: Option<u64>,
    /// Any of these flags being set stops the computation.
    pub cancel: Vec<Arc<AtomicBool>>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel.push(flag);
        self
    }

    /// The first limit that has been hit, if any.
    pub fn exceeded(&self) -> Option<UnknownReason> {
        if self.cancel.iter().any(|f| f.load(Ordering::Relaxed)) {
            return Some(UnknownReason::Cancelled);
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                return Some(UnknownReason::Timeout);
            }
        }
        if let Some(cap) = self.memory {
            if resident_bytes().is_some_and(|r| r > cap) {
                return Some(UnknownReason::Memout);
            }
        }
        None
    }
}

/// Resident set size of this process, where the platform exposes it.
pub fn resident_bytes() -> Option<u64> {
    let text = std::fs::read_to_string("/proc/self/statm").ok()?;
    let pages: u64 = text.split_whitespace().nth(1)?.parse().ok()?;
    Some(pages * 4096)
}
