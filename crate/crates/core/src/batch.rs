//! Running the checker over many circuits, one report row per circuit.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::aiger::Aig;
use crate::car::{self, check_direction, Mode, Options, Report, Verdict};
use crate::ts::Direction;

/// A circuit to check, or the reason it could not be loaded.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub aig: Result<Arc<Aig>, String>,
}

impl Instance {
    pub fn new(name: impl Into<String>, aig: Aig) -> Self {
        Instance {
            name: name.into(),
            aig: Ok(Arc::new(aig)),
        }
    }
}

/// Whether the engines agreed on a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    /// Only one engine ran, or none concluded.
    NotApplicable,
    Agree,
    Disagree,
    /// The other engine gave up.
    Undecided,
}

impl Consistency {
    pub fn name(self) -> &'static str {
        match self {
            Consistency::NotApplicable => "-",
            Consistency::Agree => "yes",
            Consistency::Disagree => "no",
            Consistency::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchRow {
    pub name: String,
    /// `safe`, `unsafe`, `unknown` or `error`.
    pub verdict: String,
    pub time: Duration,
    pub frames: usize,
    pub total_clauses: usize,
    pub sat_calls: u64,
    pub muc_calls: u64,
    pub winner: Option<Direction>,
    pub consistency: Consistency,
    /// Why the instance failed, or why the run was inconclusive.
    pub note: String,
}

impl BatchRow {
    pub const HEADER: [&'static str; 10] = [
        "instance",
        "verdict",
        "time_s",
        "frames",
        "total_clauses",
        "sat_calls",
        "muc_calls",
        "winner",
        "consistent",
        "note",
    ];

    pub fn fields(&self) -> [String; 10] {
        [
            self.name.clone(),
            self.verdict.clone(),
            format!("{:.3}", self.time.as_secs_f64()),
            self.frames.to_string(),
            self.total_clauses.to_string(),
            self.sat_calls.to_string(),
            self.muc_calls.to_string(),
            self.winner.map_or("-", Direction::name).to_string(),
            self.consistency.name().to_string(),
            self.note.clone(),
        ]
    }

    fn failed(name: &str, time: Duration, msg: String) -> Self {
        BatchRow {
            name: name.to_string(),
            verdict: "error".to_string(),
            time,
            frames: 0,
            total_clauses: 0,
            sat_calls: 0,
            muc_calls: 0,
            winner: None,
            consistency: Consistency::NotApplicable,
            note: msg,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BatchConfig {
    /// Engine options. Their limits are combined with `timeout`, which
    /// restarts for every instance.
    pub options: Options,
    pub timeout: Option<Duration>,
}

impl BatchConfig {
    fn options(&self) -> Options {
        let mut opts = self.options.clone();
        if let Some(t) = self.timeout {
            let d = Instant::now() + t;
            opts.limits.deadline = Some(opts.limits.deadline.map_or(d, |old| old.min(d)));
        }
        opts
    }
}

fn same_verdict(a: &Verdict, b: &Verdict) -> bool {
    a.name() == b.name()
}

/// Counters of the last round of each direction in `report`.
fn summarize(report: &Report) -> (usize, usize, u64, u64) {
    let mut last = [None, None];
    for s in &report.stats {
        last[s.direction as usize] = Some(s);
    }
    let main = report
        .winner
        .and_then(|d| last[d as usize])
        .or_else(|| last.iter().flatten().max_by_key(|s| s.iteration).copied());
    let frames = main.map_or(0, |s| s.iteration + 1);
    let clauses = main.map_or(0, |s| s.total_clauses());
    let sat = last.iter().flatten().map(|s| s.sat_calls).sum();
    let muc = last.iter().flatten().map(|s| s.muc_calls).sum();
    (frames, clauses, sat, muc)
}

/// Checks one instance. In portfolio mode the losing engine is run on its
/// own afterwards to fill in the consistency column.
pub fn run_one(inst: &Instance, cfg: &BatchConfig) -> BatchRow {
    let start = Instant::now();
    let aig = match &inst.aig {
        Ok(a) => Arc::clone(a),
        Err(e) => return BatchRow::failed(&inst.name, Duration::ZERO, e.clone()),
    };
    let report = match car::check(Arc::clone(&aig), &cfg.options()) {
        Ok(r) => r,
        Err(e) => return BatchRow::failed(&inst.name, start.elapsed(), e.to_string()),
    };
    let time = start.elapsed();
    let (frames, total_clauses, sat_calls, muc_calls) = summarize(&report);
    let mut note = match &report.verdict {
        Verdict::Unknown(r) => r.name().to_string(),
        _ => String::new(),
    };
    let consistency = match (cfg.options.mode, report.winner) {
        (Mode::Both, Some(w)) => {
            let other = match w {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            };
            match check_direction(aig, other, &cfg.options()) {
                Ok(r) if !r.verdict.is_conclusive() => Consistency::Undecided,
                Ok(r) if same_verdict(&r.verdict, &report.verdict) => Consistency::Agree,
                Ok(_) => Consistency::Disagree,
                Err(e) => {
                    note = format!("{} engine failed: {e}", other.name());
                    Consistency::Undecided
                }
            }
        }
        _ => Consistency::NotApplicable,
    };
    BatchRow {
        name: inst.name.clone(),
        verdict: report.verdict.name().to_string(),
        time,
        frames,
        total_clauses,
        sat_calls,
        muc_calls,
        winner: report.winner,
        consistency,
        note,
    }
}

/// Checks every instance on the calling thread.
pub fn run_sequential(instances: &[Instance], cfg: &BatchConfig) -> Vec<BatchRow> {
    instances.iter().map(|i| run_one(i, cfg)).collect()
}

/// Checks instances concurrently. Rows come back in input order.
#[cfg(feature = "parallel")]
pub fn run_parallel(instances: &[Instance], cfg: &BatchConfig) -> Vec<BatchRow> {
    use rayon::prelude::*;
    instances.par_iter().map(|i| run_one(i, cfg)).collect()
}

/// Concurrent when the `parallel` feature is enabled.
pub fn run_batch(instances: &[Instance], cfg: &BatchConfig) -> Vec<BatchRow> {
    #[cfg(feature = "parallel")]
    return run_parallel(instances, cfg);
    #[cfg(not(feature = "parallel"))]
    return run_sequential(instances, cfg);
}
