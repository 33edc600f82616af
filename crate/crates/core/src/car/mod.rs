//! Complementary approximate reachability.
//!
//! An engine keeps over-approximating frames `F_0..F_m` (states reachable
//! within a number of steps, plus possibly more) and under-approximating
//! layers `B_0..B_n` (states that certainly reach a bad state). Each round
//! adds a frame equal to the property, searches for transitions from it into
//! some layer, and either extends such a transition back to the initial
//! states or blocks it with a clause. A frame contained in the union of the
//! frames below it proves safety.
//!
//! The same engine runs on the reversed system, where it searches from the
//! bad states towards the initial ones.

mod bseq;
mod engine;
mod frames;
mod invariant;
mod portfolio;
mod semantics;

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

pub use bseq::{BSeq, Node};
pub use engine::{Engine, StepResult};
pub use frames::FrameSeq;
pub use invariant::invariant_found;
pub use portfolio::run_portfolio;

use crate::aiger::Aig;
use crate::artifacts::Certificate;
use crate::limits::{Limits, UnknownReason};
use crate::lit::{Clause, Cube};
use crate::oracle::{Trace, TraceError};
use crate::reasoners::ReasonerError;
use crate::sat::{BackendKind, SatError};
use crate::ts::{Direction, TransitionSystem};

/// Which engines a run uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    Forward,
    Backward,
    #[default]
    Both,
}

/// How a satisfying assignment is shrunk to a cube in forward mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Generalize {
    #[default]
    Ternary,
    Sat,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub mode: Mode,
    pub seed: u64,
    pub backend: BackendKind,
    pub limits: Limits,
    /// 0: none. 1: solver self-checks and the global emptiness diagnostic.
    /// 2: additionally, explicit enumeration of frame and layer semantics
    /// after every round on circuits with at most 14 latches plus inputs.
    pub debug_level: u8,
    /// Dead-state detection in forward mode.
    pub dead_states: bool,
    pub generalize: Generalize,
    /// Largest obligation stack before giving up.
    pub max_depth: usize,
    pub max_rounds: Option<usize>,
    /// Keep every generalization and core query for later inspection.
    pub record_samples: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            mode: Mode::Both,
            seed: 0,
            backend: BackendKind::Cdcl,
            limits: Limits::none(),
            debug_level: 0,
            dead_states: true,
            generalize: Generalize::Ternary,
            max_depth: 100_000,
            max_rounds: None,
            record_samples: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe(Certificate),
    Unsafe(Trace),
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Safe(_) => "safe",
            Verdict::Unsafe(_) => "unsafe",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error("solver: {0}")]
    Sat(SatError),
    #[error("counterexample does not replay: {0}")]
    Trace(#[from] TraceError),
    #[error("semantic check failed after round {round}: {msg}")]
    Semantic { round: usize, msg: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// One record per completed round of one engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationStats {
    pub direction: Direction,
    pub iteration: usize,
    /// Clause counts of frames `1..=iteration`.
    pub frame_clauses: Vec<usize>,
    pub inf_clauses: usize,
    pub layer_sizes: Vec<usize>,
    // Counters below are totals since the engine started.
    pub sat_calls: u64,
    pub muc_calls: u64,
    pub pa_calls: u64,
    pub dead_cubes: u64,
    pub redundant_blocks: u64,
    pub reused_cubes: u64,
    pub overlap_violations: u64,
}

impl IterationStats {
    pub const CSV_HEADER: &'static str = "direction,iteration,frames,frame_clauses,inf_clauses,layer_sizes,sat_calls,muc_calls,pa_calls,dead_cubes,redundant_blocks,reused_cubes,overlap_violations";

    pub fn total_clauses(&self) -> usize {
        self.frame_clauses.iter().sum::<usize>() + self.inf_clauses
    }

    pub fn csv_row(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.direction.name(),
            self.iteration,
            self.iteration + 1,
            join(&self.frame_clauses),
            self.inf_clauses,
            join(&self.layer_sizes),
            self.sat_calls,
            self.muc_calls,
            self.pa_calls,
            self.dead_cubes,
            self.redundant_blocks,
            self.reused_cubes,
            self.overlap_violations,
        )
    }
}

pub fn stats_csv(rows: &[IterationStats]) -> String {
    let mut out = String::from(IterationStats::CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

/// A generalization: every completion of `result` lies in `frame` and steps
/// to `next` (with `next`'s inputs in forward mode), which lies in `target`.
#[derive(Clone, Debug)]
pub struct PaSample {
    pub direction: Direction,
    pub frame: Vec<Clause>,
    /// Over unprimed state variables.
    pub target: Cube,
    pub next: Vec<bool>,
    pub result: Cube,
}

/// A core: `frame ∧ T ∧ core` is unsatisfiable and dropping any literal of
/// `core` (primed) makes it satisfiable.
#[derive(Clone, Debug)]
pub struct MucSample {
    pub direction: Direction,
    pub frame: Vec<Clause>,
    pub core: Cube,
}

#[derive(Clone, Debug, Default)]
pub struct Samples {
    pub pa: Vec<PaSample>,
    pub muc: Vec<MucSample>,
}

impl Samples {
    fn append(&mut self, other: Samples) {
        self.pa.extend(other.pa);
        self.muc.extend(other.muc);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    /// The engine that produced a conclusive verdict.
    pub winner: Option<Direction>,
    pub stats: Vec<IterationStats>,
    pub samples: Samples,
    /// Rounds whose frames and layers were checked by enumeration.
    pub semantic_checks: usize,
}

/// Runs one engine on the system for `direction` to completion.
pub fn check_direction(
    aig: Arc<Aig>,
    direction: Direction,
    opts: &Options,
) -> Result<Report, EngineError> {
    let forward = TransitionSystem::encode(aig);
    let ts = match direction {
        Direction::Forward => forward,
        Direction::Backward => forward.reverse().expect("fresh system is forward"),
    };
    let mut engine = Engine::new(ts, opts, opts.limits.clone())?;
    let verdict = loop {
        if let StepResult::Done(v) = engine.step()? {
            break v;
        }
    };
    let winner = verdict.is_conclusive().then_some(direction);
    Ok(Report {
        verdict,
        winner,
        stats: engine.history().to_vec(),
        semantic_checks: engine.semantic_checks(),
        samples: engine.take_samples(),
    })
}

/// Model checks `aig` with the engines selected by `opts.mode`.
pub fn check(aig: Arc<Aig>, opts: &Options) -> Result<Report, EngineError> {
    match opts.mode {
        Mode::Forward => check_direction(aig, Direction::Forward, opts),
        Mode::Backward => check_direction(aig, Direction::Backward, opts),
        Mode::Both => run_portfolio(aig, opts),
    }
}

#[cfg(test)]
mod tests;
