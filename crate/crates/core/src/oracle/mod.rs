//! Reference checkers for small circuits: explicit-state breadth-first
//! reachability and SAT-based bounded model checking. Neither shares code
//! with the main engine beyond the circuit representation and, for BMC, the
//! CNF encoding and solver.

mod bfs;
mod bmc;

use thiserror::Error;

pub use bfs::{bfs_reach, BfsResult};
pub use bmc::bmc;

use crate::aiger::{Aig, State};

/// A concrete execution. Frame `k` is the latch valuation `states[k]`
/// together with the input valuation `inputs[k]` applied in that frame; the
/// bad output of a frame depends on both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<State>,
    pub inputs: Vec<Vec<bool>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("frame {0} has the wrong number of latch or input values")]
    Shape(usize),
    #[error("initial state disagrees with the reset value of latch {0}")]
    Init(usize),
    #[error("frame {0} is not the successor of the frame before it")]
    Step(usize),
    #[error("the last frame is not bad")]
    NotBad,
    #[error("frame {0} is already bad before the end of the trace")]
    EarlyBad(usize),
}

impl Trace {
    /// Number of frames.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Replays the trace and checks that it starts in an initial state,
    /// follows the transition function and reaches bad exactly at its last
    /// frame. Latches with an uninitialized reset may start anywhere.
    pub fn check(&self, aig: &Aig) -> Result<(), TraceError> {
        if self.states.is_empty() {
            return Err(TraceError::Empty);
        }
        if self.inputs.len() != self.states.len() {
            return Err(TraceError::Shape(self.inputs.len().min(self.states.len())));
        }
        for (k, (s, i)) in self.states.iter().zip(&self.inputs).enumerate() {
            if s.len() != aig.num_latches() || i.len() != aig.num_inputs() {
                return Err(TraceError::Shape(k));
            }
        }
        for (k, latch) in aig.latches.iter().enumerate() {
            if latch.reset != crate::aiger::Reset::Uninit
                && self.states[0][k] != latch.reset.value()
            {
                return Err(TraceError::Init(k));
            }
        }
        let last = self.states.len() - 1;
        for k in 0..=last {
            let (next, bad) = aig.simulate_step(&self.states[k], &self.inputs[k]);
            if k == last {
                return if bad { Ok(()) } else { Err(TraceError::NotBad) };
            }
            if bad {
                return Err(TraceError::EarlyBad(k));
            }
            if next != self.states[k + 1] {
                return Err(TraceError::Step(k + 1));
            }
        }
        unreachable!()
    }

    /// Drops every frame after the first bad one.
    pub fn truncate_at_first_bad(&mut self, aig: &Aig) {
        if let Some(k) =
            (0..self.states.len()).find(|&k| aig.is_bad(&self.states[k], &self.inputs[k]))
        {
            self.states.truncate(k + 1);
            self.inputs.truncate(k + 1);
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{needed} states exceed the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("bounded model checking needs a forward transition system")]
    NotForward,
    #[error("solver error: {0}")]
    Sat(#[from] crate::sat::SatError),
}
