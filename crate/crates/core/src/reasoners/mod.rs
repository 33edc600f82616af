//! Generalization primitives: shrinking a satisfying assignment to a cube of
//! states that all share its property, and shrinking an unsatisfiable cube
//! to a minimal core.

mod dead;
mod muc;
mod pa;
mod ternary;

use thiserror::Error;

pub use dead::detect_dead;
pub use muc::{minimize_core, muc_restricted};
pub use pa::{pa_backward, pa_sat, pa_ternary, Snapshot};
pub use ternary::{frame_holds, lit_tv, simulate, Tv};

use crate::lit::{Clause, Cube};
use crate::sat::SatError;

/// The state set a query was posed against.
#[derive(Clone, Copy, Debug)]
pub enum FrameView<'a> {
    /// The initial states, given as a cube.
    Init(&'a Cube),
    /// A frame's own clauses together with the clauses shared by all frames
    /// above the initial one.
    Clauses {
        frame: &'a [Clause],
        inf: &'a [Clause],
    },
}

impl FrameView<'_> {
    /// Concrete membership of a full valuation of the state variables.
    pub fn contains(&self, values: &[bool]) -> bool {
        match self {
            FrameView::Init(c) => c.eval(values),
            FrameView::Clauses { frame, inf } => {
                frame.iter().chain(inf.iter()).all(|c| c.eval(values))
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReasonerError {
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Sat(#[from] SatError),
}
