//! And-inverter graphs in the AIGER format.
//!
//! Only the safety fragment is supported: inputs, latches, AND gates and a
//! single property taken either from the bad-state section or, in files
//! without one, from the outputs. Literals follow the AIGER convention
//! (`2 * var + negated`, `0` is false and `1` is true).
//!
//! Latch state vectors are indexed by latch position in the file. The
//! hand-built counter model in [`crate::corpus`] declares its high bit first,
//! so `[1, 0]` there reads as the value 2.

mod parse;
mod sim;
mod write;

pub use parse::{parse, Format, Location, ParseError};
pub use sim::State;
pub use write::{write_ascii, write_binary, WriteError};

/// An AIGER literal.
pub type AigLit = u32;

#[inline]
pub fn lit_var(lit: AigLit) -> u32 {
    lit >> 1
}

#[inline]
pub fn lit_is_negated(lit: AigLit) -> bool {
    lit & 1 == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reset {
    Zero,
    One,
    /// Declared uninitialized in the file; simulated as zero.
    Uninit,
}

impl Reset {
    pub fn value(self) -> bool {
        matches!(self, Reset::One)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Latch {
    pub lit: AigLit,
    pub next: AigLit,
    pub reset: Reset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AndGate {
    pub lhs: AigLit,
    pub rhs0: AigLit,
    pub rhs1: AigLit,
}

/// Which header section the property literal came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertySource {
    Output,
    Bad,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aig {
    pub max_var: u32,
    pub inputs: Vec<AigLit>,
    pub latches: Vec<Latch>,
    pub ands: Vec<AndGate>,
    pub bad: AigLit,
    pub property_source: PropertySource,
}

/// What defines an AIGER variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Const,
    Input(usize),
    Latch(usize),
    And(usize),
    Undefined,
}

impl Aig {
    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_latches(&self) -> usize {
        self.latches.len()
    }

    /// Latch positions whose reset value was `x` and got resolved to zero.
    pub fn uninitialized_latches(&self) -> Vec<usize> {
        self.latches
            .iter()
            .enumerate()
            .filter(|(_, l)| l.reset == Reset::Uninit)
            .map(|(i, _)| i)
            .collect()
    }

    /// Table from variable index to its definition.
    pub fn nodes(&self) -> Vec<Node> {
        let mut nodes = vec![Node::Undefined; self.max_var as usize + 1];
        nodes[0] = Node::Const;
        for (i, &l) in self.inputs.iter().enumerate() {
            nodes[lit_var(l) as usize] = Node::Input(i);
        }
        for (i, l) in self.latches.iter().enumerate() {
            nodes[lit_var(l.lit) as usize] = Node::Latch(i);
        }
        for (i, a) in self.ands.iter().enumerate() {
            nodes[lit_var(a.lhs) as usize] = Node::And(i);
        }
        nodes
    }

    /// Whether variables follow the binary format's numbering: inputs first,
    /// then latches, then AND gates with `lhs > rhs0 >= rhs1`.
    pub fn has_canonical_numbering(&self) -> bool {
        let ni = self.inputs.len() as u32;
        let nl = self.latches.len() as u32;
        self.max_var == ni + nl + self.ands.len() as u32
            && self
                .inputs
                .iter()
                .enumerate()
                .all(|(i, &l)| l == 2 * (i as u32 + 1))
            && self
                .latches
                .iter()
                .enumerate()
                .all(|(i, l)| l.lit == 2 * (ni + i as u32 + 1))
            && self.ands.iter().enumerate().all(|(i, a)| {
                a.lhs == 2 * (ni + nl + i as u32 + 1) && a.lhs > a.rhs0 && a.rhs0 >= a.rhs1
            })
    }
}
