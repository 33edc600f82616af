use std::ops::Deref;

use super::{lit_is_negated, lit_var, Aig, AigLit};

/// Latch values indexed by latch position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State(pub Vec<bool>);

impl State {
    /// Packs the first 64 latches into an integer, latch 0 in bit 0.
    pub fn to_index(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn from_index(index: u64, len: usize) -> Self {
        State((0..len).map(|i| index >> i & 1 == 1).collect())
    }
}

impl Deref for State {
    type Target = [bool];

    fn deref(&self) -> &[bool] {
        &self.0
    }
}

impl Aig {
    /// Initial state with uninitialized latches set to zero.
    pub fn initial_state(&self) -> State {
        State(self.latches.iter().map(|l| l.reset.value()).collect())
    }

    /// Values of every variable under the given latch and input values.
    pub fn evaluate(&self, state: &[bool], inputs: &[bool]) -> Vec<bool> {
        assert_eq!(state.len(), self.latches.len(), "state length mismatch");
        assert_eq!(
            inputs.len(),
            self.inputs.len(),
            "input vector length mismatch"
        );
        let mut values = vec![false; self.max_var as usize + 1];
        for (&lit, &v) in self.inputs.iter().zip(inputs) {
            values[lit_var(lit) as usize] = v;
        }
        for (latch, &v) in self.latches.iter().zip(state) {
            values[lit_var(latch.lit) as usize] = v;
        }
        for gate in &self.ands {
            let v = lit_value(&values, gate.rhs0) && lit_value(&values, gate.rhs1);
            values[lit_var(gate.lhs) as usize] = v;
        }
        values
    }

    /// One clock step: the successor latch values and the bad bit of the
    /// current state.
    pub fn simulate_step(&self, state: &State, inputs: &[bool]) -> (State, bool) {
        let values = self.evaluate(state, inputs);
        let next = self
            .latches
            .iter()
            .map(|l| lit_value(&values, l.next))
            .collect();
        (State(next), lit_value(&values, self.bad))
    }

    pub fn is_bad(&self, state: &State, inputs: &[bool]) -> bool {
        let values = self.evaluate(state, inputs);
        lit_value(&values, self.bad)
    }
}

#[inline]
pub(crate) fn lit_value(values: &[bool], lit: AigLit) -> bool {
    values[lit_var(lit) as usize] != lit_is_negated(lit)
}
