use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{OracleError, Trace};
use crate::aiger::{Aig, State};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BfsResult {
    Safe {
        reachable: usize,
    },
    /// A shortest counterexample.
    Unsafe(Trace),
}

fn bits(index: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| index >> i & 1 == 1).collect()
}

/// Exact reachability over latch valuations, trying every input vector in
/// every state. Refuses circuits with more than `state_budget` latch
/// valuations.
pub fn bfs_reach(aig: &Aig, state_budget: u64) -> Result<BfsResult, OracleError> {
    let nl = aig.num_latches();
    let ni = aig.num_inputs();
    let needed = 1u128 << nl.min(127);
    if nl >= 64 || ni >= 32 || needed > u128::from(state_budget) {
        return Err(OracleError::BudgetExceeded {
            needed,
            budget: u128::from(state_budget),
        });
    }

    let init = aig.initial_state().to_index();
    // state -> (predecessor, inputs used to leave the predecessor)
    let mut parent: HashMap<u64, Option<(u64, u64)>> = HashMap::new();
    parent.insert(init, None);
    let mut queue = VecDeque::from([init]);
    while let Some(s) = queue.pop_front() {
        let state = State::from_index(s, nl);
        for inp in 0..1u64 << ni {
            let inputs = bits(inp, ni);
            let (next, bad) = aig.simulate_step(&state, &inputs);
            if bad {
                return Ok(BfsResult::Unsafe(path(&parent, s, inputs, nl, ni)));
            }
            if let Entry::Vacant(e) = parent.entry(next.to_index()) {
                e.insert(Some((s, inp)));
                queue.push_back(next.to_index());
            }
        }
    }
    Ok(BfsResult::Safe {
        reachable: parent.len(),
    })
}

fn path(
    parent: &HashMap<u64, Option<(u64, u64)>>,
    last: u64,
    last_inputs: Vec<bool>,
    nl: usize,
    ni: usize,
) -> Trace {
    let mut states = vec![State::from_index(last, nl)];
    let mut inputs = vec![last_inputs];
    let mut cur = last;
    while let Some((pred, inp)) = parent[&cur] {
        states.push(State::from_index(pred, nl));
        inputs.push(bits(inp, ni));
        cur = pred;
    }
    states.reverse();
    inputs.reverse();
    Trace { states, inputs }
}
