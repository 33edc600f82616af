use super::{OracleError, Trace};
use crate::aiger::State;
use crate::lit::{Clause, Lit, Var};
use crate::sat::{Solver, SolverOptions};
use crate::ts::{Direction, TransitionSystem};

struct Unroller<'a> {
    ts: &'a TransitionSystem,
    solver: Solver,
    frames: Vec<u32>,
    next: u32,
}

impl Unroller<'_> {
    fn block(&mut self, size: usize) -> u32 {
        let base = self.next;
        self.next += size as u32;
        base
    }

    fn add_frame(&mut self) {
        let n = self.ts.num_state_vars();
        let base = self.block(n);
        self.frames.push(base);
    }

    /// Adds `clauses` with current variables in frame `t`, primed ones in
    /// frame `t + 1` and auxiliaries in a fresh block.
    fn instantiate(&mut self, clauses: &[Clause], t: usize) -> Result<(), OracleError> {
        let n = self.ts.num_state_vars() as u32;
        let aux = self.block(self.ts.num_vars() - 2 * n as usize);
        let cur = self.frames[t];
        let nxt = self.frames.get(t + 1).copied();
        for c in clauses {
            let lits: Vec<Lit> = c
                .iter()
                .map(|l| {
                    let v = l.var().0;
                    let w = if v < n {
                        cur + v
                    } else if v < 2 * n {
                        nxt.expect("next frame allocated") + v - n
                    } else {
                        aux + v - 2 * n
                    };
                    Lit::new(Var(w), l.is_negated())
                })
                .collect();
            self.solver.add_clause(&lits)?;
        }
        Ok(())
    }

    fn lit_at(&self, l: Lit, t: usize) -> Lit {
        Lit::new(Var(self.frames[t] + l.var().0), l.is_negated())
    }
}

/// Searches for a counterexample with at most `bound` transitions. The
/// first one found is the shortest.
pub fn bmc(ts: &TransitionSystem, bound: usize) -> Result<Option<Trace>, OracleError> {
    if ts.direction != Direction::Forward {
        return Err(OracleError::NotForward);
    }
    let trans = ts.all_clauses();
    let state_defs: Vec<Clause> = ts
        .state_defs()
        .into_iter()
        .flat_map(|i| ts.defs()[i].clauses())
        .collect();
    let mut u = Unroller {
        ts,
        solver: Solver::new(SolverOptions::default()),
        frames: Vec::new(),
        next: 0,
    };
    u.add_frame();
    for &l in ts.init.iter() {
        let lit = u.lit_at(l, 0);
        u.solver.add_clause(&[lit])?;
    }
    for depth in 0..=bound {
        if depth > 0 {
            u.add_frame();
            u.instantiate(&trans, depth - 1)?;
        }
        u.instantiate(&state_defs, depth)?;
        let assumptions: Vec<Lit> = ts.prop_bad.iter().map(|&l| u.lit_at(l, depth)).collect();
        if u.solver.is_sat(&assumptions)? {
            let nl = ts.num_latches();
            let ni = ts.num_inputs();
            let value = |t: usize, v: Var| u.solver.var_value(Var(u.frames[t] + v.0));
            let states = (0..=depth)
                .map(|t| State((0..nl).map(|k| value(t, ts.latch_var(k))).collect()))
                .collect();
            let inputs = (0..=depth)
                .map(|t| (0..ni).map(|k| value(t, ts.input_var(k))).collect())
                .collect();
            return Ok(Some(Trace { states, inputs }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::oracle::{bfs_reach, BfsResult};
    use std::sync::Arc;

    fn ts(aig: crate::aiger::Aig) -> TransitionSystem {
        TransitionSystem::encode(Arc::new(aig))
    }

    #[test]
    fn toggle_bound_one() {
        let t = bmc(&ts(corpus::toggle()), 1).unwrap().unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.check(&corpus::toggle()), Ok(()));
        assert_eq!(bmc(&ts(corpus::toggle()), 0).unwrap(), None);
    }

    #[test]
    fn const0_has_no_counterexample() {
        assert_eq!(bmc(&ts(corpus::const0()), 8).unwrap(), None);
    }

    #[test]
    fn zero_bound_checks_initial_states() {
        let aig =
            crate::aiger::parse(b"aag 1 0 1 1 0\n2 2 1\n2\n", crate::aiger::Format::Ascii).unwrap();
        assert_eq!(bmc(&ts(aig), 0).unwrap().map(|t| t.len()), Some(1));
    }

    #[test]
    fn rejects_reversed_system() {
        let rev = ts(corpus::toggle()).reverse().unwrap();
        assert_eq!(bmc(&rev, 1), Err(OracleError::NotForward));
    }

    /// Same verdict and shortest length as explicit search.
    #[test]
    fn agrees_with_bfs_on_random_circuits() {
        let params = corpus::RandomParams {
            max_latches: 5,
            max_inputs: 3,
            max_ands: 20,
        };
        for (name, aig) in corpus::random_corpus(500, 60, &params) {
            let bound = 1 << aig.num_latches();
            let by_bmc = bmc(&ts(aig.clone()), bound).unwrap();
            match bfs_reach(&aig, 1 << 10).unwrap() {
                BfsResult::Safe { .. } => assert_eq!(by_bmc, None, "{name}"),
                BfsResult::Unsafe(t) => {
                    let found = by_bmc.expect("bmc finds a counterexample");
                    assert_eq!(found.len(), t.len(), "{name}");
                    assert_eq!(found.check(&aig), Ok(()), "{name}");
                }
            }
        }
    }
}
