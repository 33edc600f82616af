//! A plain recursive DPLL procedure with unit propagation. Slow, but small
//! enough to trust, which makes it useful for cross-checking the CDCL
//! backend on tiny formulas.

use super::{Answer, Backend};
use crate::lit::{Lit, Var};

#[derive(Default)]
pub struct Dpll {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    model: Vec<bool>,
    failed: Vec<Lit>,
}

impl Dpll {
    pub fn new() -> Self {
        Dpll::default()
    }
}

fn value(assign: &[Option<bool>], l: Lit) -> Option<bool> {
    assign[l.var().index()].map(|v| l.eval(v))
}

/// Unit propagation to fixpoint. Returns false on a falsified clause and
/// records every assigned variable in `trail`.
fn propagate(clauses: &[Vec<Lit>], assign: &mut [Option<bool>], trail: &mut Vec<Var>) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut count = 0;
            let mut satisfied = false;
            for &l in c {
                match value(assign, l) {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        count += 1;
                        unassigned = Some(l);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (count, unassigned) {
                (0, _) => return false,
                (1, Some(l)) => {
                    assign[l.var().index()] = Some(!l.is_negated());
                    trail.push(l.var());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(
    clauses: &[Vec<Lit>],
    assign: &mut Vec<Option<bool>>,
    stop: &mut dyn FnMut() -> bool,
    steps: &mut u64,
) -> Option<bool> {
    *steps += 1;
    if (*steps).is_multiple_of(1024) && stop() {
        return None;
    }
    let mut trail = Vec::new();
    if !propagate(clauses, assign, &mut trail) {
        for v in trail {
            assign[v.index()] = None;
        }
        return Some(false);
    }
    let Some(v) = assign.iter().position(Option::is_none) else {
        return Some(true);
    };
    for choice in [false, true] {
        assign[v] = Some(choice);
        match search(clauses, assign, stop, steps) {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
    }
    assign[v] = None;
    for v in trail {
        assign[v.index()] = None;
    }
    Some(false)
}

impl Backend for Dpll {
    fn ensure_vars(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.clauses.push(lits.to_vec());
    }

    fn solve(&mut self, assumptions: &[Lit], stop: &mut dyn FnMut() -> bool) -> Answer {
        self.model.clear();
        self.failed.clear();
        let mut clauses = self.clauses.clone();
        clauses.extend(assumptions.iter().map(|&a| vec![a]));
        let mut assign = vec![None; self.num_vars];
        let mut steps = 0;
        match search(&clauses, &mut assign, stop, &mut steps) {
            None => Answer::Interrupted,
            Some(true) => {
                self.model = assign.into_iter().map(|v| v.unwrap_or(false)).collect();
                Answer::Sat
            }
            Some(false) => {
                // No conflict analysis: blame every assumption.
                self.failed = assumptions.to_vec();
                self.failed.sort_unstable();
                self.failed.dedup();
                Answer::Unsat
            }
        }
    }

    fn model_value(&self, v: Var) -> bool {
        self.model.get(v.index()).copied().unwrap_or(false)
    }

    fn failed(&self) -> &[Lit] {
        &self.failed
    }
}
