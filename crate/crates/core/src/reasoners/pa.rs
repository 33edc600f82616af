use super::ternary::{frame_holds, lit_tv, simulate, Tv};
use super::{FrameView, ReasonerError};
use crate::lit::{Cube, Lit, Var};
use crate::sat::Solver;
use crate::ts::TransitionSystem;

/// Values of the state variables on both sides of a satisfying assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub cur: Vec<bool>,
    pub next: Vec<bool>,
}

impl Snapshot {
    pub fn take(solver: &Solver, ts: &TransitionSystem) -> Snapshot {
        let n = ts.num_state_vars() as u32;
        Snapshot {
            cur: (0..n).map(|v| solver.var_value(Var(v))).collect(),
            next: (0..n).map(|v| solver.var_value(Var(n + v))).collect(),
        }
    }

    /// Latch and input values of the current side.
    pub fn cur_state(&self, ts: &TransitionSystem) -> (Vec<bool>, Vec<bool>) {
        ts.split_state(&self.cur)
    }

    pub fn next_state(&self, ts: &TransitionSystem) -> (Vec<bool>, Vec<bool>) {
        ts.split_state(&self.next)
    }
}

/// Latch and input variables, the candidates for generalization.
fn free_vars(ts: &TransitionSystem) -> impl Iterator<Item = Var> {
    (0..(ts.num_latches() + ts.num_inputs()) as u32).map(Var)
}

fn mark_support(ts: &TransitionSystem, defs: &[usize], frame: &FrameView, support: &mut [bool]) {
    let mut mark = |l: Lit| {
        if ts.is_current(l.var()) {
            support[l.var().index()] = true;
        }
    };
    for &i in defs {
        ts.defs()[i].inputs().for_each(&mut mark);
    }
    match frame {
        FrameView::Init(c) => c.iter().copied().for_each(&mut mark),
        FrameView::Clauses { frame, inf } => {
            for c in frame.iter().chain(inf.iter()) {
                c.iter().copied().for_each(&mut mark);
            }
        }
    }
}

/// Shrinks the current-state part of a model of `frame ∧ T ∧ target'` by
/// ternary simulation. Every state of the returned cube lies in `frame` and,
/// with the next-state inputs of `snap`, steps into `target`.
pub fn pa_ternary(
    ts: &TransitionSystem,
    frame: &FrameView,
    target: &Cube,
    snap: &Snapshot,
) -> Result<Cube, ReasonerError> {
    let mut defs = ts.cofactor_trans(target).defs;
    defs.extend(ts.state_defs());
    defs.sort_unstable();
    defs.dedup();

    let mut vals = vec![Tv::X; ts.num_vars()];
    for v in free_vars(ts) {
        vals[v.index()] = Tv::from_bool(snap.cur[v.index()]);
    }
    for k in 0..ts.num_inputs() {
        let v = ts.input_var(k);
        vals[ts.prime(v.pos()).var().index()] = Tv::from_bool(snap.next[v.index()]);
    }
    let holds = |vals: &mut Vec<Tv>| {
        simulate(ts, &defs, vals);
        target.iter().all(|&l| lit_tv(vals, l) == Tv::One) && frame_holds(frame, vals)
    };
    if !holds(&mut vals) {
        return Err(ReasonerError::Internal(
            "model does not satisfy the predecessor query".into(),
        ));
    }

    let mut support = vec![false; ts.num_state_vars()];
    mark_support(ts, &defs, frame, &mut support);
    for v in free_vars(ts) {
        let old = vals[v.index()];
        vals[v.index()] = Tv::X;
        if support[v.index()] && !holds(&mut vals) {
            vals[v.index()] = old;
        }
    }
    Ok(Cube::new(free_vars(ts).filter_map(|v| {
        match vals[v.index()] {
            Tv::X => None,
            t => Some(v.lit(t == Tv::One)),
        }
    })))
}

/// Generalization for the reversed system, where ternary simulation cannot
/// run from successor to predecessor. Latch values are kept because they
/// are exactly the image of the model's predecessor; inputs are dropped
/// while the frame still contains every state of the cube.
pub fn pa_backward(
    ts: &TransitionSystem,
    frame: &FrameView,
    snap: &Snapshot,
) -> Result<Cube, ReasonerError> {
    let defs = ts.state_defs();
    let mut vals = vec![Tv::X; ts.num_vars()];
    for v in free_vars(ts) {
        vals[v.index()] = Tv::from_bool(snap.cur[v.index()]);
    }
    let holds = |vals: &mut Vec<Tv>| {
        simulate(ts, &defs, vals);
        frame_holds(frame, vals)
    };
    if !holds(&mut vals) {
        return Err(ReasonerError::Internal(
            "model lies outside the frame".into(),
        ));
    }
    for k in 0..ts.num_inputs() {
        let v = ts.input_var(k).index();
        let old = vals[v];
        vals[v] = Tv::X;
        if !holds(&mut vals) {
            vals[v] = old;
        }
    }
    Ok(Cube::new(free_vars(ts).filter_map(|v| {
        match vals[v.index()] {
            Tv::X => None,
            t => Some(v.lit(t == Tv::One)),
        }
    })))
}

/// Literal dropping checked by the solver: a literal may go if the rest of
/// the cube, with the model's next-state inputs, cannot step outside
/// `target`. `solver` must hold `T` and the property definitions. Frame
/// membership is still checked by ternary evaluation.
pub fn pa_sat(
    solver: &mut Solver,
    ts: &TransitionSystem,
    frame: &FrameView,
    target: &Cube,
    snap: &Snapshot,
) -> Result<Cube, ReasonerError> {
    solver.ensure_vars(ts.num_vars())?;
    let act = solver.new_var()?;
    let mut escape: Vec<Lit> = vec![act.neg()];
    escape.extend(target.iter().map(|&l| !l));
    solver.add_clause(&escape)?;
    let fixed: Vec<Lit> = (0..ts.num_inputs())
        .map(|k| {
            let v = ts.input_var(k);
            ts.prime(v.lit(snap.next[v.index()]))
        })
        .collect();

    let sdefs = ts.state_defs();
    let in_frame = |cube: &[Lit]| {
        let mut vals = vec![Tv::X; ts.num_vars()];
        for &l in cube {
            vals[l.var().index()] = Tv::from_bool(!l.is_negated());
        }
        simulate(ts, &sdefs, &mut vals);
        frame_holds(frame, &vals)
    };

    let mut cube: Vec<Lit> = free_vars(ts).map(|v| v.lit(snap.cur[v.index()])).collect();
    let mut k = 0;
    while k < cube.len() {
        let mut candidate = cube.clone();
        candidate.remove(k);
        let mut assumptions = vec![act.pos()];
        assumptions.extend(&fixed);
        assumptions.extend(&candidate);
        if in_frame(&candidate) && !solver.is_sat(&assumptions)? {
            cube = candidate;
        } else {
            k += 1;
        }
    }
    solver.add_clause(&[act.neg()])?;
    Ok(Cube::new(cube))
}
