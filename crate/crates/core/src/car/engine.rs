use super::bseq::BSeq;
use super::frames::FrameSeq;
use super::invariant::invariant_found;
use super::semantics;
use super::{
    EngineError, Generalize, IterationStats, MucSample, Options, PaSample, Samples, Verdict,
};
use crate::aiger::State;
use crate::artifacts::Certificate;
use crate::limits::{Limits, UnknownReason};
use crate::lit::{Clause, Cube, Lit, Var};
use crate::oracle::Trace;
use crate::reasoners::{
    detect_dead, muc_restricted, pa_backward, pa_sat, pa_ternary, ReasonerError, Snapshot,
};
use crate::sat::{SatError, Solver, SolverOptions};
use crate::ts::{Direction, TransitionSystem};

pub enum StepResult {
    Continue,
    Done(Verdict),
}

/// Why a computation stopped early.
enum Stop {
    Unknown(UnknownReason),
    Error(EngineError),
}

impl From<SatError> for Stop {
    fn from(e: SatError) -> Self {
        match e {
            SatError::Interrupted(r) => Stop::Unknown(r),
            e => Stop::Error(EngineError::Sat(e)),
        }
    }
}

impl From<ReasonerError> for Stop {
    fn from(e: ReasonerError) -> Self {
        match e {
            ReasonerError::Sat(e) => e.into(),
            e => Stop::Error(e.into()),
        }
    }
}

impl From<EngineError> for Stop {
    fn from(e: EngineError) -> Self {
        Stop::Error(e)
    }
}

type Flow<T> = Result<T, Stop>;

#[derive(Clone, Copy, Debug, Default)]
struct Counters {
    muc: u64,
    pa: u64,
    dead: u64,
    redundant: u64,
    reused: u64,
    overlaps: u64,
}

/// One CAR engine over a (possibly reversed) transition system. It owns an
/// incremental solver holding `T` for transition queries and a second one
/// without `T` for questions about single states; in a reversed system `T`
/// only admits current states that have a forward predecessor. In both,
/// frame `j >= 1` clauses are guarded by an activation literal, as are the
/// `F∞` clauses.
pub struct Engine {
    ts: TransitionSystem,
    opts: Options,
    limits: Limits,
    solver: Solver,
    states: Solver,
    /// Activation literals of the single-state solver.
    state_acts: Vec<Var>,
    state_inf: Var,
    frames: FrameSeq,
    /// `acts[j]` guards frame `j`; `acts[0]` is unused.
    acts: Vec<Var>,
    act_inf: Var,
    bseq: BSeq,
    started: bool,
    counters: Counters,
    history: Vec<IterationStats>,
    samples: Samples,
    semantic_checks: usize,
}

impl Engine {
    pub fn new(
        ts: TransitionSystem,
        opts: &Options,
        limits: Limits,
    ) -> Result<Engine, EngineError> {
        let mut solver = Solver::new(SolverOptions {
            backend: opts.backend,
            seed: opts.seed,
            check_models: opts.debug_level >= 1,
            check_cores: opts.debug_level >= 1,
            dump_dir: None,
            limits: limits.clone(),
        });
        let setup = |solver: &mut Solver| -> Result<Var, SatError> {
            solver.ensure_vars(ts.num_vars())?;
            solver.load(&ts.all_clauses())?;
            solver.new_var()
        };
        let act_inf = setup(&mut solver).map_err(EngineError::Sat)?;
        let mut states = Solver::new(SolverOptions {
            backend: opts.backend,
            seed: opts.seed,
            limits: limits.clone(),
            ..SolverOptions::default()
        });
        let setup = |states: &mut Solver| -> Result<Var, SatError> {
            states.ensure_vars(ts.num_vars())?;
            for i in ts.state_defs() {
                states.load(&ts.defs()[i].clauses())?;
            }
            states.new_var()
        };
        let state_inf = setup(&mut states).map_err(EngineError::Sat)?;
        Ok(Engine {
            states,
            state_acts: vec![state_inf],
            state_inf,
            frames: FrameSeq::new(ts.init.clone()),
            bseq: BSeq::new(ts.prop_bad.clone()),
            ts,
            opts: opts.clone(),
            limits,
            solver,
            acts: vec![act_inf],
            act_inf,
            started: false,
            counters: Counters::default(),
            history: Vec::new(),
            samples: Samples::default(),
            semantic_checks: 0,
        })
    }

    pub fn direction(&self) -> Direction {
        self.ts.direction
    }

    pub fn frames(&self) -> &FrameSeq {
        &self.frames
    }

    pub fn bseq(&self) -> &BSeq {
        &self.bseq
    }

    pub fn history(&self) -> &[IterationStats] {
        &self.history
    }

    pub fn semantic_checks(&self) -> usize {
        self.semantic_checks
    }

    pub fn take_samples(&mut self) -> Samples {
        std::mem::take(&mut self.samples)
    }

    /// Runs the initial short counterexample checks on the first call, then
    /// one round per call: a new frame, the search, and the containment
    /// check.
    pub fn step(&mut self) -> Result<StepResult, EngineError> {
        match self.step_inner() {
            Ok(r) => Ok(r),
            Err(Stop::Unknown(r)) => Ok(StepResult::Done(Verdict::Unknown(r))),
            Err(Stop::Error(e)) => Err(e),
        }
    }

    fn step_inner(&mut self) -> Flow<StepResult> {
        if !self.started {
            self.started = true;
            if let Some(trace) = self.short_counterexample()? {
                return Ok(StepResult::Done(Verdict::Unsafe(trace)));
            }
        }
        if self
            .opts
            .max_rounds
            .is_some_and(|max| self.frames.top() >= max)
        {
            return Err(Stop::Unknown(UnknownReason::StepLimit));
        }
        let m = self.frames.top() + 1;
        let act = self.solver.new_var()?;
        self.acts.push(act);
        let state_act = self.states.new_var()?;
        self.state_acts.push(state_act);
        let p = self.ts.prop_bad.negate();
        self.solver.add_clause(&guarded(act, &p))?;
        self.states.add_clause(&guarded(state_act, &p))?;
        self.frames.push(p);

        if let Some(trace) = self.explore(m)? {
            return Ok(StepResult::Done(Verdict::Unsafe(trace)));
        }
        if self.opts.debug_level >= 1 && self.layers_reachable_from_top(m)? {
            self.counters.overlaps += 1;
        }
        let found = invariant_found(&self.ts, &self.frames, &self.limits)?;
        if self.opts.debug_level >= 2 {
            match semantics::check(&self.ts, &self.frames, &self.bseq) {
                Ok(true) => self.semantic_checks += 1,
                Ok(false) => {}
                Err(msg) => return Err(EngineError::Semantic { round: m, msg }.into()),
            }
        }
        self.history.push(self.record(m));
        Ok(match found {
            Some(j) => StepResult::Done(Verdict::Safe(self.certificate(j))),
            None => StepResult::Continue,
        })
    }

    fn record(&self, m: usize) -> IterationStats {
        IterationStats {
            direction: self.ts.direction,
            iteration: m,
            frame_clauses: self.frames.sizes(),
            inf_clauses: self.frames.inf().len(),
            layer_sizes: self.bseq.layer_sizes(),
            sat_calls: self.solver.stats().solves + self.states.stats().solves,
            muc_calls: self.counters.muc,
            pa_calls: self.counters.pa,
            dead_cubes: self.counters.dead,
            redundant_blocks: self.counters.redundant,
            reused_cubes: self.counters.reused,
            overlap_violations: self.counters.overlaps,
        }
    }

    fn certificate(&self, j: usize) -> Certificate {
        Certificate {
            direction: self.ts.direction,
            num_latches: self.ts.num_latches(),
            num_inputs: self.ts.num_inputs(),
            alias: self.ts.bad_alias().is_some(),
            index: j,
            frames: (0..=j)
                .map(|k| {
                    if k == 0 {
                        self.frames.flat(0)
                    } else {
                        self.frames.clauses(k).to_vec()
                    }
                })
                .collect(),
            inf: self.frames.inf().to_vec(),
        }
    }

    fn frame_assumptions(&self, j: usize) -> Vec<Lit> {
        if j == 0 {
            self.ts.init.to_vec()
        } else {
            vec![self.acts[j].pos(), self.act_inf.pos()]
        }
    }

    /// `F_j ∧ T ∧ target`, with `target` over primed variables.
    fn query(&mut self, j: usize, target: &Cube) -> Flow<bool> {
        let mut assumptions = self.frame_assumptions(j);
        assumptions.extend(target.iter());
        Ok(self.solver.is_sat(&assumptions)?)
    }

    /// Counterexamples of one and two states.
    fn short_counterexample(&mut self) -> Flow<Option<Trace>> {
        let mut now: Vec<Lit> = self.ts.init.to_vec();
        now.extend(self.ts.prop_bad.iter());
        if self.states.is_sat(&now)? {
            let snap = Snapshot::take(&self.states, &self.ts);
            return self.trace_of(vec![snap.cur]).map(Some);
        }
        let target = self.ts.prime_cube(&self.ts.prop_bad);
        if self.query(0, &target)? {
            let snap = Snapshot::take(&self.solver, &self.ts);
            let states = match self.ts.direction {
                Direction::Forward => vec![snap.cur, snap.next],
                Direction::Backward => vec![snap.next, snap.cur],
            };
            return self.trace_of(states).map(Some);
        }
        Ok(None)
    }

    fn explore(&mut self, m: usize) -> Flow<Option<Trace>> {
        for i in (0..self.bseq.num_layers()).rev() {
            let mut idx = 0;
            while idx < self.bseq.layer(i).len() {
                let b = self.bseq.layer(i)[idx];
                let target = self.ts.prime_cube(&self.bseq.node(b).cube);
                while self.query(m, &target)? {
                    let snap = Snapshot::take(&self.solver, &self.ts);
                    let c = self.generalize(m, &target, &snap)?;
                    if self.block_if_dead(&c)? {
                        continue;
                    }
                    let (id, reused) = self.bseq.insert(i + 1, c, b, snap);
                    self.counters.reused += u64::from(reused);
                    if let Some(trace) = self.dfscheck(id, m - 1, m)? {
                        return Ok(Some(trace));
                    }
                }
                idx += 1;
            }
        }
        Ok(None)
    }

    /// Depth-first search backwards from `start`, first against frame
    /// `findex`. Blocked obligations are retried one frame higher while that
    /// frame is below `m`.
    fn dfscheck(&mut self, start: usize, findex: usize, m: usize) -> Flow<Option<Trace>> {
        let mut stack = vec![(start, findex)];
        while let Some(&(node, k)) = stack.last() {
            if stack.len() > self.opts.max_depth {
                return Err(Stop::Unknown(UnknownReason::StepLimit));
            }
            let target = self.ts.prime_cube(&self.bseq.node(node).cube);
            if self.query(k, &target)? {
                let snap = Snapshot::take(&self.solver, &self.ts);
                if k == 0 {
                    return self.counterexample(node, snap).map(Some);
                }
                let c = self.generalize(k, &target, &snap)?;
                if self.block_if_dead(&c)? {
                    continue;
                }
                let layer = self.bseq.node(node).layer + 1;
                let (id, reused) = self.bseq.insert(layer, c, node, snap);
                self.counters.reused += u64::from(reused);
                stack.push((id, k - 1));
            } else {
                self.block(k, &target)?;
                if k + 1 < m {
                    *stack.last_mut().expect("non-empty") = (node, k + 1);
                } else {
                    stack.pop();
                }
            }
        }
        Ok(None)
    }

    fn generalize(&mut self, j: usize, target: &Cube, snap: &Snapshot) -> Flow<Cube> {
        self.counters.pa += 1;
        let view = self.frames.view(j);
        let cube = match (self.ts.direction, self.opts.generalize) {
            (Direction::Forward, Generalize::Ternary) => pa_ternary(&self.ts, &view, target, snap)?,
            (Direction::Forward, Generalize::Sat) => {
                pa_sat(&mut self.solver, &self.ts, &view, target, snap)?
            }
            (Direction::Backward, _) => pa_backward(&self.ts, &view, snap)?,
        };
        if self.opts.record_samples {
            self.samples.pa.push(PaSample {
                direction: self.ts.direction,
                frame: self.frames.flat(j),
                target: Cube::new(target.iter().map(|&l| self.ts.unprime(l))),
                next: snap.next.clone(),
                result: cube.clone(),
            });
        }
        Ok(cube)
    }

    /// After `F_k ∧ T ∧ target` came back unsatisfiable, blocks a minimal
    /// part of `target` in `F_{k+1}`.
    fn block(&mut self, k: usize, target: &Cube) -> Flow<()> {
        let base = self.frame_assumptions(k);
        let core = muc_restricted(&mut self.solver, &base, target, &mut self.counters.muc)?;
        if self.opts.record_samples {
            self.samples.muc.push(MucSample {
                direction: self.ts.direction,
                frame: self.frames.flat(k),
                core: core.clone(),
            });
        }
        let clause = Cube::new(core.iter().map(|&l| self.ts.unprime(l))).negate();
        self.add_blocking(k + 1, clause)
    }

    /// Adds `clause` to `F_j` unless it removes no state of `F_j`.
    fn add_blocking(&mut self, j: usize, clause: Clause) -> Flow<()> {
        if self.frames.implies(j, &clause) {
            self.counters.redundant += 1;
            return Ok(());
        }
        let mut assumptions = vec![self.state_acts[j].pos(), self.state_inf.pos()];
        assumptions.extend(clause.iter().map(|&l| !l));
        if !self.states.is_sat(&assumptions)? {
            self.counters.redundant += 1;
            return Ok(());
        }
        self.solver.add_clause(&guarded(self.acts[j], &clause))?;
        self.states
            .add_clause(&guarded(self.state_acts[j], &clause))?;
        self.frames.add(j, clause);
        Ok(())
    }

    /// Forward mode only: if no state of `c` has a predecessor, excludes a
    /// core of it from every frame above 0 and returns true.
    fn block_if_dead(&mut self, c: &Cube) -> Flow<bool> {
        if self.ts.direction != Direction::Forward || !self.opts.dead_states {
            return Ok(false);
        }
        let Some(d) = detect_dead(&mut self.solver, &self.ts, c, &mut self.counters.muc)? else {
            return Ok(false);
        };
        if self.opts.record_samples {
            self.samples.muc.push(MucSample {
                direction: self.ts.direction,
                frame: Vec::new(),
                core: self.ts.prime_cube(&d),
            });
        }
        self.counters.dead += 1;
        let clause = d.negate();
        if self.frames.implies_inf(&clause) {
            return Err(EngineError::Internal("dead cube was already excluded".into()).into());
        }
        self.solver.add_clause(&guarded(self.act_inf, &clause))?;
        self.states.add_clause(&guarded(self.state_inf, &clause))?;
        self.frames.add_inf(clause);
        Ok(true)
    }

    /// Builds the path through the stored layers after `F_0 ∧ T ∧ node'`
    /// was satisfied by `snap`.
    fn counterexample(&self, node: usize, snap: Snapshot) -> Flow<Trace> {
        let states = match self.ts.direction {
            Direction::Forward => {
                // Every state of a stored cube steps into its parent's cube
                // under the recorded next inputs, so re-simulating from the
                // initial state walks down to the root.
                let aig = self.ts.aig();
                let mut states = vec![snap.cur.clone()];
                let mut next_inputs = self.ts.split_state(&snap.next).1;
                let mut id = node;
                loop {
                    let (latches, inputs) = self.ts.split_state(states.last().expect("non-empty"));
                    let (next, _) = aig.simulate_step(&State(latches), &inputs);
                    states.push(self.ts.state_assignment(&next, &next_inputs));
                    let n = self.bseq.node(id);
                    match (n.parent, &n.snap) {
                        (Some(p), Some(s)) => {
                            next_inputs = self.ts.split_state(&s.next).1;
                            id = p;
                        }
                        _ => break,
                    }
                }
                states
            }
            Direction::Backward => {
                // Reversed cubes keep all latches, so the recorded
                // successors chain up exactly; read them root first.
                let mut states: Vec<Vec<bool>> = self
                    .bseq
                    .chain(node)
                    .into_iter()
                    .rev()
                    .map(|id| {
                        self.bseq
                            .node(id)
                            .snap
                            .as_ref()
                            .expect("non-root")
                            .next
                            .clone()
                    })
                    .collect();
                states.push(snap.next);
                states.push(snap.cur);
                states
            }
        };
        self.trace_of(states)
    }

    fn trace_of(&self, valuations: Vec<Vec<bool>>) -> Flow<Trace> {
        let mut trace = Trace {
            states: Vec::new(),
            inputs: Vec::new(),
        };
        for v in &valuations {
            let (latches, inputs) = self.ts.split_state(v);
            trace.states.push(State(latches));
            trace.inputs.push(inputs);
        }
        let aig = self.ts.aig();
        trace.truncate_at_first_bad(aig);
        trace.check(aig).map_err(EngineError::from)?;
        Ok(trace)
    }

    /// True if some state of `F_m` steps into a stored layer cube. Encoded
    /// afresh so the check does not disturb the main solver.
    fn layers_reachable_from_top(&mut self, m: usize) -> Flow<bool> {
        let mut s = Solver::new(SolverOptions {
            limits: self.limits.clone(),
            ..SolverOptions::default()
        });
        s.ensure_vars(self.ts.num_vars())?;
        s.load(&self.ts.all_clauses())?;
        s.load(&self.frames.flat(m))?;
        let mut any = Vec::new();
        for node in self.bseq.all() {
            let y = s.new_var()?;
            for &l in node.cube.iter() {
                s.add_clause(&[y.neg(), self.ts.prime(l)])?;
            }
            any.push(y.pos());
        }
        s.add_clause(&any)?;
        Ok(s.is_sat(&[])?)
    }
}

fn guarded(act: Var, c: &Clause) -> Vec<Lit> {
    let mut lits = vec![act.neg()];
    lits.extend(c.iter());
    lits
}
