//! Symbolic transition systems built from AIGs.
//!
//! Variables are laid out in three ranges:
//!
//! * `0..n`: state variables `V`, meaning latches, then inputs, then the bad-state
//!   alias when the property is not already a latch or input literal;
//! * `n..2n`: their primed copies `V'`, with `prime(v) = v + n`;
//! * `2n..`: auxiliary gate variables, never primed.
//!
//! A state is a valuation of latches and inputs; the alias is a function of
//! both. The relation `T(x, x')` fixes the primed latches to the next-state
//! functions and leaves primed inputs free. Every clause comes from a
//! [`Def`], a functional definition of one variable, kept in topological
//! order so that ternary simulation can run directly over the definitions.

use std::sync::Arc;

use thiserror::Error;

use crate::aiger::{lit_is_negated, lit_var, Aig, AigLit, Node};
use crate::lit::{Clause, Cube, Lit, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

/// What a state variable stands for in the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateVar {
    Latch(usize),
    Input(usize),
    BadAlias,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefKind {
    And(Lit, Lit),
    Equiv(Lit),
    Const(bool),
}

/// Which formula a definition belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// Gates and next-state equivalences of `T`.
    Trans,
    /// The bad-state alias and the primed copy of its cone.
    Property,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Def {
    pub out: Var,
    pub kind: DefKind,
    pub part: Part,
}

impl Def {
    pub fn clauses(&self) -> Vec<Clause> {
        let g = self.out;
        match self.kind {
            DefKind::And(a, b) => [
                Clause::try_new([g.neg(), a]),
                Clause::try_new([g.neg(), b]),
                Clause::try_new([g.pos(), !a, !b]),
            ]
            .into_iter()
            .flatten()
            .collect(),
            DefKind::Equiv(l) => vec![Clause::new([g.neg(), l]), Clause::new([g.pos(), !l])],
            DefKind::Const(c) => vec![Clause::new([g.lit(c)])],
        }
    }

    pub fn inputs(&self) -> impl Iterator<Item = Lit> {
        let (a, b) = match self.kind {
            DefKind::And(a, b) => (Some(a), Some(b)),
            DefKind::Equiv(l) => (Some(l), None),
            DefKind::Const(_) => (None, None),
        };
        a.into_iter().chain(b)
    }

    fn rename(&self, f: impl Fn(Lit) -> Lit) -> Def {
        let kind = match self.kind {
            DefKind::And(a, b) => DefKind::And(f(a), f(b)),
            DefKind::Equiv(l) => DefKind::Equiv(f(l)),
            DefKind::Const(c) => DefKind::Const(c),
        };
        Def {
            out: f(self.out.pos()).var(),
            kind,
            part: self.part,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TsError {
    #[error("the transition system is already reversed")]
    AlreadyReversed,
}

#[derive(Clone, Debug)]
pub struct TransitionSystem {
    aig: Arc<Aig>,
    state_vars: Vec<StateVar>,
    num_vars: usize,
    defs: Vec<Def>,
    def_of: Vec<Option<usize>>,
    pub init: Cube,
    pub prop_bad: Cube,
    pub direction: Direction,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sig {
    Const(bool),
    Lit(Lit),
}

impl Sig {
    fn negate_if(self, neg: bool) -> Sig {
        match self {
            Sig::Const(c) => Sig::Const(c != neg),
            Sig::Lit(l) if neg => Sig::Lit(!l),
            s => s,
        }
    }
}

struct Encoder {
    defs: Vec<Def>,
    next_var: u32,
}

impl Encoder {
    fn fresh(&mut self) -> Var {
        let v = Var(self.next_var);
        self.next_var += 1;
        v
    }

    fn and(&mut self, a: Sig, b: Sig, part: Part) -> Sig {
        match (a, b) {
            (Sig::Const(false), _) | (_, Sig::Const(false)) => Sig::Const(false),
            (Sig::Const(true), s) | (s, Sig::Const(true)) => s,
            (Sig::Lit(a), Sig::Lit(b)) => {
                let out = self.fresh();
                self.defs.push(Def {
                    out,
                    kind: DefKind::And(a, b),
                    part,
                });
                Sig::Lit(out.pos())
            }
        }
    }

    fn define(&mut self, out: Var, sig: Sig, part: Part) {
        let kind = match sig {
            Sig::Const(c) => DefKind::Const(c),
            Sig::Lit(l) => DefKind::Equiv(l),
        };
        self.defs.push(Def { out, kind, part });
    }
}

fn sig_of(map: &[Sig], lit: AigLit) -> Sig {
    map[lit_var(lit) as usize].negate_if(lit_is_negated(lit))
}

impl TransitionSystem {
    /// Encodes an AIG as a forward transition system.
    pub fn encode(aig: Arc<Aig>) -> Self {
        let nl = aig.num_latches();
        let ni = aig.num_inputs();
        let nodes = aig.nodes();

        // Decide up front whether the property needs an alias so that the
        // state range has its final size before any auxiliary variable.
        let direct = matches!(
            nodes[lit_var(aig.bad) as usize],
            Node::Latch(_) | Node::Input(_)
        );
        let mut state_vars: Vec<StateVar> = (0..nl)
            .map(StateVar::Latch)
            .chain((0..ni).map(StateVar::Input))
            .collect();
        if !direct {
            state_vars.push(StateVar::BadAlias);
        }
        let n = state_vars.len() as u32;
        let latch_var = |k: usize| Var(k as u32);
        let input_var = |k: usize| Var((nl + k) as u32);
        let prime = |v: Var| Var(v.0 + n);

        let mut enc = Encoder {
            defs: Vec::new(),
            next_var: 2 * n,
        };

        let leaf = |node: Node, primed: bool| -> Option<Sig> {
            let v = match node {
                Node::Const => return Some(Sig::Const(false)),
                Node::Input(k) => input_var(k),
                Node::Latch(k) => latch_var(k),
                _ => return None,
            };
            Some(Sig::Lit(if primed { prime(v) } else { v }.pos()))
        };

        let mut cur = vec![Sig::Const(false); aig.max_var as usize + 1];
        for (var, &node) in nodes.iter().enumerate() {
            if let Some(s) = leaf(node, false) {
                cur[var] = s;
            }
        }
        for gate in &aig.ands {
            let a = sig_of(&cur, gate.rhs0);
            let b = sig_of(&cur, gate.rhs1);
            cur[lit_var(gate.lhs) as usize] = enc.and(a, b, Part::Trans);
        }
        for (k, latch) in aig.latches.iter().enumerate() {
            enc.define(prime(latch_var(k)), sig_of(&cur, latch.next), Part::Trans);
        }

        let bad_sig = sig_of(&cur, aig.bad);
        let prop_bad = if direct {
            let Sig::Lit(l) = bad_sig else { unreachable!() };
            Cube::new([l])
        } else {
            let alias = Var(n - 1);
            enc.define(alias, bad_sig, Part::Property);

            // Primed copy of the property cone.
            let mut in_cone = vec![false; aig.max_var as usize + 1];
            in_cone[lit_var(aig.bad) as usize] = true;
            for gate in aig.ands.iter().rev() {
                if in_cone[lit_var(gate.lhs) as usize] {
                    in_cone[lit_var(gate.rhs0) as usize] = true;
                    in_cone[lit_var(gate.rhs1) as usize] = true;
                }
            }
            let mut primed = vec![Sig::Const(false); aig.max_var as usize + 1];
            for (var, &node) in nodes.iter().enumerate() {
                if in_cone[var] {
                    if let Some(s) = leaf(node, true) {
                        primed[var] = s;
                    }
                }
            }
            for gate in &aig.ands {
                if in_cone[lit_var(gate.lhs) as usize] {
                    let a = sig_of(&primed, gate.rhs0);
                    let b = sig_of(&primed, gate.rhs1);
                    primed[lit_var(gate.lhs) as usize] = enc.and(a, b, Part::Property);
                }
            }
            enc.define(prime(alias), sig_of(&primed, aig.bad), Part::Property);
            Cube::new([alias.pos()])
        };

        let init = Cube::new(
            aig.latches
                .iter()
                .enumerate()
                .map(|(k, l)| latch_var(k).lit(l.reset.value())),
        );

        let num_vars = enc.next_var as usize;
        let mut ts = TransitionSystem {
            aig,
            state_vars,
            num_vars,
            defs: enc.defs,
            def_of: Vec::new(),
            init,
            prop_bad,
            direction: Direction::Forward,
        };
        ts.index_defs();
        ts
    }

    fn index_defs(&mut self) {
        self.def_of = vec![None; self.num_vars];
        for (i, d) in self.defs.iter().enumerate() {
            self.def_of[d.out.index()] = Some(i);
        }
    }

    /// The system with the roles of current and next state exchanged, whose
    /// initial states are the bad states and whose bad states are the
    /// initial ones.
    pub fn reverse(&self) -> Result<TransitionSystem, TsError> {
        if self.direction == Direction::Backward {
            return Err(TsError::AlreadyReversed);
        }
        let n = self.num_state_vars() as u32;
        let swap = |l: Lit| {
            let v = l.var().0;
            let w = if v < n {
                v + n
            } else if v < 2 * n {
                v - n
            } else {
                v
            };
            Lit::new(Var(w), l.is_negated())
        };
        let mut ts = TransitionSystem {
            aig: Arc::clone(&self.aig),
            state_vars: self.state_vars.clone(),
            num_vars: self.num_vars,
            defs: self.defs.iter().map(|d| d.rename(swap)).collect(),
            def_of: Vec::new(),
            init: self.prop_bad.clone(),
            prop_bad: self.init.clone(),
            direction: Direction::Backward,
        };
        ts.index_defs();
        Ok(ts)
    }

    pub fn aig(&self) -> &Arc<Aig> {
        &self.aig
    }

    pub fn num_state_vars(&self) -> usize {
        self.state_vars.len()
    }

    /// Total number of variables including primed and auxiliary ones.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn state_var(&self, v: Var) -> Option<StateVar> {
        self.state_vars.get(v.index()).copied()
    }

    pub fn state_vars(&self) -> &[StateVar] {
        &self.state_vars
    }

    pub fn num_latches(&self) -> usize {
        self.aig.num_latches()
    }

    pub fn num_inputs(&self) -> usize {
        self.aig.num_inputs()
    }

    pub fn latch_var(&self, k: usize) -> Var {
        Var(k as u32)
    }

    pub fn input_var(&self, k: usize) -> Var {
        Var((self.num_latches() + k) as u32)
    }

    pub fn bad_alias(&self) -> Option<Var> {
        (self.state_vars.last() == Some(&StateVar::BadAlias))
            .then(|| Var(self.state_vars.len() as u32 - 1))
    }

    #[inline]
    pub fn is_current(&self, v: Var) -> bool {
        v.index() < self.num_state_vars()
    }

    #[inline]
    pub fn is_primed(&self, v: Var) -> bool {
        let n = self.num_state_vars();
        (n..2 * n).contains(&v.index())
    }

    #[inline]
    pub fn prime(&self, l: Lit) -> Lit {
        debug_assert!(self.is_current(l.var()));
        Lit::new(
            Var(l.var().0 + self.num_state_vars() as u32),
            l.is_negated(),
        )
    }

    #[inline]
    pub fn unprime(&self, l: Lit) -> Lit {
        debug_assert!(self.is_primed(l.var()));
        Lit::new(
            Var(l.var().0 - self.num_state_vars() as u32),
            l.is_negated(),
        )
    }

    pub fn prime_cube(&self, c: &Cube) -> Cube {
        c.map_vars(|l| self.prime(l))
    }

    pub fn defs(&self) -> &[Def] {
        &self.defs
    }

    pub fn def_of(&self, v: Var) -> Option<&Def> {
        self.def_of
            .get(v.index())
            .copied()
            .flatten()
            .map(|i| &self.defs[i])
    }

    /// Clauses of `T` alone.
    pub fn trans(&self) -> Vec<Clause> {
        self.part_clauses(Part::Trans)
    }

    /// Clauses defining the bad-state alias on both sides.
    pub fn property_clauses(&self) -> Vec<Clause> {
        self.part_clauses(Part::Property)
    }

    fn part_clauses(&self, part: Part) -> Vec<Clause> {
        self.defs
            .iter()
            .filter(|d| d.part == part)
            .flat_map(Def::clauses)
            .collect()
    }

    /// Everything a solver needs to reason about `T` and the property.
    pub fn all_clauses(&self) -> Vec<Clause> {
        self.defs.iter().flat_map(Def::clauses).collect()
    }

    /// Indices of definitions in the fan-in of `roots`, topologically
    /// ordered. Traversal stops at current-state variables.
    pub fn cone(&self, roots: impl IntoIterator<Item = Var>) -> Vec<usize> {
        let mut seen = vec![false; self.num_vars];
        let mut stack: Vec<Var> = roots.into_iter().collect();
        let mut picked = Vec::new();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v.index()], true) {
                continue;
            }
            if let Some(i) = self.def_of[v.index()] {
                picked.push(i);
                for l in self.defs[i].inputs() {
                    if !self.is_current(l.var()) {
                        stack.push(l.var());
                    }
                }
            }
        }
        picked.sort_unstable();
        picked
    }

    /// The part of `T` that constrains a primed target cube.
    pub fn cofactor_trans(&self, target: &Cube) -> Cofactor {
        debug_assert!(target.iter().all(|l| self.is_primed(l.var())));
        Cofactor {
            defs: self.cone(target.iter().map(|l| l.var())),
        }
    }

    /// Definitions that tie derived current-state variables (the alias) to
    /// latches and inputs, for reasoning about frames without `T`.
    pub fn state_defs(&self) -> Vec<usize> {
        let mut picked = Vec::new();
        if let Some(alias) = self.bad_alias() {
            // The alias's inputs are current state vars in one direction and
            // auxiliaries in the other; walk auxiliaries only.
            let mut seen = vec![false; self.num_vars];
            let mut stack = vec![alias];
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut seen[v.index()], true) {
                    continue;
                }
                if let Some(i) = self.def_of[v.index()] {
                    picked.push(i);
                    for l in self.defs[i].inputs() {
                        if l.var().index() >= 2 * self.num_state_vars() {
                            stack.push(l.var());
                        }
                    }
                }
            }
        }
        picked.sort_unstable();
        picked
    }

    /// Valuation of `V` for concrete latch and input values, computing the
    /// alias by simulation.
    pub fn state_assignment(&self, latches: &[bool], inputs: &[bool]) -> Vec<bool> {
        let mut values: Vec<bool> = latches.iter().chain(inputs).copied().collect();
        if self.bad_alias().is_some() {
            let state = crate::aiger::State(latches.to_vec());
            values.push(self.aig.is_bad(&state, inputs));
        }
        values
    }

    /// Splits a valuation of `V` into latch and input vectors.
    pub fn split_state(&self, values: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let nl = self.num_latches();
        let ni = self.num_inputs();
        (values[..nl].to_vec(), values[nl..nl + ni].to_vec())
    }
}

/// A subset of the definitions (and hence clauses) of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cofactor {
    pub defs: Vec<usize>,
}

impl Cofactor {
    pub fn clauses(&self, ts: &TransitionSystem) -> Vec<Clause> {
        self.defs
            .iter()
            .flat_map(|&i| ts.defs()[i].clauses())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::State;
    use crate::corpus;
    use crate::lit::Lit;

    fn ts_of(aig: Aig) -> TransitionSystem {
        TransitionSystem::encode(Arc::new(aig))
    }

    fn set(clauses: Vec<Clause>) -> Vec<Clause> {
        let mut c = clauses;
        c.sort();
        c
    }

    #[test]
    fn toggle_encoding() {
        let ts = ts_of(corpus::toggle());
        let l = Var(0);
        let lp = Var(1);
        assert_eq!(
            set(ts.trans()),
            set(vec![
                Clause::new([lp.pos(), l.pos()]),
                Clause::new([lp.neg(), l.neg()])
            ])
        );
        assert_eq!(ts.init, Cube::new([l.neg()]));
        assert_eq!(ts.prop_bad, Cube::new([l.pos()]));
        assert!(ts.property_clauses().is_empty());
    }

    #[test]
    fn const0_encoding() {
        let ts = ts_of(corpus::const0());
        assert_eq!(ts.trans(), vec![Clause::new([Var(1).neg()])]);
        assert_eq!(ts.init, Cube::new([Var(0).neg()]));
        assert_eq!(ts.prop_bad, Cube::new([Var(0).pos()]));
    }

    #[test]
    fn counter2_clause_count() {
        let aig = corpus::counter2();
        let ts = ts_of(aig.clone());
        assert_eq!(ts.trans().len(), 2 * aig.num_latches() + 3 * aig.ands.len());
        assert!(ts.bad_alias().is_some());
    }

    /// Brute force: all assignments of the solver variables, projected to
    /// (latches, latches'), against the simulated edges.
    fn edges_by_enumeration(ts: &TransitionSystem) -> Vec<(u64, u64)> {
        let clauses = ts.all_clauses();
        let nv = ts.num_vars();
        assert!(nv <= 22, "too many variables for enumeration");
        let n = ts.num_state_vars();
        let nl = ts.num_latches();
        let mut edges = Vec::new();
        for bits in 0u64..(1 << nv) {
            let a: Vec<bool> = (0..nv).map(|i| bits >> i & 1 == 1).collect();
            if clauses.iter().all(|c| c.eval(&a)) {
                let s = State(a[..nl].to_vec()).to_index();
                let t = State(a[n..n + nl].to_vec()).to_index();
                edges.push((s, t));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn edges_by_simulation(aig: &Aig) -> Vec<(u64, u64)> {
        let nl = aig.num_latches();
        let ni = aig.num_inputs();
        let mut edges = Vec::new();
        for s in 0..1u64 << nl {
            for i in 0..1u64 << ni {
                let st = State::from_index(s, nl);
                let inputs: Vec<bool> = (0..ni).map(|k| i >> k & 1 == 1).collect();
                let (next, _) = aig.simulate_step(&st, &inputs);
                edges.push((s, next.to_index()));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    #[test]
    fn counter2_edges_match_simulation() {
        let aig = corpus::counter2();
        let ts = ts_of(aig.clone());
        let edges = edges_by_enumeration(&ts);
        assert_eq!(edges.len(), 4);
        assert_eq!(edges, edges_by_simulation(&aig));
    }

    #[test]
    fn encoding_sound_on_small_random_circuits() {
        let params = corpus::RandomParams {
            max_latches: 3,
            max_inputs: 2,
            max_ands: 4,
        };
        for seed in 0..60 {
            let aig = corpus::random_aig(seed, &params);
            let ts = ts_of(aig.clone());
            if ts.num_vars() > 20 {
                continue;
            }
            assert_eq!(
                edges_by_enumeration(&ts),
                edges_by_simulation(&aig),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn reverse_swaps_roles() {
        let ts = ts_of(corpus::toggle());
        let rev = ts.reverse().unwrap();
        assert_eq!(rev.direction, Direction::Backward);
        assert_eq!(rev.init, Cube::new([Var(0).pos()]));
        assert_eq!(rev.prop_bad, Cube::new([Var(0).neg()]));
        // (L ∨ L'), (¬L ∨ ¬L') is symmetric in L and L'.
        assert_eq!(set(rev.trans()), set(ts.trans()));
        assert_eq!(rev.reverse().unwrap_err(), TsError::AlreadyReversed);
    }

    #[test]
    fn reverse_transposes_edges() {
        let ts = ts_of(corpus::counter2());
        let rev = ts.reverse().unwrap();
        let mut transposed: Vec<(u64, u64)> = edges_by_enumeration(&ts)
            .into_iter()
            .map(|(s, t)| (t, s))
            .collect();
        transposed.sort_unstable();
        assert_eq!(edges_by_enumeration(&rev), transposed);
    }

    #[test]
    fn cofactor_cones() {
        let ts = ts_of(corpus::toggle());
        let target = Cube::new([ts.prime(Var(0).pos())]);
        assert_eq!(ts.cofactor_trans(&target).clauses(&ts).len(), 2);
        assert!(ts.cofactor_trans(&Cube::empty()).is_empty());
    }

    /// Cone of c0' in the counter: c0' <-> !c0 only. Dropped definitions
    /// may read cone variables but never define one.
    #[test]
    fn counter2_cofactor_drops_unrelated_gates() {
        let ts = ts_of(corpus::counter2());
        let c0 = Var(1);
        let target = Cube::new([ts.prime(c0.pos())]);
        let cof = ts.cofactor_trans(&target);
        let kept = cof.clauses(&ts);
        assert_eq!(kept.len(), 2);
        let cone_vars: Vec<Var> = kept
            .iter()
            .flat_map(|c| c.iter().map(|l| l.var()))
            .filter(|v| !ts.is_current(*v))
            .collect();
        for d in ts
            .defs()
            .iter()
            .enumerate()
            .filter(|(i, _)| !cof.defs.contains(i))
        {
            assert!(!cone_vars.contains(&d.1.out));
        }
    }

    #[test]
    fn gate_property_gets_alias() {
        let ts = ts_of(corpus::counter2());
        let alias = ts.bad_alias().unwrap();
        assert_eq!(ts.prop_bad, Cube::new([alias.pos()]));
        assert_eq!(ts.state_var(alias), Some(StateVar::BadAlias));
        assert!(!ts.state_defs().is_empty());
        let s = ts.state_assignment(&[true, true], &[]);
        assert_eq!(s, vec![true, true, true]);
        let _ = Lit::new(alias, false);
    }

    #[test]
    fn constant_property() {
        let ts = ts_of(corpus::const_false());
        let alias = ts.bad_alias().unwrap();
        assert_eq!(ts.prop_bad, Cube::new([alias.pos()]));
        assert!(ts.property_clauses().contains(&Clause::new([alias.neg()])));
    }
}
