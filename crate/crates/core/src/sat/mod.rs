//! Incremental satisfiability under assumptions.
//!
//! [`Solver`] wraps a pluggable [`Backend`] and adds the things every caller
//! wants: resource limits, call counters, optional model and core
//! self-checks, and DIMACS dumps of each query for offline replay.

mod cdcl;
mod dpll;

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

pub use cdcl::Cdcl;
pub use dpll::Dpll;

use crate::limits::{Limits, UnknownReason};
use crate::lit::{Clause, Cube, Lit, Var};

/// Largest number of variables a solver accepts.
pub const MAX_VARS: usize = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Sat,
    Unsat,
    Interrupted,
}

pub trait Backend: Send {
    fn ensure_vars(&mut self, n: usize);
    fn add_clause(&mut self, lits: &[Lit]);
    fn solve(&mut self, assumptions: &[Lit], stop: &mut dyn FnMut() -> bool) -> Answer;
    fn model_value(&self, v: Var) -> bool;
    /// After an unsat answer, a subset of the assumptions that is already
    /// inconsistent with the clauses.
    fn failed(&self) -> &[Lit];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackendKind {
    #[default]
    Cdcl,
    Dpll,
}

#[derive(Clone, Debug, Default)]
pub struct SolverOptions {
    pub backend: BackendKind,
    pub seed: u64,
    /// Evaluate every loaded clause under each returned model.
    pub check_models: bool,
    /// Re-solve with the failed assumptions alone on every 16th unsat answer.
    pub check_cores: bool,
    /// Write each query as a DIMACS file into this directory.
    pub dump_dir: Option<PathBuf>,
    pub limits: Limits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("variable {0} exceeds the solver's variable limit")]
    VarOverflow(usize),
    #[error("solve interrupted: {0}")]
    Interrupted(UnknownReason),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub solves: u64,
    pub sat: u64,
    pub unsat: u64,
}

pub struct Solver {
    backend: Box<dyn Backend>,
    num_vars: usize,
    log: Option<Vec<Vec<Lit>>>,
    opts: SolverOptions,
    stats: SolverStats,
    failed: Vec<Lit>,
    model_valid: bool,
}

impl Solver {
    pub fn new(opts: SolverOptions) -> Self {
        let backend: Box<dyn Backend> = match opts.backend {
            BackendKind::Cdcl => Box::new(Cdcl::new(opts.seed)),
            BackendKind::Dpll => Box::new(Dpll::new()),
        };
        let keep_log = opts.check_models || opts.check_cores || opts.dump_dir.is_some();
        Solver {
            backend,
            num_vars: 0,
            log: keep_log.then(Vec::new),
            opts,
            stats: SolverStats::default(),
            failed: Vec::new(),
            model_valid: false,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn limits(&self) -> &Limits {
        &self.opts.limits
    }

    pub fn ensure_vars(&mut self, n: usize) -> Result<(), SatError> {
        if n > MAX_VARS {
            return Err(SatError::VarOverflow(n - 1));
        }
        if n > self.num_vars {
            self.num_vars = n;
            self.backend.ensure_vars(n);
        }
        Ok(())
    }

    /// A variable not used so far.
    pub fn new_var(&mut self) -> Result<Var, SatError> {
        let v = self.num_vars;
        self.ensure_vars(v + 1)?;
        Ok(Var(v as u32))
    }

    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<(), SatError> {
        if let Some(max) = lits.iter().map(|l| l.var().index()).max() {
            self.ensure_vars(max + 1)?;
        }
        if let Some(log) = &mut self.log {
            log.push(lits.to_vec());
        }
        self.backend.add_clause(lits);
        Ok(())
    }

    pub fn load<'a>(
        &mut self,
        clauses: impl IntoIterator<Item = &'a Clause>,
    ) -> Result<(), SatError> {
        for c in clauses {
            self.add_clause(c)?;
        }
        Ok(())
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<SatStatus, SatError> {
        if let Some(max) = assumptions.iter().map(|l| l.var().index()).max() {
            self.ensure_vars(max + 1)?;
        }
        if let Some(reason) = self.opts.limits.exceeded() {
            return Err(SatError::Interrupted(reason));
        }
        self.dump(assumptions);
        self.stats.solves += 1;
        let limits = self.opts.limits.clone();
        let mut stop = || limits.exceeded().is_some();
        let answer = self.backend.solve(assumptions, &mut stop);
        self.failed.clear();
        self.model_valid = false;
        match answer {
            Answer::Interrupted => Err(SatError::Interrupted(
                self.opts
                    .limits
                    .exceeded()
                    .unwrap_or(UnknownReason::Cancelled),
            )),
            Answer::Sat => {
                self.stats.sat += 1;
                self.model_valid = true;
                if self.opts.check_models {
                    self.check_model(assumptions);
                }
                Ok(SatStatus::Sat)
            }
            Answer::Unsat => {
                self.stats.unsat += 1;
                self.failed = self.backend.failed().to_vec();
                debug_assert!(self.failed.iter().all(|l| assumptions.contains(l)));
                if self.opts.check_cores && self.stats.unsat.is_multiple_of(16) {
                    self.check_core()?;
                }
                Ok(SatStatus::Unsat)
            }
        }
    }

    pub fn is_sat(&mut self, assumptions: &[Lit]) -> Result<bool, SatError> {
        Ok(self.solve(assumptions)? == SatStatus::Sat)
    }

    /// Model value of a literal after a satisfiable solve.
    pub fn value(&self, l: Lit) -> bool {
        debug_assert!(self.model_valid, "no model available");
        l.eval(self.backend.model_value(l.var()))
    }

    pub fn var_value(&self, v: Var) -> bool {
        self.value(v.pos())
    }

    /// The model restricted to the given variables, as a cube.
    pub fn model_cube(&self, vars: impl IntoIterator<Item = Var>) -> Cube {
        Cube::new(vars.into_iter().map(|v| v.lit(self.var_value(v))))
    }

    /// Failed assumptions of the last unsat solve.
    pub fn failed(&self) -> &[Lit] {
        &self.failed
    }

    fn check_model(&self, assumptions: &[Lit]) {
        for &a in assumptions {
            assert!(self.value(a), "model violates assumption {a}");
        }
        if let Some(log) = &self.log {
            for c in log {
                assert!(
                    c.iter().any(|&l| self.value(l)),
                    "model violates clause {:?}",
                    c.iter().map(|l| l.to_dimacs()).collect::<Vec<_>>()
                );
            }
        }
    }

    fn check_core(&mut self) -> Result<(), SatError> {
        let core = self.failed.clone();
        let limits = self.opts.limits.clone();
        let mut stop = || limits.exceeded().is_some();
        match self.backend.solve(&core, &mut stop) {
            Answer::Sat => panic!("failed assumptions {core:?} are satisfiable on their own"),
            Answer::Interrupted => {
                return Err(SatError::Interrupted(
                    self.opts
                        .limits
                        .exceeded()
                        .unwrap_or(UnknownReason::Cancelled),
                ))
            }
            Answer::Unsat => {}
        }
        self.failed = core;
        Ok(())
    }

    fn dump(&self, assumptions: &[Lit]) {
        let (Some(dir), Some(log)) = (&self.opts.dump_dir, &self.log) else {
            return;
        };
        let mut text = format!(
            "p cnf {} {}\n",
            self.num_vars,
            log.len() + assumptions.len()
        );
        let _ = writeln!(
            text,
            "c assumptions {}",
            assumptions
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
        let units = assumptions.iter().map(std::slice::from_ref);
        for c in log.iter().map(Vec::as_slice).chain(units) {
            for l in c {
                let _ = write!(text, "{l} ");
            }
            text.push_str("0\n");
        }
        let path = dir.join(format!("query_{:08}.cnf", self.stats.solves));
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("c cannot write {}: {e}", path.display());
        }
    }
}
