//! Safety certificates: a prefix of the frame sequence whose union is an
//! inductive invariant.
//!
//! Text format, one item per line:
//!
//! ```text
//! carmc-certificate 1
//! direction forward|backward
//! latches <L>
//! inputs <I>
//! alias 0|1
//! v <id> latch <k>        one line per state variable
//! v <id> input <k>
//! v <id> bad
//! index <j>
//! frame <m>               followed by its clauses, for m = 0..=j
//! <lit> ... 0
//! inf                     followed by the clauses shared by frames >= 1
//! <lit> ... 0
//! end
//! ```
//!
//! Literals are signed 1-based state variable ids as listed in the header.
//! Frame 0 holds the initial states as unit clauses. The invariant is the
//! union of frames `0..j`, with the `inf` clauses conjoined to every frame
//! above 0. For a backward certificate the invariant is over the reversed
//! system: it contains the bad states, is closed under predecessors and
//! excludes the initial states.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::aiger::Aig;
use crate::lit::{Clause, Lit, Var};
use crate::sat::{SatError, Solver, SolverOptions};
use crate::ts::{Direction, StateVar, TransitionSystem};

pub const FORMAT_TAG: &str = "carmc-certificate 1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub direction: Direction,
    pub num_latches: usize,
    pub num_inputs: usize,
    pub alias: bool,
    pub index: usize,
    /// Frames `0..=index`; frame 0 is the initial cube as unit clauses.
    pub frames: Vec<Vec<Clause>>,
    pub inf: Vec<Clause>,
}

/// Which of the three invariant conditions failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertCheck {
    /// The initial states are contained.
    Initiation,
    /// The union is closed under the transition relation.
    Consecution,
    /// The union contains no bad state.
    Safety,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("malformed certificate at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("certificate does not match the circuit: {0}")]
    Mismatch(String),
    #[error("check failed: {0:?}")]
    Failed(CertCheck),
    #[error(transparent)]
    Sat(#[from] SatError),
}

impl Certificate {
    pub fn num_state_vars(&self) -> usize {
        self.num_latches + self.num_inputs + usize::from(self.alias)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FORMAT_TAG}");
        let _ = writeln!(out, "direction {}", self.direction.name());
        let _ = writeln!(out, "latches {}", self.num_latches);
        let _ = writeln!(out, "inputs {}", self.num_inputs);
        let _ = writeln!(out, "alias {}", u8::from(self.alias));
        for k in 0..self.num_latches {
            let _ = writeln!(out, "v {} latch {k}", k + 1);
        }
        for k in 0..self.num_inputs {
            let _ = writeln!(out, "v {} input {k}", self.num_latches + k + 1);
        }
        if self.alias {
            let _ = writeln!(out, "v {} bad", self.num_state_vars());
        }
        let _ = writeln!(out, "index {}", self.index);
        let clause_line = |out: &mut String, c: &Clause| {
            for l in c.iter() {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        };
        for (m, frame) in self.frames.iter().enumerate() {
            let _ = writeln!(out, "frame {m}");
            for c in frame {
                clause_line(&mut out, c);
            }
        }
        out.push_str("inf\n");
        for c in &self.inf {
            clause_line(&mut out, c);
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertificateError> {
        Parser::new(text).certificate()
    }
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text
                .lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty())
                .collect(),
            pos: 0,
        }
    }

    fn line_no(&self) -> usize {
        self.lines
            .get(self.pos)
            .or(self.lines.last())
            .map_or(1, |(n, _)| *n)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CertificateError> {
        Err(CertificateError::Malformed {
            line: self.line_no(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|(_, l)| *l)
    }

    fn next_line(&mut self) -> Result<&'a str, CertificateError> {
        match self.peek() {
            Some(l) => {
                self.pos += 1;
                Ok(l)
            }
            None => self.err("unexpected end of certificate"),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str, CertificateError> {
        let line = self.next_line()?;
        match line.strip_prefix(key).and_then(|r| r.strip_prefix(' ')) {
            Some(rest) => Ok(rest.trim()),
            None => {
                self.pos -= 1;
                self.err(format!("expected `{key}`"))
            }
        }
    }

    fn number(&mut self, key: &str) -> Result<usize, CertificateError> {
        let v = self.keyed(key)?;
        match v.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos -= 1;
                self.err(format!("`{key}` needs a number"))
            }
        }
    }

    fn clauses(&mut self, n: usize) -> Result<Vec<Clause>, CertificateError> {
        let mut out = Vec::new();
        while let Some(line) = self.peek() {
            if !line.starts_with(|c: char| c == '-' || c.is_ascii_digit()) {
                break;
            }
            let mut lits = Vec::new();
            let mut terminated = false;
            for tok in line.split_whitespace() {
                let Ok(v) = tok.parse::<i64>() else {
                    return self.err(format!("bad literal {tok:?}"));
                };
                if terminated {
                    return self.err("literal after terminating 0");
                }
                match Lit::from_dimacs(v) {
                    None => terminated = true,
                    Some(l) if l.var().index() < n => lits.push(l),
                    Some(_) => return self.err(format!("literal {v} out of range")),
                }
            }
            if !terminated {
                return self.err("clause without terminating 0");
            }
            match Clause::try_new(lits) {
                Some(c) => out.push(c),
                None => return self.err("tautological clause"),
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn certificate(mut self) -> Result<Certificate, CertificateError> {
        if self.next_line()? != FORMAT_TAG {
            self.pos -= 1;
            return self.err(format!("expected `{FORMAT_TAG}`"));
        }
        let direction = match self.keyed("direction")? {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            _ => {
                self.pos -= 1;
                return self.err("unknown direction");
            }
        };
        let num_latches = self.number("latches")?;
        let num_inputs = self.number("inputs")?;
        let alias = match self.number("alias")? {
            0 => false,
            1 => true,
            _ => {
                self.pos -= 1;
                return self.err("`alias` is 0 or 1");
            }
        };
        let n = num_latches + num_inputs + usize::from(alias);
        for id in 1..=n {
            let expected = if id <= num_latches {
                format!("{id} latch {}", id - 1)
            } else if id <= num_latches + num_inputs {
                format!("{id} input {}", id - num_latches - 1)
            } else {
                format!("{id} bad")
            };
            if self.keyed("v")? != expected {
                self.pos -= 1;
                return self.err(format!("expected `v {expected}`"));
            }
        }
        let index = self.number("index")?;
        if index == 0 {
            self.pos -= 1;
            return self.err("index must be at least 1");
        }
        let mut frames = Vec::new();
        for m in 0..=index {
            if self.number("frame")? != m {
                self.pos -= 1;
                return self.err(format!("expected frame {m}"));
            }
            frames.push(self.clauses(n)?);
        }
        if self.next_line()? != "inf" {
            self.pos -= 1;
            return self.err("expected `inf`");
        }
        let inf = self.clauses(n)?;
        if self.next_line()? != "end" {
            self.pos -= 1;
            return self.err("expected `end`");
        }
        if self.peek().is_some() {
            return self.err("content after `end`");
        }
        Ok(Certificate {
            direction,
            num_latches,
            num_inputs,
            alias,
            index,
            frames,
            inf,
        })
    }
}

/// Encodes "at least one clause of `clauses` is false", switched on by the
/// returned selector. `map` relocates literals (e.g. to primed copies).
pub(crate) fn encode_negation(
    solver: &mut Solver,
    clauses: &[Clause],
    map: impl Fn(Lit) -> Lit,
) -> Result<Var, SatError> {
    let sel = solver.new_var()?;
    let mut some_false = vec![sel.neg()];
    for c in clauses {
        let y = solver.new_var()?;
        for &l in c.iter() {
            solver.add_clause(&[y.neg(), !map(l)])?;
        }
        some_false.push(y.pos());
    }
    solver.add_clause(&some_false)?;
    Ok(sel)
}

/// A selector that, when true, forces some member CNF to hold.
fn encode_union(solver: &mut Solver, members: &[Vec<Clause>]) -> Result<Var, SatError> {
    let act = solver.new_var()?;
    let mut any = vec![act.neg()];
    for frame in members {
        let sel = solver.new_var()?;
        for c in frame {
            let mut lits = vec![sel.neg()];
            lits.extend(c.iter());
            solver.add_clause(&lits)?;
        }
        any.push(sel.pos());
    }
    solver.add_clause(&any)?;
    Ok(act)
}

/// Independently checks a certificate against the circuit with fresh
/// solvers: initiation, consecution and safety of the union of frames
/// `0..index`.
pub fn check_certificate(aig: &Aig, cert: &Certificate) -> Result<(), CertificateError> {
    let forward = TransitionSystem::encode(Arc::new(aig.clone()));
    let ts = match cert.direction {
        Direction::Forward => forward,
        Direction::Backward => forward.reverse().expect("fresh system is forward"),
    };
    let mismatch = |m: &str| Err(CertificateError::Mismatch(m.into()));
    if cert.num_latches != ts.num_latches() || cert.num_inputs != ts.num_inputs() {
        return mismatch("latch or input count differs");
    }
    if cert.alias != ts.state_vars().contains(&StateVar::BadAlias) {
        return mismatch("bad-state alias presence differs");
    }
    if cert.index == 0 || cert.frames.len() != cert.index + 1 {
        return mismatch("frame list does not match the index");
    }

    let j = cert.index;
    let members: Vec<Vec<Clause>> = (0..j)
        .map(|m| {
            let mut c = cert.frames[m].clone();
            if m > 0 {
                c.extend(cert.inf.iter().cloned());
            }
            c
        })
        .collect();

    // Initiation and safety are statements about single states. They get a
    // solver without `T`: in a reversed system `T` ties the current state to
    // a predecessor and would hide states that have none.
    let mut states = Solver::new(SolverOptions::default());
    states.ensure_vars(ts.num_vars())?;
    for i in ts.state_defs() {
        states.load(&ts.defs()[i].clauses())?;
    }
    let in_s = encode_union(&mut states, &members)?;
    let mut initiation: Vec<Lit> = ts.init.to_vec();
    for frame in &members {
        initiation.push(encode_negation(&mut states, frame, |l| l)?.pos());
    }
    if states.is_sat(&initiation)? {
        return Err(CertificateError::Failed(CertCheck::Initiation));
    }
    let mut safety = vec![in_s.pos()];
    safety.extend(ts.prop_bad.iter());
    if states.is_sat(&safety)? {
        return Err(CertificateError::Failed(CertCheck::Safety));
    }

    let mut steps = Solver::new(SolverOptions::default());
    steps.ensure_vars(ts.num_vars())?;
    steps.load(&ts.all_clauses())?;
    let in_s = encode_union(&mut steps, &members)?;
    let mut consecution = vec![in_s.pos()];
    for frame in &members {
        consecution.push(encode_negation(&mut steps, frame, |l| ts.prime(l))?.pos());
    }
    if steps.is_sat(&consecution)? {
        return Err(CertificateError::Failed(CertCheck::Consecution));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn const0_cert() -> Certificate {
        let l = Var(0);
        Certificate {
            direction: Direction::Forward,
            num_latches: 1,
            num_inputs: 0,
            alias: false,
            index: 1,
            frames: vec![vec![Clause::new([l.neg()])], vec![Clause::new([l.neg()])]],
            inf: vec![],
        }
    }

    #[test]
    fn const0_certificate_checks() {
        assert_eq!(check_certificate(&corpus::const0(), &const0_cert()), Ok(()));
    }

    #[test]
    fn text_round_trip() {
        let cert = const0_cert();
        let text = cert.to_text();
        assert_eq!(
            text,
            "carmc-certificate 1\ndirection forward\nlatches 1\ninputs 0\nalias 0\nv 1 latch 0\nindex 1\nframe 0\n-1 0\nframe 1\n-1 0\ninf\nend\n"
        );
        assert_eq!(Certificate::parse(&text), Ok(cert));
    }

    #[test]
    fn weakened_frame_fails_safety() {
        // On the toggle, {¬L} ∪ true contains the bad state.
        let mut cert = const0_cert();
        cert.index = 2;
        cert.frames = vec![vec![Clause::new([Var(0).neg()])], vec![], vec![]];
        assert_eq!(
            check_certificate(&corpus::toggle(), &cert),
            Err(CertificateError::Failed(CertCheck::Safety))
        );
    }

    #[test]
    fn non_inductive_set_fails_consecution() {
        // {¬L} alone is not closed under the toggle's transition.
        assert_eq!(
            check_certificate(&corpus::toggle(), &const0_cert()),
            Err(CertificateError::Failed(CertCheck::Consecution))
        );
    }

    #[test]
    fn missing_initial_state_fails_initiation() {
        let mut cert = const0_cert();
        cert.frames[0] = vec![Clause::new([Var(0).pos()])];
        assert_eq!(
            check_certificate(&corpus::const0(), &cert),
            Err(CertificateError::Failed(CertCheck::Initiation))
        );
    }

    #[test]
    fn backward_safety_sees_states_without_predecessors() {
        // next(L) = 1, bad = ¬L: the initial state is bad and has no
        // predecessor. A reversed "invariant" {¬L} must not pass.
        let aig =
            crate::aiger::parse(b"aag 1 0 1 1 0\n2 1\n3\n", crate::aiger::Format::Ascii).unwrap();
        let mut cert = const0_cert();
        cert.direction = Direction::Backward;
        assert_eq!(
            check_certificate(&aig, &cert),
            Err(CertificateError::Failed(CertCheck::Safety))
        );
    }

    #[test]
    fn empty_frame_list_is_malformed() {
        let text = "carmc-certificate 1\ndirection forward\nlatches 1\ninputs 0\nalias 0\nv 1 latch 0\nindex 1\ninf\nend\n";
        assert!(matches!(
            Certificate::parse(text),
            Err(CertificateError::Malformed { .. })
        ));
        let mut cert = const0_cert();
        cert.frames.clear();
        assert!(matches!(
            check_certificate(&corpus::const0(), &cert),
            Err(CertificateError::Mismatch(_))
        ));
    }

    #[test]
    fn parse_errors_name_lines() {
        let bad = "carmc-certificate 1\ndirection sideways\n";
        assert_eq!(
            Certificate::parse(bad),
            Err(CertificateError::Malformed {
                line: 2,
                msg: "unknown direction".into()
            })
        );
        let bad = const0_cert()
            .to_text()
            .replace("-1 0\nframe 1", "-7 0\nframe 1");
        assert!(matches!(
            Certificate::parse(&bad),
            Err(CertificateError::Malformed { line: 9, .. })
        ));
    }
}
