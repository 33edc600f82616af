use super::frames::FrameSeq;
use crate::artifacts::certificate::encode_negation;
use crate::limits::Limits;
use crate::sat::{SatError, Solver, SolverOptions};
use crate::ts::TransitionSystem;

/// The least `j` in `1..=top` with `F_j ⊆ F_0 ∪ .. ∪ F_{j-1}`, decided with
/// a fresh solver that knows only how the alias follows from the state.
pub fn invariant_found(
    ts: &TransitionSystem,
    fs: &FrameSeq,
    limits: &Limits,
) -> Result<Option<usize>, SatError> {
    let mut solver = Solver::new(SolverOptions {
        limits: limits.clone(),
        ..SolverOptions::default()
    });
    solver.ensure_vars(ts.num_vars())?;
    for i in ts.state_defs() {
        solver.load(&ts.defs()[i].clauses())?;
    }
    let mut holds = Vec::new();
    let mut fails = Vec::new();
    for k in 0..=fs.top() {
        let clauses = fs.flat(k);
        let a = solver.new_var()?;
        for c in &clauses {
            let mut lits = vec![a.neg()];
            lits.extend(c.iter());
            solver.add_clause(&lits)?;
        }
        holds.push(a.pos());
        fails.push(encode_negation(&mut solver, &clauses, |l| l)?.pos());
    }
    for j in 1..=fs.top() {
        let mut assumptions = vec![holds[j]];
        assumptions.extend(&fails[..j]);
        if !solver.is_sat(&assumptions)? {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use std::sync::Arc;

    fn ts(aig: crate::aiger::Aig) -> TransitionSystem {
        TransitionSystem::encode(Arc::new(aig))
    }

    #[test]
    fn const0_contained_at_one() {
        let ts = ts(corpus::const0());
        let mut fs = FrameSeq::new(ts.init.clone());
        fs.push(ts.prop_bad.negate());
        assert_eq!(invariant_found(&ts, &fs, &Limits::none()), Ok(Some(1)));
    }

    #[test]
    fn true_frame_needs_every_state() {
        // bad = false: F_1 = P = true. Containment in F_0 = {¬L} fails
        // because L = 1 is a state outside F_0.
        let ts = ts(
            crate::aiger::parse(b"aag 1 0 1 1 0\n2 3\n0\n", crate::aiger::Format::Ascii).unwrap(),
        );
        let mut fs = FrameSeq::new(ts.init.clone());
        fs.push(ts.prop_bad.negate());
        assert_eq!(invariant_found(&ts, &fs, &Limits::none()), Ok(None));
        // F_2 = true is contained in F_0 ∪ F_1 = true.
        fs.push(ts.prop_bad.negate());
        assert_eq!(invariant_found(&ts, &fs, &Limits::none()), Ok(Some(2)));
    }

    #[test]
    fn no_containment() {
        let ts = ts(corpus::counter2());
        let mut fs = FrameSeq::new(ts.init.clone());
        fs.push(ts.prop_bad.negate());
        assert_eq!(invariant_found(&ts, &fs, &Limits::none()), Ok(None));
    }
}
