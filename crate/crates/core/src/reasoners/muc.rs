use super::ReasonerError;
use crate::lit::{Cube, Lit};
use crate::sat::Solver;

/// Deletion-based minimization of `core` under fixed `base` assumptions.
/// `base ∧ core` must be unsatisfiable. Literals are tried in decreasing
/// variable order and every successful deletion also drops whatever the
/// solver did not need. Returns a subset of `core` such that removing any
/// one literal makes the query satisfiable.
pub fn minimize_core(
    solver: &mut Solver,
    base: &[Lit],
    core: &[Lit],
    calls: &mut u64,
) -> Result<Vec<Lit>, ReasonerError> {
    let mut core: Vec<Lit> = core.to_vec();
    core.sort_unstable_by(|a, b| b.cmp(a));
    core.dedup();
    let mut k = 0;
    while k < core.len() {
        let mut assumptions = base.to_vec();
        assumptions.extend(
            core.iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &l)| l),
        );
        *calls += 1;
        if solver.is_sat(&assumptions)? {
            k += 1;
        } else {
            let failed = solver.failed();
            let removed = core[k];
            // Literals before `k` were found necessary; count the ones that
            // survive so the scan resumes right after them.
            k = core[..k].iter().filter(|l| failed.contains(l)).count();
            core.retain(|l| *l != removed && failed.contains(l));
        }
    }
    let mut assumptions = base.to_vec();
    assumptions.extend(&core);
    *calls += 1;
    if solver.is_sat(&assumptions)? {
        return Err(ReasonerError::Internal(
            "minimized core is satisfiable".into(),
        ));
    }
    Ok(core)
}

/// `muc(base ∧ c)|_c`: a minimal sub-cube of `c` that is still inconsistent
/// with the solver's clauses under `base`.
pub fn muc_restricted(
    solver: &mut Solver,
    base: &[Lit],
    c: &Cube,
    calls: &mut u64,
) -> Result<Cube, ReasonerError> {
    let mut assumptions = base.to_vec();
    assumptions.extend(c.iter());
    *calls += 1;
    if solver.is_sat(&assumptions)? {
        return Err(ReasonerError::Internal(
            "core requested for a satisfiable query".into(),
        ));
    }
    let seed: Vec<Lit> = c
        .iter()
        .copied()
        .filter(|l| solver.failed().contains(l))
        .collect();
    Ok(Cube::new(minimize_core(solver, base, &seed, calls)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lit::Var;
    use crate::sat::SolverOptions;
    use crate::ts::TransitionSystem;
    use std::sync::Arc;

    fn loaded(ts: &TransitionSystem) -> Solver {
        let mut s = Solver::new(SolverOptions::default());
        s.load(&ts.all_clauses()).unwrap();
        s
    }

    #[test]
    fn const0_singleton_is_minimal() {
        let ts = TransitionSystem::encode(Arc::new(corpus::const0()));
        let mut s = loaded(&ts);
        let c = Cube::new([ts.prime(Var(0).pos())]);
        let base: Vec<Lit> = ts.init.to_vec();
        let mut calls = 0;
        assert_eq!(muc_restricted(&mut s, &base, &c, &mut calls).unwrap(), c);
    }

    #[test]
    fn counter2_core_is_minimal() {
        let ts = TransitionSystem::encode(Arc::new(corpus::counter2()));
        let mut s = loaded(&ts);
        let (c1, c0) = (ts.latch_var(0), ts.latch_var(1));
        let c = Cube::new([ts.prime(c1.pos()), ts.prime(c0.pos())]);
        let base: Vec<Lit> = ts.init.to_vec();
        let mut calls = 0;
        let core = muc_restricted(&mut s, &base, &c, &mut calls).unwrap();
        assert!(core.is_subset_of(&c) && !core.is_empty());
        // From 00 the only successor is 01, so c1' alone is already blocked.
        assert_eq!(core, Cube::new([ts.prime(c1.pos())]));
        for &l in core.iter() {
            let weaker: Vec<Lit> = base
                .iter()
                .copied()
                .chain(core.iter().copied().filter(|&x| x != l))
                .collect();
            assert!(s.is_sat(&weaker).unwrap());
        }
    }

    #[test]
    fn satisfiable_query_is_an_error() {
        let ts = TransitionSystem::encode(Arc::new(corpus::toggle()));
        let mut s = loaded(&ts);
        let c = Cube::new([ts.prime(Var(0).pos())]);
        let mut calls = 0;
        assert!(matches!(
            muc_restricted(&mut s, &ts.init, &c, &mut calls),
            Err(ReasonerError::Internal(_))
        ));
    }

    #[test]
    fn minimizes_against_plain_clauses() {
        let mut s = Solver::new(SolverOptions::default());
        let v: Vec<Var> = (0..5).map(Var).collect();
        // a ∧ b → ⊥ and c ∧ d → ⊥
        s.add_clause(&[v[0].neg(), v[1].neg()]).unwrap();
        s.add_clause(&[v[2].neg(), v[3].neg()]).unwrap();
        let mut calls = 0;
        let all: Vec<Lit> = v.iter().map(|x| x.pos()).collect();
        let core = minimize_core(&mut s, &[], &all, &mut calls).unwrap();
        assert!(core == vec![v[3].pos(), v[2].pos()] || core == vec![v[1].pos(), v[0].pos()]);
    }
}
