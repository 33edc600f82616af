use super::muc::minimize_core;
use super::ReasonerError;
use crate::lit::{Cube, Lit};
use crate::sat::Solver;
use crate::ts::TransitionSystem;

/// If no state of `c` has a predecessor, a minimal sub-cube with the same
/// property. `solver` must hold `T` with every frame inactive.
pub fn detect_dead(
    solver: &mut Solver,
    ts: &TransitionSystem,
    c: &Cube,
    calls: &mut u64,
) -> Result<Option<Cube>, ReasonerError> {
    let target = ts.prime_cube(c);
    if solver.is_sat(&target)? {
        return Ok(None);
    }
    let seed: Vec<Lit> = target
        .iter()
        .copied()
        .filter(|l| solver.failed().contains(l))
        .collect();
    let core = minimize_core(solver, &[], &seed, calls)?;
    Ok(Some(Cube::new(core.into_iter().map(|l| ts.unprime(l)))))
}
