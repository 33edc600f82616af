use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use super::engine::{Engine, StepResult};
use super::{EngineError, Options, Report, Samples, Verdict};
use crate::aiger::Aig;
use crate::limits::UnknownReason;
use crate::ts::{Direction, TransitionSystem};

struct Lane {
    engine: Engine,
    cancel: Arc<AtomicBool>,
    /// Set once the engine has given up without a verdict.
    gave_up: Option<UnknownReason>,
}

impl Lane {
    fn new(ts: TransitionSystem, opts: &Options) -> Result<Lane, EngineError> {
        let cancel = Arc::new(AtomicBool::new(false));
        let limits = opts.limits.clone().with_cancel(Arc::clone(&cancel));
        Ok(Lane {
            engine: Engine::new(ts, opts, limits)?,
            cancel,
            gave_up: None,
        })
    }

    fn active(&self) -> bool {
        self.gave_up.is_none()
    }

    fn step(&mut self) -> Result<Option<Verdict>, EngineError> {
        Ok(match self.engine.step()? {
            StepResult::Continue => None,
            StepResult::Done(v) => Some(v),
        })
    }
}

type StepOut = Option<Result<Option<Verdict>, EngineError>>;

#[cfg(feature = "parallel")]
fn both(fwd: &mut Lane, bwd: &mut Lane) -> (StepOut, StepOut) {
    let fwd_active = fwd.active();
    let bwd_active = bwd.active();
    let bwd_cancel = Arc::clone(&bwd.cancel);
    rayon::join(
        || {
            fwd_active.then(|| {
                let r = fwd.step();
                if matches!(r, Ok(Some(ref v)) if v.is_conclusive()) {
                    bwd_cancel.store(true, Ordering::Relaxed);
                }
                r
            })
        },
        || bwd_active.then(|| bwd.step()),
    )
}

#[cfg(not(feature = "parallel"))]
fn both(fwd: &mut Lane, bwd: &mut Lane) -> (StepOut, StepOut) {
    let f = fwd.active().then(|| fwd.step());
    // A conclusive forward round discards the backward round anyway.
    if matches!(f, Some(Ok(Some(ref v))) if v.is_conclusive()) {
        bwd.cancel.store(true, Ordering::Relaxed);
        return (f, None);
    }
    let b = bwd.active().then(|| bwd.step());
    (f, b)
}

fn finish(
    verdict: Verdict,
    winner: Option<Direction>,
    lanes: Vec<&mut Lane>,
    stats: Vec<super::IterationStats>,
    semantic_checks: usize,
) -> Report {
    let mut samples = Samples::default();
    for lane in lanes {
        samples.append(lane.engine.take_samples());
    }
    Report {
        verdict,
        winner,
        stats,
        samples,
        semantic_checks,
    }
}

/// Runs the forward and backward engines round by round, concurrently when
/// the `parallel` feature is on. The outcome does not depend on timing: a
/// round in which forward concludes discards backward's round (and its
/// samples), and forward wins ties.
pub fn run_portfolio(aig: Arc<Aig>, opts: &Options) -> Result<Report, EngineError> {
    let ts = TransitionSystem::encode(aig);
    let mut fwd = Lane::new(ts.clone(), opts)?;
    let mut bwd = Lane::new(ts.reverse().expect("fresh system is forward"), opts)?;
    let mut stats = Vec::new();
    let mut semantic_checks = 0;

    loop {
        let fwd_seen = fwd.engine.history().len();
        let bwd_seen = bwd.engine.history().len();
        let fwd_checks = fwd.engine.semantic_checks();
        let bwd_checks = bwd.engine.semantic_checks();
        let (f, b) = both(&mut fwd, &mut bwd);
        let f = f.transpose()?.flatten();

        stats.extend_from_slice(&fwd.engine.history()[fwd_seen..]);
        semantic_checks += fwd.engine.semantic_checks() - fwd_checks;
        match f {
            Some(v) if v.is_conclusive() => {
                return Ok(finish(
                    v,
                    Some(Direction::Forward),
                    vec![&mut fwd],
                    stats,
                    semantic_checks,
                ));
            }
            Some(Verdict::Unknown(r)) => fwd.gave_up = Some(r),
            _ => {}
        }

        let b = b.transpose()?.flatten();
        stats.extend_from_slice(&bwd.engine.history()[bwd_seen..]);
        semantic_checks += bwd.engine.semantic_checks() - bwd_checks;
        match b {
            Some(v) if v.is_conclusive() => {
                return Ok(finish(
                    v,
                    Some(Direction::Backward),
                    vec![&mut fwd, &mut bwd],
                    stats,
                    semantic_checks,
                ));
            }
            Some(Verdict::Unknown(r)) => bwd.gave_up = Some(r),
            _ => {}
        }

        if let (Some(rf), Some(rb)) = (fwd.gave_up, bwd.gave_up) {
            // Report the forward reason unless it only stopped on its own
            // step budget while the other hit a resource limit.
            let reason = if rf == UnknownReason::StepLimit {
                rb
            } else {
                rf
            };
            return Ok(finish(
                Verdict::Unknown(reason),
                None,
                vec![&mut fwd, &mut bwd],
                stats,
                semantic_checks,
            ));
        }
    }
}
