//! Explicit-state checks of the frame and layer invariants, for debugging on
//! small circuits.

use super::bseq::BSeq;
use super::frames::FrameSeq;
use crate::aiger::State;
use crate::ts::{Direction, TransitionSystem};

/// Largest number of latches plus inputs that is enumerated.
pub const MAX_BITS: usize = 14;

/// All states of a circuit with their valuations and latch successors.
struct Space {
    nl: usize,
    ni: usize,
    vals: Vec<Vec<bool>>,
    /// Index of the latch part of the successor of each state.
    succ: Vec<usize>,
}

impl Space {
    fn new(ts: &TransitionSystem) -> Space {
        let (nl, ni) = (ts.num_latches(), ts.num_inputs());
        let aig = ts.aig();
        let mut vals = Vec::with_capacity(1 << (nl + ni));
        let mut succ = Vec::with_capacity(1 << (nl + ni));
        for s in 0..1usize << (nl + ni) {
            let latches: Vec<bool> = (0..nl).map(|k| s >> k & 1 == 1).collect();
            let inputs: Vec<bool> = (0..ni).map(|k| s >> (nl + k) & 1 == 1).collect();
            let (next, _) = aig.simulate_step(&State(latches.clone()), &inputs);
            succ.push(
                next.iter()
                    .enumerate()
                    .map(|(k, &b)| usize::from(b) << k)
                    .sum(),
            );
            vals.push(ts.state_assignment(&latches, &inputs));
        }
        Space { nl, ni, vals, succ }
    }

    fn len(&self) -> usize {
        self.vals.len()
    }

    fn latch_part(&self, s: usize) -> usize {
        s & ((1 << self.nl) - 1)
    }

    /// States sharing the latch part `l`.
    fn with_latches(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.ni).map(move |i| l | i << self.nl)
    }
}

/// Checks, by enumerating every state, that each frame contains the image
/// of the frame below it, that frames above 0 avoid the bad states, and
/// that every stored cube steps into the layer below it. Images are taken
/// along the system's own direction. Returns `Ok(false)` when the circuit
/// is too large to enumerate.
pub fn check(ts: &TransitionSystem, fs: &FrameSeq, bs: &BSeq) -> Result<bool, String> {
    if ts.num_latches() + ts.num_inputs() > MAX_BITS {
        return Ok(false);
    }
    let sp = Space::new(ts);
    let forward = ts.direction == Direction::Forward;
    let member: Vec<Vec<bool>> = (0..=fs.top())
        .map(|j| {
            let view = fs.view(j);
            sp.vals.iter().map(|v| view.contains(v)).collect()
        })
        .collect();

    // Forward: t is an image of s iff t's latches are succ(s). Reversed:
    // t is an image of s iff s's latches are succ(t).
    let has_image_in = |s: usize, set: &dyn Fn(usize) -> bool| -> bool {
        if forward {
            sp.with_latches(sp.succ[s]).any(set)
        } else {
            (0..sp.len()).any(|t| sp.succ[t] == sp.latch_part(s) && set(t))
        }
    };

    for j in 0..fs.top() {
        for t in 0..sp.len() {
            if member[j + 1][t] {
                continue;
            }
            // t must not be an image of any state of F_j.
            let from_frame = if forward {
                (0..sp.len()).any(|s| member[j][s] && sp.succ[s] == sp.latch_part(t))
            } else {
                sp.with_latches(sp.succ[t]).any(|s| member[j][s])
            };
            if from_frame {
                return Err(format!(
                    "frame {} misses an image of frame {j}: {:?}",
                    j + 1,
                    sp.vals[t]
                ));
            }
        }
    }
    for (j, m) in member.iter().enumerate().skip(1) {
        if let Some(s) = (0..sp.len()).find(|&s| m[s] && ts.prop_bad.eval(&sp.vals[s])) {
            return Err(format!("frame {j} contains bad state {:?}", sp.vals[s]));
        }
    }
    for i in 1..bs.num_layers() {
        let below: Vec<bool> = (0..sp.len())
            .map(|s| {
                bs.layer(i - 1)
                    .iter()
                    .any(|&id| bs.node(id).cube.eval(&sp.vals[s]))
            })
            .collect();
        for &id in bs.layer(i) {
            let cube = &bs.node(id).cube;
            for s in (0..sp.len()).filter(|&s| cube.eval(&sp.vals[s])) {
                if !has_image_in(s, &|t| below[t]) {
                    return Err(format!(
                        "layer {i} cube {cube:?} has state {:?} outside the preimage",
                        sp.vals[s]
                    ));
                }
            }
        }
    }
    Ok(true)
}
