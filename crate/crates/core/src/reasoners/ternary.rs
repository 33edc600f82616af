use crate::lit::Lit;
use crate::ts::{DefKind, TransitionSystem};

use super::FrameView;

/// A ternary value: definitely false, definitely true, or unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tv {
    Zero,
    One,
    X,
}

impl Tv {
    pub fn from_bool(b: bool) -> Tv {
        if b {
            Tv::One
        } else {
            Tv::Zero
        }
    }

    fn negate(self) -> Tv {
        match self {
            Tv::Zero => Tv::One,
            Tv::One => Tv::Zero,
            Tv::X => Tv::X,
        }
    }

    fn and(self, other: Tv) -> Tv {
        match (self, other) {
            (Tv::Zero, _) | (_, Tv::Zero) => Tv::Zero,
            (Tv::One, Tv::One) => Tv::One,
            _ => Tv::X,
        }
    }
}

#[inline]
pub fn lit_tv(vals: &[Tv], l: Lit) -> Tv {
    let v = vals[l.var().index()];
    if l.is_negated() {
        v.negate()
    } else {
        v
    }
}

/// Re-evaluates the given definitions, which must be in topological order.
pub fn simulate(ts: &TransitionSystem, defs: &[usize], vals: &mut [Tv]) {
    for &i in defs {
        let d = &ts.defs()[i];
        vals[d.out.index()] = match d.kind {
            DefKind::And(a, b) => lit_tv(vals, a).and(lit_tv(vals, b)),
            DefKind::Equiv(l) => lit_tv(vals, l),
            DefKind::Const(c) => Tv::from_bool(c),
        };
    }
}

/// Whether the frame definitely contains every state the ternary valuation
/// stands for.
pub fn frame_holds(frame: &FrameView, vals: &[Tv]) -> bool {
    match frame {
        FrameView::Init(cube) => cube.iter().all(|&l| lit_tv(vals, l) == Tv::One),
        FrameView::Clauses { frame, inf } => frame
            .iter()
            .chain(inf.iter())
            .all(|c| c.iter().any(|&l| lit_tv(vals, l) == Tv::One)),
    }
}
