use crate::lit::{Clause, Cube};
use crate::reasoners::FrameView;

/// Over-approximating frames `F_0..F_m` plus the clauses `F∞` shared by
/// every frame above 0.
#[derive(Clone, Debug)]
pub struct FrameSeq {
    init: Cube,
    /// `frames[0]` is unused; `frames[j]` holds the clauses of `F_j`.
    frames: Vec<Vec<Clause>>,
    inf: Vec<Clause>,
}

impl FrameSeq {
    pub fn new(init: Cube) -> Self {
        FrameSeq {
            init,
            frames: vec![Vec::new()],
            inf: Vec::new(),
        }
    }

    /// Index of the last frame.
    pub fn top(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn init(&self) -> &Cube {
        &self.init
    }

    pub fn push(&mut self, first: Clause) {
        self.frames.push(vec![first]);
    }

    /// Clauses of `F_j` for `j >= 1`, without `F∞`.
    pub fn clauses(&self, j: usize) -> &[Clause] {
        assert!(j >= 1, "frame 0 is a cube");
        &self.frames[j]
    }

    pub fn inf(&self) -> &[Clause] {
        &self.inf
    }

    pub fn view(&self, j: usize) -> FrameView<'_> {
        if j == 0 {
            FrameView::Init(&self.init)
        } else {
            FrameView::Clauses {
                frame: &self.frames[j],
                inf: &self.inf,
            }
        }
    }

    /// `F_j` as a flat clause list; the initial cube becomes unit clauses.
    pub fn flat(&self, j: usize) -> Vec<Clause> {
        if j == 0 {
            self.init.iter().map(|&l| Clause::new([l])).collect()
        } else {
            self.frames[j].iter().chain(&self.inf).cloned().collect()
        }
    }

    /// True if some clause of `F_j` (or `F∞`) already implies `c`.
    pub fn implies(&self, j: usize, c: &Clause) -> bool {
        self.frames[j]
            .iter()
            .chain(&self.inf)
            .any(|d| d.subsumes(c))
    }

    pub fn implies_inf(&self, c: &Clause) -> bool {
        self.inf.iter().any(|d| d.subsumes(c))
    }

    pub fn add(&mut self, j: usize, c: Clause) {
        assert!(j >= 1);
        self.frames[j].push(c);
    }

    pub fn add_inf(&mut self, c: Clause) {
        self.inf.push(c);
    }

    /// Per-frame clause counts for frames `1..=top`.
    pub fn sizes(&self) -> Vec<usize> {
        self.frames[1..].iter().map(Vec::len).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lit::Var;

    #[test]
    fn init_is_a_cube_of_units() {
        let x = Var(0);
        let mut fs = FrameSeq::new(Cube::new([x.neg()]));
        fs.push(Clause::new([x.pos(), Var(1).neg()]));
        assert_eq!(fs.top(), 1);
        assert_eq!(fs.flat(0), vec![Clause::new([x.neg()])]);
        fs.add_inf(Clause::new([x.pos()]));
        assert_eq!(fs.flat(1).len(), 2);
        assert!(fs.implies(1, &Clause::new([x.pos(), Var(2).pos()])));
        assert!(!fs.implies(1, &Clause::new([Var(2).pos()])));
        assert_eq!(fs.sizes(), vec![1]);
    }
}
