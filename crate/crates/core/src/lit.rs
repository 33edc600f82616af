//! Variables, literals, cubes and clauses.
//!
//! A [`Lit`] packs a variable index and a sign bit as `2 * var + neg`, so
//! sorting literals groups both polarities of a variable next to each other.
//! [`Cube`] and [`Clause`] keep their literals sorted and duplicate free and
//! never contain a complementary pair.

use std::fmt;
use std::ops::{Deref, Not};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, !positive)
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, negated: bool) -> Self {
        Lit((var.0 << 1) | negated as u32)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    /// Value of this literal when its variable is assigned `value`.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }

    /// Signed 1-based integer as used by DIMACS.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        let var = Var(u32::try_from(value.unsigned_abs() - 1).ok()?);
        Some(Lit::new(var, value < 0))
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Sorts, removes duplicates and reports whether a complementary pair remains.
fn canonicalize(lits: &mut Vec<Lit>) -> bool {
    lits.sort_unstable();
    lits.dedup();
    lits.windows(2).all(|w| w[0].var() != w[1].var())
}

/// A conjunction of literals, read as the set of states satisfying all of them.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube(Vec<Lit>);

impl Cube {
    /// Builds a cube, returning `None` when it contains both `l` and `!l`.
    pub fn try_new(lits: impl IntoIterator<Item = Lit>) -> Option<Self> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        canonicalize(&mut lits).then_some(Cube(lits))
    }

    /// Builds a cube from literals that are known to be consistent.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        Self::try_new(lits).expect("cube contains a complementary pair")
    }

    pub fn empty() -> Self {
        Cube(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn into_lits(self) -> Vec<Lit> {
        self.0
    }

    /// The clause blocking exactly this cube.
    pub fn negate(&self) -> Clause {
        Clause(self.0.iter().map(|&l| !l).collect())
    }

    /// Literal-set inclusion, which as state sets means `other ⊆ self`.
    pub fn is_subset_of(&self, other: &Cube) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    /// Whether the cube holds under a total assignment indexed by variable.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().all(|l| l.eval(assignment[l.var().index()]))
    }

    pub fn map_vars(&self, f: impl FnMut(Lit) -> Lit) -> Cube {
        Cube::new(self.0.iter().copied().map(f))
    }
}

impl Deref for Cube {
    type Target = [Lit];

    fn deref(&self) -> &[Lit] {
        &self.0
    }
}

/// A disjunction of literals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Builds a clause, returning `None` when it is a tautology.
    pub fn try_new(lits: impl IntoIterator<Item = Lit>) -> Option<Self> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        canonicalize(&mut lits).then_some(Clause(lits))
    }

    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Self {
        Self::try_new(lits).expect("clause is a tautology")
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn negate(&self) -> Cube {
        Cube(self.0.iter().map(|&l| !l).collect())
    }

    /// Every literal of `self` occurs in `other`, so `self` implies `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(assignment[l.var().index()]))
    }

    pub fn map_vars(&self, f: impl FnMut(Lit) -> Lit) -> Clause {
        Clause::new(self.0.iter().copied().map(f))
    }
}

impl Deref for Clause {
    type Target = [Lit];

    fn deref(&self) -> &[Lit] {
        &self.0
    }
}

fn is_sorted_subset(small: &[Lit], big: &[Lit]) -> bool {
    let mut it = big.iter();
    'outer: for l in small {
        for b in it.by_ref() {
            if b == l {
                continue 'outer;
            }
            if b > l {
                return false;
            }
        }
        return false;
    }
    true
}
