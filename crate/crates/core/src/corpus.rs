//! Small hand-built circuits and a seeded random circuit generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aiger::{parse, Aig, AigLit, AndGate, Format, Latch, PropertySource, Reset};

pub const TOGGLE: &str = "aag 1 0 1 1 0\n2 3\n2\n";

/// One latch stuck at zero, bad when it is one.
pub const CONST0: &str = "aag 1 0 1 1 0\n2 0\n2\n";

/// Two-bit incrementer, latch order [c1, c0], bad = c1 & c0.
pub const COUNTER2: &str = "aag 6 0 2 0 4 1\n2 11\n4 5\n12\n6 5 2\n8 4 3\n10 9 7\n12 4 2\n";

/// Latch x (reset 1, next 1) and y (reset 0, next !x), bad = y. States with
/// x = 0 have no predecessor, so every path to bad starts in a dead state.
pub const DEAD_BIT: &str = "aag 2 0 2 0 0 1\n2 1 1\n4 3\n4\n";

/// No latches, property constant false.
pub const CONST_FALSE: &str = "aag 0 0 0 1 0\n0\n";

fn builtin(text: &str) -> Aig {
    parse(text.as_bytes(), Format::Ascii).expect("built-in model parses")
}

pub fn toggle() -> Aig {
    builtin(TOGGLE)
}

pub fn const0() -> Aig {
    builtin(CONST0)
}

pub fn counter2() -> Aig {
    builtin(COUNTER2)
}

pub fn dead_bit() -> Aig {
    builtin(DEAD_BIT)
}

pub fn const_false() -> Aig {
    builtin(CONST_FALSE)
}

/// The named hand-built models.
pub fn hand_built() -> Vec<(&'static str, Aig)> {
    vec![
        ("toggle", toggle()),
        ("const0", const0()),
        ("counter2", counter2()),
        ("dead_bit", dead_bit()),
        ("const_false", const_false()),
    ]
}

/// Appends AND gates with canonical numbering after the inputs and latches.
struct Builder {
    next_var: u32,
    ands: Vec<AndGate>,
}

impl Builder {
    fn new(num_inputs: usize, num_latches: usize) -> Self {
        Builder {
            next_var: (num_inputs + num_latches + 1) as u32,
            ands: Vec::new(),
        }
    }

    fn and(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let lhs = 2 * self.next_var;
        self.next_var += 1;
        self.ands.push(AndGate {
            lhs,
            rhs0: a.max(b),
            rhs1: a.min(b),
        });
        lhs
    }

    fn or(&mut self, a: AigLit, b: AigLit) -> AigLit {
        self.and(a ^ 1, b ^ 1) ^ 1
    }

    fn xor(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let both = self.and(a, b);
        let neither = self.and(a ^ 1, b ^ 1);
        self.and(both ^ 1, neither ^ 1)
    }

    fn finish(self, inputs: Vec<AigLit>, latches: Vec<Latch>, bad: AigLit) -> Aig {
        Aig {
            max_var: self.next_var - 1,
            inputs,
            latches,
            ands: self.ands,
            bad,
            property_source: PropertySource::Bad,
        }
    }
}

/// An incrementer over `bits` latches that is bad when all of them are set;
/// the shortest counterexample has `2^bits` frames.
pub fn counter(bits: usize) -> Aig {
    let latch = |i: usize| 2 * (i as u32 + 1);
    let mut b = Builder::new(0, bits);
    let mut carry = 1;
    let mut next = Vec::with_capacity(bits);
    for i in 0..bits {
        next.push(b.xor(latch(i), carry));
        carry = b.and(carry, latch(i));
    }
    let mut bad = 1;
    for i in 0..bits {
        bad = b.and(bad, latch(i));
    }
    let latches = (0..bits)
        .map(|i| Latch {
            lit: latch(i),
            next: next[i],
            reset: Reset::Zero,
        })
        .collect();
    b.finish(Vec::new(), latches, bad)
}

/// A one-hot token that moves one position whenever the input is set.
/// Bad when two neighbouring positions hold a token, which never happens.
pub fn ring(n: usize) -> Aig {
    assert!(n >= 2);
    let en = 2;
    let latch = |i: usize| 2 * (i as u32 + 2);
    let mut b = Builder::new(1, n);
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let shift = b.and(en, latch((i + n - 1) % n));
        let hold = b.and(en ^ 1, latch(i));
        next.push(b.or(shift, hold));
    }
    let mut bad = 0;
    for i in 0..n {
        let pair = b.and(latch(i), latch((i + 1) % n));
        bad = b.or(bad, pair);
    }
    let latches = (0..n)
        .map(|i| Latch {
            lit: latch(i),
            next: next[i],
            reset: if i == 0 { Reset::One } else { Reset::Zero },
        })
        .collect();
    b.finish(vec![en], latches, bad)
}

/// Parameterized models with longer counterexamples or less obvious
/// invariants than the random ones.
pub fn families() -> Vec<(String, Aig)> {
    let mut out = Vec::new();
    for bits in 2..=5 {
        out.push((format!("counter{bits}"), counter(bits)));
    }
    for n in 3..=6 {
        out.push((format!("ring{n}"), ring(n)));
    }
    out
}

#[derive(Clone, Debug)]
pub struct RandomParams {
    pub max_latches: usize,
    pub max_inputs: usize,
    pub max_ands: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_latches: 8,
            max_inputs: 6,
            max_ands: 40,
        }
    }
}

/// A random circuit with canonical numbering. About half of the instances
/// take the property from a conjunction of several latches, which makes
/// safe instances common.
pub fn random_aig(seed: u64, params: &RandomParams) -> Aig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nl = rng.gen_range(1..=params.max_latches.max(1));
    let ni = rng.gen_range(0..=params.max_inputs);
    let conj = if rng.gen_bool(0.5) && nl >= 2 {
        rng.gen_range(2..=nl.min(4))
    } else {
        0
    };
    let conj_gates = conj.saturating_sub(1);
    let budget = params.max_ands.saturating_sub(conj_gates);
    let free_gates = if budget == 0 {
        0
    } else {
        rng.gen_range(0..=budget)
    };
    let na = free_gates + conj_gates;

    let first_and = (ni + nl + 1) as u32;
    let mut ands: Vec<AndGate> = Vec::with_capacity(na);

    let pick = |rng: &mut ChaCha8Rng, below: u32| -> AigLit {
        if rng.gen_bool(0.03) {
            return rng.gen_range(0..2);
        }
        let var = rng.gen_range(1..below);
        2 * var + u32::from(rng.gen_bool(0.5))
    };

    for g in 0..free_gates as u32 {
        let var = first_and + g;
        let a = pick(&mut rng, var);
        let b = pick(&mut rng, var);
        ands.push(AndGate {
            lhs: 2 * var,
            rhs0: a.max(b),
            rhs1: a.min(b),
        });
    }
    let after_free = first_and + free_gates as u32;
    let resets: Vec<Reset> = (0..nl)
        .map(|_| match rng.gen_range(0..10) {
            0 => Reset::Uninit,
            1..=3 => Reset::One,
            _ => Reset::Zero,
        })
        .collect();

    let latch_lit = |i: usize| 2 * (ni + i + 1) as u32;
    let bad = if conj > 0 {
        let mut chosen: Vec<usize> = (0..nl).collect();
        for i in (1..chosen.len()).rev() {
            chosen.swap(i, rng.gen_range(0..=i));
        }
        // The first conjunct is false at reset, so the initial state is
        // never bad and the search has to take at least one step.
        let mut acc = latch_lit(chosen[0]) | u32::from(resets[chosen[0]].value());
        for (k, &l) in chosen[1..conj].iter().enumerate() {
            let lit = latch_lit(l) | u32::from(rng.gen_bool(0.5));
            let var = after_free + k as u32;
            ands.push(AndGate {
                lhs: 2 * var,
                rhs0: acc.max(lit),
                rhs1: acc.min(lit),
            });
            acc = 2 * var;
        }
        acc
    } else {
        pick(&mut rng, after_free)
    };

    let max_var = first_and - 1 + na as u32;
    let latches = (0..nl)
        .map(|i| Latch {
            lit: latch_lit(i),
            next: pick(&mut rng, max_var + 1),
            reset: resets[i],
        })
        .collect();
    Aig {
        max_var,
        inputs: (1..=ni as u32).map(|v| 2 * v).collect(),
        latches,
        ands,
        bad,
        property_source: if rng.gen_bool(0.5) {
            PropertySource::Bad
        } else {
            PropertySource::Output
        },
    }
}

/// The default acceptance corpus: `count` random circuits from consecutive
/// seeds starting at `base_seed`.
pub fn random_corpus(base_seed: u64, count: usize, params: &RandomParams) -> Vec<(String, Aig)> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            (format!("rand_{seed:06}"), random_aig(seed, params))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::write_ascii;

    #[test]
    fn random_circuits_are_well_formed() {
        let params = RandomParams::default();
        for seed in 0..300 {
            let aig = random_aig(seed, &params);
            assert!(aig.has_canonical_numbering(), "seed {seed}");
            assert!(aig.num_latches() <= 8 && aig.num_inputs() <= 6 && aig.ands.len() <= 40);
            let reparsed = parse(write_ascii(&aig).as_bytes(), Format::Ascii).unwrap();
            assert_eq!(reparsed, aig, "seed {seed}");
        }
    }

    #[test]
    fn families_are_well_formed() {
        for (name, aig) in families() {
            assert!(aig.has_canonical_numbering(), "{name}");
            let reparsed = parse(write_ascii(&aig).as_bytes(), Format::Ascii).unwrap();
            assert_eq!(reparsed, aig, "{name}");
        }
    }

    #[test]
    fn counter_reaches_bad_after_all_values() {
        let aig = counter(3);
        let mut s = aig.initial_state();
        for step in 0..8 {
            assert_eq!(aig.is_bad(&s, &[]), step == 7, "step {step}");
            s = aig.simulate_step(&s, &[]).0;
        }
    }

    #[test]
    fn ring_keeps_one_token() {
        let aig = ring(4);
        let mut s = aig.initial_state();
        for step in 0..20 {
            assert!(!aig.is_bad(&s, &[step % 3 == 0]));
            s = aig.simulate_step(&s, &[step % 3 == 0]).0;
            assert_eq!(s.iter().filter(|&&b| b).count(), 1);
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let p = RandomParams::default();
        assert_eq!(random_aig(42, &p), random_aig(42, &p));
    }
}
