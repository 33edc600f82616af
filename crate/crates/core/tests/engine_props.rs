use std::sync::Arc;

use proptest::prelude::*;

use carmc::aiger::Aig;
use carmc::artifacts::{check_certificate, emit_witness, parse_witness, Certificate};
use carmc::car::{self, Generalize, Mode, Options, Verdict};
use carmc::corpus::{random_aig, RandomParams};
use carmc::oracle::{bfs_reach, BfsResult};

fn small() -> RandomParams {
    RandomParams {
        max_latches: 6,
        max_inputs: 4,
        max_ands: 30,
    }
}

fn run(aig: &Aig, mode: Mode, generalize: Generalize, seed: u64) -> car::Report {
    let opts = Options {
        mode,
        generalize,
        seed,
        debug_level: 1,
        ..Options::default()
    };
    car::check(Arc::new(aig.clone()), &opts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdicts_match_reachability(
        seed in any::<u64>(),
        mode in prop_oneof![Just(Mode::Forward), Just(Mode::Backward), Just(Mode::Both)],
        generalize in prop_oneof![Just(Generalize::Ternary), Just(Generalize::Sat)],
    ) {
        let aig = random_aig(seed, &small());
        let expected = bfs_reach(&aig, 1 << 16).unwrap();
        let report = run(&aig, mode, generalize, seed);
        match (&report.verdict, expected) {
            (Verdict::Unsafe(t), BfsResult::Unsafe(shortest)) => {
                t.check(&aig).unwrap();
                prop_assert!(t.len() >= shortest.len());
                prop_assert_eq!(&parse_witness(&aig, &emit_witness(t)).unwrap(), t);
            }
            (Verdict::Safe(c), BfsResult::Safe { .. }) => {
                check_certificate(&aig, c).unwrap();
                prop_assert_eq!(&Certificate::parse(&c.to_text()).unwrap(), c);
            }
            (v, e) => prop_assert!(false, "engine {} vs oracle {:?}", v.name(), e),
        }
    }

    #[test]
    fn rounds_are_reproducible(seed in any::<u64>()) {
        let aig = random_aig(seed, &small());
        let a = run(&aig, Mode::Both, Generalize::Ternary, seed);
        let b = run(&aig, Mode::Both, Generalize::Ternary, seed);
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.winner, b.winner);
        prop_assert_eq!(car::stats_csv(&a.stats), car::stats_csv(&b.stats));
    }

    #[test]
    fn frame_counts_never_shrink(seed in any::<u64>()) {
        let aig = random_aig(seed, &small());
        let report = run(&aig, Mode::Forward, Generalize::Ternary, seed);
        for w in report.stats.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            prop_assert_eq!(b.iteration, a.iteration + 1);
            for (x, y) in a.frame_clauses.iter().zip(&b.frame_clauses) {
                prop_assert!(y >= x);
            }
            prop_assert!(b.sat_calls >= a.sat_calls);
        }
    }
}
