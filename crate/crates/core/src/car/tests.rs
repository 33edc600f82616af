use super::*;
use crate::corpus;
use crate::limits::{Limits, UnknownReason};

fn run(aig: Aig, direction: Direction) -> Report {
    let opts = Options {
        debug_level: 2,
        ..Options::default()
    };
    check_direction(Arc::new(aig), direction, &opts).unwrap()
}

#[test]
fn toggle_unsafe_both_ways() {
    for d in [Direction::Forward, Direction::Backward] {
        let r = run(corpus::toggle(), d);
        let Verdict::Unsafe(t) = r.verdict else {
            panic!("{d:?}: {:?}", r.verdict)
        };
        assert_eq!(t.len(), 2);
        assert!(r.stats.is_empty(), "caught before the first round");
    }
}

#[test]
fn const0_safe_at_one() {
    for d in [Direction::Forward, Direction::Backward] {
        let r = run(corpus::const0(), d);
        let Verdict::Safe(cert) = r.verdict else {
            panic!("{d:?}: {:?}", r.verdict)
        };
        assert_eq!(cert.index, 1, "{d:?}");
        assert_eq!(
            crate::artifacts::check_certificate(&corpus::const0(), &cert),
            Ok(())
        );
    }
}

#[test]
fn counter2_unsafe_length_four() {
    for d in [Direction::Forward, Direction::Backward] {
        let r = run(corpus::counter2(), d);
        let Verdict::Unsafe(t) = r.verdict else {
            panic!("{d:?}: {:?}", r.verdict)
        };
        assert_eq!(t.len(), 4, "{d:?}");
        assert!(r.semantic_checks > 0);
    }
}

#[test]
fn dead_bit_blocked_by_inf() {
    let r = run(corpus::dead_bit(), Direction::Forward);
    let Verdict::Safe(cert) = r.verdict else {
        panic!("{:?}", r.verdict)
    };
    assert_eq!(cert.index, 1);
    assert_eq!(
        cert.inf,
        vec![crate::lit::Clause::new([crate::lit::Var(0).pos()])]
    );
}

#[test]
fn constant_false_property_is_safe() {
    for d in [Direction::Forward, Direction::Backward] {
        let r = run(corpus::const_false(), d);
        assert!(
            matches!(r.verdict, Verdict::Safe(_)),
            "{d:?}: {:?}",
            r.verdict
        );
    }
}

#[test]
fn portfolio_agrees() {
    for (name, aig) in corpus::hand_built() {
        let both = check(Arc::new(aig.clone()), &Options::default()).unwrap();
        let fwd = run(aig, Direction::Forward);
        assert_eq!(both.verdict.name(), fwd.verdict.name(), "{name}");
    }
}

#[test]
fn families_with_both_generalizers() {
    for (name, aig) in corpus::families() {
        let bfs = crate::oracle::bfs_reach(&aig, 1 << 12).unwrap();
        let expect_safe = matches!(bfs, crate::oracle::BfsResult::Safe { .. });
        for generalize in [Generalize::Ternary, Generalize::Sat] {
            for d in [Direction::Forward, Direction::Backward] {
                let opts = Options {
                    debug_level: 2,
                    generalize,
                    ..Options::default()
                };
                let r = check_direction(Arc::new(aig.clone()), d, &opts).unwrap();
                match &r.verdict {
                    Verdict::Safe(cert) => {
                        assert!(expect_safe, "{name} {d:?} {generalize:?}");
                        assert_eq!(crate::artifacts::check_certificate(&aig, cert), Ok(()));
                    }
                    Verdict::Unsafe(t) => {
                        assert!(!expect_safe, "{name} {d:?} {generalize:?}");
                        if let crate::oracle::BfsResult::Unsafe(shortest) = &bfs {
                            assert!(t.len() >= shortest.len());
                        }
                    }
                    v => panic!("{name}: {v:?}"),
                }
            }
        }
    }
}

#[test]
fn counter_trace_is_shortest() {
    // The only path to all-ones visits every value once.
    for d in [Direction::Forward, Direction::Backward] {
        let r = run(corpus::counter(4), d);
        let Verdict::Unsafe(t) = r.verdict else {
            panic!("{d:?}")
        };
        assert_eq!(t.len(), 16);
    }
}

#[test]
fn round_limit_gives_unknown() {
    let opts = Options {
        max_rounds: Some(1),
        ..Options::default()
    };
    let r = check_direction(Arc::new(corpus::ring(5)), Direction::Forward, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown(UnknownReason::StepLimit));
}

#[test]
fn cancelled_run_gives_unknown() {
    let flag = Arc::new(std::sync::atomic::AtomicBool::new(true));
    let opts = Options {
        limits: Limits::none().with_cancel(flag),
        ..Options::default()
    };
    let r = check(Arc::new(corpus::counter(4)), &opts).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown(UnknownReason::Cancelled));
}
