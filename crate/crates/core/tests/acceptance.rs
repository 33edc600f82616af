//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use carmc::aiger::{Aig, State};
use carmc::artifacts::{check_certificate, check_witness, emit_witness, Certificate};
use carmc::car::{
    check, check_direction, stats_csv, IterationStats, Mode, Options, Report, Samples, Verdict,
};
use carmc::corpus::{self, RandomParams};
use carmc::limits::Limits;
use carmc::lit::{Clause, Lit};
use carmc::oracle::{bfs_reach, bmc, BfsResult};
use carmc::sat::{Solver, SolverOptions};
use carmc::ts::{Direction, TransitionSystem};

const RANDOM_COUNT: usize = 2500;
const SEED: u64 = 7;

fn corpus() -> Vec<(String, Aig)> {
    let mut all: Vec<(String, Aig)> = corpus::hand_built()
        .into_iter()
        .map(|(n, a)| (n.to_string(), a))
        .collect();
    all.extend(corpus::families());
    all.extend(corpus::random_corpus(
        1000,
        RANDOM_COUNT,
        &RandomParams::default(),
    ));
    all
}

fn options(mode: Mode, debug_level: u8, record_samples: bool) -> Options {
    Options {
        mode,
        seed: SEED,
        debug_level,
        record_samples,
        limits: Limits {
            deadline: Some(Instant::now() + Duration::from_secs(60)),
            ..Limits::none()
        },
        ..Options::default()
    }
}

struct Run {
    name: String,
    aig: Arc<Aig>,
    fwd: Report,
    bwd: Report,
    both: Report,
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn from_failures(ok_detail: String, failures: Vec<String>) -> Outcome {
        match failures.first() {
            None => Outcome {
                pass: true,
                detail: ok_detail,
            },
            Some(first) => Outcome {
                pass: false,
                detail: format!("{} failures, first: {first}", failures.len()),
            },
        }
    }
}

fn safe_name(safe: bool) -> &'static str {
    if safe {
        "safe"
    } else {
        "unsafe"
    }
}

fn verdict_safe(v: &Verdict) -> Option<bool> {
    match v {
        Verdict::Safe(_) => Some(true),
        Verdict::Unsafe(_) => Some(false),
        Verdict::Unknown(_) => None,
    }
}

fn run_all(corpus: &[(String, Aig)]) -> Result<Vec<Run>, String> {
    corpus
        .iter()
        .map(|(name, aig)| {
            let aig = Arc::new(aig.clone());
            let go = |mode| {
                let opts = options(mode, 0, true);
                match mode {
                    Mode::Forward => check_direction(Arc::clone(&aig), Direction::Forward, &opts),
                    Mode::Backward => check_direction(Arc::clone(&aig), Direction::Backward, &opts),
                    Mode::Both => check(Arc::clone(&aig), &opts),
                }
                .map_err(|e| format!("{name} {mode:?}: {e}"))
            };
            Ok(Run {
                name: name.clone(),
                fwd: go(Mode::Forward)?,
                bwd: go(Mode::Backward)?,
                both: go(Mode::Both)?,
                aig,
            })
        })
        .collect()
}

fn criterion1(runs: &[Run], engine_time: Duration) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut unsafe_count = 0;
    for r in runs {
        let bfs = match bfs_reach(&r.aig, 1 << 16) {
            Ok(BfsResult::Safe { .. }) => true,
            Ok(BfsResult::Unsafe(_)) => false,
            Err(e) => {
                failures.push(format!("{}: bfs refused: {e}", r.name));
                continue;
            }
        };
        let ts = TransitionSystem::encode(Arc::clone(&r.aig));
        let bound = 1usize << r.aig.num_latches();
        let bmc_safe = match bmc(&ts, bound) {
            Ok(t) => t.is_none(),
            Err(e) => {
                failures.push(format!("{}: bmc: {e}", r.name));
                continue;
            }
        };
        let got = [
            ("forward", verdict_safe(&r.fwd.verdict)),
            ("backward", verdict_safe(&r.bwd.verdict)),
            ("portfolio", verdict_safe(&r.both.verdict)),
            ("bmc", Some(bmc_safe)),
        ];
        for (who, v) in got {
            if v != Some(bfs) {
                failures.push(format!(
                    "{}: {who} says {v:?}, bfs says {}",
                    r.name,
                    safe_name(bfs)
                ));
            }
        }
        unsafe_count += usize::from(!bfs);
    }
    let total = engine_time + start.elapsed();
    if total > Duration::from_secs(300) {
        failures.push(format!("took {total:?}"));
    }
    Outcome::from_failures(
        format!(
            "{} instances agree ({unsafe_count} unsafe) in {:.1}s",
            runs.len(),
            total.as_secs_f64()
        ),
        failures,
    )
}

fn reports(r: &Run) -> [(&'static str, &Report); 3] {
    [
        ("forward", &r.fwd),
        ("backward", &r.bwd),
        ("portfolio", &r.both),
    ]
}

fn criterion2(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in runs {
        for (who, rep) in reports(r) {
            if let Verdict::Unsafe(trace) = &rep.verdict {
                checked += 1;
                if let Err(e) = check_witness(&r.aig, &emit_witness(trace)) {
                    failures.push(format!("{} {who}: {e}", r.name));
                }
            }
        }
    }
    Outcome::from_failures(format!("{checked} witnesses replay to bad"), failures)
}

fn criterion3(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in runs {
        for (who, rep) in reports(r) {
            if let Verdict::Safe(cert) = &rep.verdict {
                checked += 1;
                let parsed = Certificate::parse(&cert.to_text());
                match parsed {
                    Ok(c) => {
                        if let Err(e) = check_certificate(&r.aig, &c) {
                            failures.push(format!("{} {who}: {e}", r.name));
                        }
                    }
                    Err(e) => {
                        failures.push(format!("{} {who}: text does not parse back: {e}", r.name))
                    }
                }
            }
        }
    }
    Outcome::from_failures(
        format!("{checked} certificates pass all three checks"),
        failures,
    )
}

fn criterion4(corpus: &[(String, Aig)]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut instances, mut rounds) = (0, 0);
    for (name, aig) in corpus.iter().filter(|(_, a)| a.num_latches() <= 6) {
        instances += 1;
        for d in [Direction::Forward, Direction::Backward] {
            match check_direction(Arc::new(aig.clone()), d, &options(Mode::Both, 2, false)) {
                Ok(rep) => {
                    rounds += rep.semantic_checks;
                    if rep.semantic_checks < rep.stats.len() {
                        failures.push(format!("{name} {d:?}: a round was not enumerated"));
                    }
                }
                Err(e) => failures.push(format!("{name} {d:?}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(600) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::from_failures(
        format!(
            "{rounds} rounds enumerated on {instances} instances in {:.1}s",
            elapsed.as_secs_f64()
        ),
        failures,
    )
}

fn system(aig: &Arc<Aig>, d: Direction) -> TransitionSystem {
    let ts = TransitionSystem::encode(Arc::clone(aig));
    match d {
        Direction::Forward => ts,
        Direction::Backward => ts.reverse().unwrap(),
    }
}

fn solver_with(ts: &TransitionSystem, frame: &[Clause]) -> Solver {
    let mut s = Solver::new(SolverOptions::default());
    s.ensure_vars(ts.num_vars()).unwrap();
    s.load(&ts.all_clauses()).unwrap();
    s.load(frame).unwrap();
    s
}

fn check_mucs(aig: &Arc<Aig>, samples: &Samples, failures: &mut Vec<String>, name: &str) -> usize {
    let mut n = 0;
    for m in &samples.muc {
        let ts = system(aig, m.direction);
        let mut s = solver_with(&ts, &m.frame);
        n += 1;
        if s.is_sat(&m.core).unwrap() {
            failures.push(format!("{name}: core {:?} is satisfiable", m.core));
            continue;
        }
        for k in 0..m.core.len() {
            let weaker: Vec<Lit> = m
                .core
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &l)| l)
                .collect();
            if !s.is_sat(&weaker).unwrap() {
                failures.push(format!("{name}: core {:?} is not minimal", m.core));
                break;
            }
        }
    }
    n
}

/// Every completion of the cube over latches and inputs lies in the frame
/// and steps to the recorded successor, which lies in the target.
fn check_pas(aig: &Arc<Aig>, samples: &Samples, failures: &mut Vec<String>, name: &str) -> usize {
    let (nl, ni) = (aig.num_latches(), aig.num_inputs());
    let mut n = 0;
    for p in &samples.pa {
        let ts = system(aig, p.direction);
        let (next_latches, next_inputs) = ts.split_state(&p.next);
        n += 1;
        for bits in 0..1u32 << (nl + ni) {
            let latches: Vec<bool> = (0..nl).map(|k| bits >> k & 1 == 1).collect();
            let inputs: Vec<bool> = (0..ni).map(|k| bits >> (nl + k) & 1 == 1).collect();
            let vals = ts.state_assignment(&latches, &inputs);
            if !p.result.eval(&vals) {
                continue;
            }
            let in_frame = p.frame.iter().all(|c| c.eval(&vals));
            let steps = match p.direction {
                Direction::Forward => {
                    let (next, _) = aig.simulate_step(&State(latches.clone()), &inputs);
                    p.target.eval(&ts.state_assignment(&next, &next_inputs))
                }
                Direction::Backward => {
                    let (succ, _) = aig.simulate_step(&State(next_latches.clone()), &next_inputs);
                    succ.0 == latches && p.target.eval(&p.next)
                }
            };
            if !(in_frame && steps) {
                failures.push(format!(
                    "{name}: completion {vals:?} of {:?} escapes",
                    p.result
                ));
                break;
            }
        }
    }
    n
}

fn criterion5(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    let (mut mucs, mut pas) = (0, 0);
    for r in runs {
        for rep in [&r.fwd, &r.bwd] {
            mucs += check_mucs(&r.aig, &rep.samples, &mut failures, &r.name);
            if r.aig.num_latches() + r.aig.num_inputs() <= 8 {
                pas += check_pas(&r.aig, &rep.samples, &mut failures, &r.name);
            }
        }
    }
    if mucs < 1000 {
        failures.push(format!("only {mucs} cores sampled"));
    }
    if pas < 1000 {
        failures.push(format!("only {pas} partial assignments sampled"));
    }
    Outcome::from_failures(
        format!("{mucs} cores minimal, {pas} partial assignments sound"),
        failures,
    )
}

/// Per direction, frames and layers only ever grow: one new frame per
/// round and no count goes down.
fn progress_violation(stats: &[IterationStats]) -> Option<String> {
    for d in [Direction::Forward, Direction::Backward] {
        let rows: Vec<&IterationStats> = stats.iter().filter(|s| s.direction == d).collect();
        for w in rows.windows(2) {
            let (a, b) = (w[0], w[1]);
            let grows = |x: &[usize], y: &[usize]| {
                x.len() <= y.len() && x.iter().zip(y).all(|(p, q)| p <= q)
            };
            if b.iteration != a.iteration + 1
                || !grows(&a.frame_clauses, &b.frame_clauses)
                || !grows(&a.layer_sizes, &b.layer_sizes)
                || a.inf_clauses > b.inf_clauses
            {
                return Some(format!("{d:?} round {} -> {}", a.iteration, b.iteration));
            }
        }
    }
    None
}

fn duplicate_clause(cert: &Certificate) -> bool {
    cert.frames
        .iter()
        .chain(std::iter::once(&cert.inf))
        .any(|frame| {
            let mut seen = HashSet::new();
            frame.iter().any(|c| !seen.insert(c.clone()))
        })
}

fn criterion6(runs: &[Run]) -> Outcome {
    let mut failures = Vec::new();
    for r in runs {
        for (who, rep) in reports(r) {
            if !rep.verdict.is_conclusive() {
                failures.push(format!("{} {who}: {:?}", r.name, rep.verdict));
            }
            if let Some(v) = progress_violation(&rep.stats) {
                failures.push(format!("{} {who}: counters shrink at {v}", r.name));
            }
            if let Verdict::Safe(cert) = &rep.verdict {
                if duplicate_clause(cert) {
                    failures.push(format!("{} {who}: duplicate clause in a frame", r.name));
                }
            }
        }
    }
    Outcome::from_failures(
        format!("{} runs conclusive with monotone counters", runs.len() * 3),
        failures,
    )
}

fn criterion7() -> Outcome {
    let aig = corpus::dead_bit();
    let rep = match check_direction(
        Arc::new(aig.clone()),
        Direction::Forward,
        &options(Mode::Forward, 1, false),
    ) {
        Ok(r) => r,
        Err(e) => return Outcome::from_failures(String::new(), vec![e.to_string()]),
    };
    let mut failures = Vec::new();
    match &rep.verdict {
        Verdict::Safe(cert) => {
            if cert.index != 1 {
                failures.push(format!("safe at frame {}", cert.index));
            }
            // x is latch 0; its dead value 0 is excluded for good.
            let x = TransitionSystem::encode(Arc::new(aig.clone())).latch_var(0);
            if !cert.inf.contains(&Clause::new([x.pos()])) {
                failures.push(format!("F-infinity is {:?}", cert.inf));
            }
            if let Err(e) = check_certificate(&aig, cert) {
                failures.push(e.to_string());
            }
        }
        v => failures.push(format!("verdict {v:?}")),
    }
    Outcome::from_failures(
        "safe at frame 1 with the dead-state clause".into(),
        failures,
    )
}

fn criterion8(corpus: &[(String, Aig)], first: &[Run]) -> Outcome {
    let csv = |reports: &mut dyn Iterator<Item = &Report>| -> String {
        reports.map(|r| stats_csv(&r.stats)).collect()
    };
    let a = csv(&mut first.iter().map(|r| &r.both));
    let second: Vec<Report> = corpus
        .iter()
        .map(|(_, aig)| check(Arc::new(aig.clone()), &options(Mode::Both, 0, true)).unwrap())
        .collect();
    let b = csv(&mut second.iter());
    let mut failures = Vec::new();
    if a != b {
        let line = a.lines().zip(b.lines()).position(|(x, y)| x != y);
        failures.push(format!("stats differ at line {line:?}"));
    }
    Outcome::from_failures(
        format!("{} bytes of stats identical across runs", a.len()),
        failures,
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus = corpus();
    let runs_start = Instant::now();
    let runs = match run_all(&corpus) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: engine error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let outcomes = [
        (
            1,
            "oracle equivalence",
            criterion1(&runs, runs_start.elapsed()),
        ),
        (2, "witness validity", criterion2(&runs)),
        (3, "certificate validity", criterion3(&runs)),
        (4, "frame semantics", criterion4(&corpus)),
        (5, "reasoner minimality", criterion5(&runs)),
        (6, "termination and progress", criterion6(&runs)),
        (7, "dead-state blocking", criterion7()),
        (8, "determinism", criterion8(&corpus, &runs)),
    ];
    let mut all = true;
    for (n, title, o) in &outcomes {
        all &= o.pass;
        println!(
            "criterion {n} ({title}): {} - {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance finished in {:.1}s",
        start.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
