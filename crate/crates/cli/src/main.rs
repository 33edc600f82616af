//! `carmc`: check a safety property of an AIGER circuit.
//!
//! Exit codes follow the competition convention: 10 unsafe, 20 safe,
//! 0 unknown. Usage errors exit with 2 and any other failure with 1.

mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use carmc::aiger::{self, Aig, Format};
use carmc::artifacts::{check_certificate, check_witness, emit_witness};
use carmc::car::{self, stats_csv, Mode, Options, Verdict};
use carmc::limits::Limits;
use carmc::oracle::{bfs_reach, bmc, BfsResult};
use carmc::ts::TransitionSystem;

const EXIT_UNSAFE: u8 = 10;
const EXIT_SAFE: u8 = 20;
const EXIT_UNKNOWN: u8 = 0;
const EXIT_FAILURE: u8 = 1;

/// Largest latch state space the oracle cross-check enumerates.
const ORACLE_STATES: u64 = 1 << 20;
/// Deepest unrolling used when the state space is too large to enumerate.
const ORACLE_BMC_BOUND: usize = 32;

#[derive(Parser, Debug)]
#[command(
    name = "carmc",
    version,
    about = "Safety model checking of AIGER circuits"
)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// AIGER file (.aag or .aig).
    #[arg(required = true)]
    input: Option<PathBuf>,

    #[command(flatten)]
    engine: EngineArgs,

    /// Write the counterexample here instead of standard output.
    #[arg(long, value_name = "PATH")]
    witness: Option<PathBuf>,

    /// Write the inductive invariant of a safe verdict here.
    #[arg(long, value_name = "PATH")]
    certificate: Option<PathBuf>,

    /// Write one CSV row per engine round here.
    #[arg(long, value_name = "PATH")]
    stats: Option<PathBuf>,

    /// Cross-check the verdict against explicit reachability (or bounded
    /// model checking on large circuits) and validate the artifacts.
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every AIGER file of a directory and print a CSV report.
    Bench(bench::BenchArgs),
}

#[derive(Args, Debug, Clone)]
struct EngineArgs {
    /// Forward engine only.
    #[arg(long, group = "mode")]
    forward: bool,
    /// Backward engine only.
    #[arg(long, group = "mode")]
    backward: bool,
    /// Both engines concurrently; the first verdict wins (default).
    #[arg(long, group = "mode")]
    both: bool,

    /// Wall-clock budget in seconds.
    #[arg(long, value_name = "SECONDS", value_parser = parse_timeout)]
    timeout: Option<Duration>,

    /// Resident memory cap in megabytes.
    #[arg(long, value_name = "MB", value_parser = clap::value_parser!(u64).range(1..))]
    memory: Option<u64>,

    #[arg(long, env = "CARMC_SEED", default_value_t = 0)]
    seed: u64,

    /// 1: solver self-checks. 2: also enumerate frames and layers after
    /// every round on small circuits.
    #[arg(long, value_name = "LEVEL", default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    debug_asserts: u8,
}

impl EngineArgs {
    fn mode(&self) -> Mode {
        if self.forward {
            Mode::Forward
        } else if self.backward {
            Mode::Backward
        } else {
            Mode::Both
        }
    }

    /// Options whose deadline, if any, starts now.
    fn options(&self) -> Options {
        Options {
            mode: self.mode(),
            seed: self.seed,
            debug_level: self.debug_asserts,
            limits: self.limits(),
            ..Options::default()
        }
    }

    fn limits(&self) -> Limits {
        Limits {
            deadline: self.timeout.map(|t| Instant::now() + t),
            memory: self.memory.map(|mb| mb << 20),
            cancel: Vec::new(),
        }
    }
}

fn parse_timeout(s: &str) -> Result<Duration, String> {
    let secs: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(secs > 0.0 && secs.is_finite()) {
        return Err("must be a positive number of seconds".into());
    }
    Duration::try_from_secs_f64(secs).map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<Aig> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    aiger::parse(&bytes, Format::Auto).with_context(|| format!("{}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Compares the verdict with an independent method and re-checks its
/// artifact. Returns a description of any disagreement.
fn oracle_check(aig: &Arc<Aig>, verdict: &Verdict) -> Result<Option<String>> {
    match verdict {
        Verdict::Unsafe(trace) => {
            if let Err(e) = check_witness(aig, &emit_witness(trace)) {
                return Ok(Some(format!("witness rejected: {e}")));
            }
        }
        Verdict::Safe(cert) => {
            if let Err(e) = check_certificate(aig, cert) {
                return Ok(Some(format!("certificate rejected: {e}")));
            }
        }
        Verdict::Unknown(_) => return Ok(None),
    }
    let unsafe_claimed = matches!(verdict, Verdict::Unsafe(_));
    let oracle_unsafe = match bfs_reach(aig, ORACLE_STATES) {
        Ok(BfsResult::Unsafe(_)) => true,
        Ok(BfsResult::Safe { .. }) => false,
        Err(_) => {
            let ts = TransitionSystem::encode(Arc::clone(aig));
            let bound = match verdict {
                Verdict::Unsafe(t) => t.len().saturating_sub(1),
                _ => ORACLE_BMC_BOUND,
            };
            let found = bmc(&ts, bound)?.is_some();
            eprintln!(
                "oracle: state space too large, used bounded model checking to depth {bound}"
            );
            // A bounded search that finds nothing says nothing about
            // deeper counterexamples, so only a found trace can contradict.
            if !found && !unsafe_claimed {
                return Ok(None);
            }
            found
        }
    };
    Ok((oracle_unsafe != unsafe_claimed).then(|| {
        format!(
            "engine says {} but the oracle says {}",
            verdict.name(),
            if oracle_unsafe { "unsafe" } else { "safe" }
        )
    }))
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(Command::Bench(args)) = cli.command {
        return bench::run(&args);
    }
    let input = cli.input.expect("clap requires the input");
    let aig = Arc::new(load(&input)?);
    let opts = cli.engine.options();
    let report = car::check(Arc::clone(&aig), &opts)?;

    if let Some(path) = &cli.stats {
        write(path, &stats_csv(&report.stats))?;
    }
    if cli.oracle_check {
        if let Some(msg) = oracle_check(&aig, &report.verdict)? {
            bail!("oracle mismatch: {msg}");
        }
    }
    let code = match &report.verdict {
        Verdict::Unsafe(trace) => {
            let text = emit_witness(trace);
            match &cli.witness {
                Some(path) => {
                    write(path, &text)?;
                    println!("1");
                }
                None => print!("{text}"),
            }
            EXIT_UNSAFE
        }
        Verdict::Safe(cert) => {
            if let Some(path) = &cli.certificate {
                write(path, &cert.to_text())?;
            }
            println!("0");
            EXIT_SAFE
        }
        Verdict::Unknown(reason) => {
            eprintln!("unknown: {reason}");
            println!("2");
            EXIT_UNKNOWN
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
