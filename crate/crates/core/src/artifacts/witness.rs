use std::fmt::Write as _;

use thiserror::Error;

use crate::aiger::{Aig, State};
use crate::oracle::{Trace, TraceError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("only unsafe verdicts have a witness")]
    NotUnsafe,
    #[error("malformed witness at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("replay failed: {0}")]
    Replay(#[from] TraceError),
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Text in the competition witness format: a `1` status line, the
/// violated property `b0`, the initial latch values, one input vector per
/// frame and a closing `.`.
pub fn emit_witness(trace: &Trace) -> String {
    let mut out = String::from("1\nb0\n");
    let _ = writeln!(out, "{}", bit_string(&trace.states[0]));
    for inputs in &trace.inputs {
        let _ = writeln!(out, "{}", bit_string(inputs));
    }
    out.push('.');
    out
}

fn parse_bits(text: &str, len: usize, line: usize) -> Result<Vec<bool>, WitnessError> {
    if text.chars().count() != len {
        return Err(WitnessError::Malformed {
            line,
            msg: format!("expected {len} values, found {}", text.chars().count()),
        });
    }
    text.chars()
        .map(|c| match c {
            '0' | 'x' => Ok(false),
            '1' => Ok(true),
            other => Err(WitnessError::Malformed {
                line,
                msg: format!("unexpected character {other:?}"),
            }),
        })
        .collect()
}

/// Rebuilds the trace a witness describes by simulation.
pub fn parse_witness(aig: &Aig, text: &str) -> Result<Trace, WitnessError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.starts_with('c'))
        .collect();
    let malformed = |line: usize, msg: &str| WitnessError::Malformed {
        line,
        msg: msg.to_string(),
    };
    let mut it = lines.into_iter();
    match it.next() {
        Some((_, "1")) => {}
        Some((n, _)) => return Err(malformed(n, "expected status line `1`")),
        None => return Err(malformed(1, "empty witness")),
    }
    match it.next() {
        Some((_, "b0")) => {}
        Some((n, _)) => return Err(malformed(n, "expected property `b0`")),
        None => return Err(malformed(2, "missing property line")),
    }
    let (n, init) = it
        .next()
        .ok_or_else(|| malformed(3, "missing initial state"))?;
    let mut state = State(parse_bits(init, aig.num_latches(), n)?);
    let mut trace = Trace {
        states: Vec::new(),
        inputs: Vec::new(),
    };
    let mut closed = false;
    for (n, line) in it.by_ref() {
        if line == "." {
            closed = true;
            break;
        }
        let inputs = parse_bits(line, aig.num_inputs(), n)?;
        let (next, _) = aig.simulate_step(&state, &inputs);
        trace.states.push(std::mem::replace(&mut state, next));
        trace.inputs.push(inputs);
    }
    if !closed {
        return Err(malformed(text.lines().count(), "missing terminating `.`"));
    }
    if let Some((n, _)) = it.find(|(_, l)| !l.trim().is_empty()) {
        return Err(malformed(n, "content after `.`"));
    }
    Ok(trace)
}

/// Replays a witness against the circuit.
pub fn check_witness(aig: &Aig, text: &str) -> Result<(), WitnessError> {
    parse_witness(aig, text)?.check(aig)?;
    Ok(())
}
