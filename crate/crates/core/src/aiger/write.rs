use std::fmt::Write as _;

use thiserror::Error;

use super::{Aig, AigLit, PropertySource, Reset};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WriteError {
    #[error("binary AIGER needs inputs, latches and AND gates numbered consecutively with lhs > rhs0 >= rhs1")]
    NonCanonicalNumbering,
}

fn reset_token(lit: AigLit, reset: Reset) -> Option<String> {
    match reset {
        Reset::Zero => None,
        Reset::One => Some("1".into()),
        Reset::Uninit => Some(lit.to_string()),
    }
}

fn header(aig: &Aig, magic: &str) -> String {
    let (outputs, bads) = match aig.property_source {
        PropertySource::Output => (1, 0),
        PropertySource::Bad => (0, 1),
    };
    let mut h = format!(
        "{magic} {} {} {} {} {}",
        aig.max_var,
        aig.inputs.len(),
        aig.latches.len(),
        outputs,
        aig.ands.len()
    );
    if bads > 0 {
        h.push_str(" 1");
    }
    h.push('\n');
    h
}

/// Serializes to the ASCII format without symbols or comments.
pub fn write_ascii(aig: &Aig) -> String {
    let mut out = header(aig, "aag");
    for lit in &aig.inputs {
        let _ = writeln!(out, "{lit}");
    }
    for l in &aig.latches {
        match reset_token(l.lit, l.reset) {
            Some(r) => {
                let _ = writeln!(out, "{} {} {r}", l.lit, l.next);
            }
            None => {
                let _ = writeln!(out, "{} {}", l.lit, l.next);
            }
        }
    }
    let _ = writeln!(out, "{}", aig.bad);
    for a in &aig.ands {
        let _ = writeln!(out, "{} {} {}", a.lhs, a.rhs0, a.rhs1);
    }
    out
}

fn push_varint(out: &mut Vec<u8>, mut value: u32) {
    while value >= 0x80 {
        out.push((value & 0x7f) as u8 | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

/// Serializes to the binary format. Requires canonical numbering.
pub fn write_binary(aig: &Aig) -> Result<Vec<u8>, WriteError> {
    if !aig.has_canonical_numbering() {
        return Err(WriteError::NonCanonicalNumbering);
    }
    let mut text = header(aig, "aig");
    for l in &aig.latches {
        match reset_token(l.lit, l.reset) {
            Some(r) => {
                let _ = writeln!(text, "{} {r}", l.next);
            }
            None => {
                let _ = writeln!(text, "{}", l.next);
            }
        }
    }
    let _ = writeln!(text, "{}", aig.bad);
    let mut out = text.into_bytes();
    for a in &aig.ands {
        push_varint(&mut out, a.lhs - a.rhs0);
        push_varint(&mut out, a.rhs0 - a.rhs1);
    }
    Ok(out)
}
