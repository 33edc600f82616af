use std::fmt;

use thiserror::Error;

use super::{lit_var, Aig, AigLit, AndGate, Latch, PropertySource, Reset};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Ascii,
    Binary,
    /// Decide from the header magic.
    Auto,
}

/// Position of a diagnostic: 1-based line and 0-based byte offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub byte: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} (byte {})", self.line, self.byte)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{at}: malformed header: {msg}")]
    Header { at: Location, msg: String },
    #[error("{at}: {msg}")]
    Syntax { at: Location, msg: String },
    #[error("{at}: literal {lit} out of range (maximum literal is {max})")]
    LiteralOutOfRange { at: Location, lit: u64, max: u64 },
    #[error("{at}: AND gate {lhs} reads a variable that is not defined before it")]
    AndOrder { at: Location, lhs: AigLit },
    #[error("{at}: variable {var} is defined more than once")]
    Redefined { at: Location, var: u32 },
    #[error("{at}: literal {lit} refers to an undefined variable")]
    Undefined { at: Location, lit: AigLit },
    #[error("{at}: unexpected end of input")]
    UnexpectedEof { at: Location },
    #[error("no safety property: the file has neither outputs nor bad states")]
    NoProperty,
    #[error("{count} properties in the {section} section, exactly one is supported")]
    MultipleProperties { section: &'static str, count: usize },
    #[error("unsupported AIGER feature: {0}")]
    Unsupported(&'static str),
}

type Result<T> = std::result::Result<T, ParseError>;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader {
            bytes,
            pos: 0,
            line: 1,
        }
    }

    fn here(&self) -> Location {
        Location {
            line: self.line,
            byte: self.pos,
        }
    }

    /// Next text line without its terminator.
    fn line(&mut self) -> Result<(Location, &'a str)> {
        let at = self.here();
        if self.pos >= self.bytes.len() {
            return Err(ParseError::UnexpectedEof { at });
        }
        let rest = &self.bytes[self.pos..];
        let len = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        let raw = &rest[..len];
        self.pos += (len + 1).min(rest.len());
        self.line += 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let text = std::str::from_utf8(raw).map_err(|_| ParseError::Syntax {
            at,
            msg: "line is not valid UTF-8".into(),
        })?;
        Ok((at, text))
    }

    fn varint(&mut self) -> Result<u32> {
        let at = self.here();
        let mut value: u64 = 0;
        let mut shift = 0;
        loop {
            let Some(&byte) = self.bytes.get(self.pos) else {
                return Err(ParseError::UnexpectedEof { at });
            };
            self.pos += 1;
            value |= u64::from(byte & 0x7f) << shift;
            if value > u64::from(u32::MAX) {
                return Err(ParseError::Syntax {
                    at,
                    msg: "delta encoding overflows 32 bits".into(),
                });
            }
            if byte & 0x80 == 0 {
                return Ok(value as u32);
            }
            shift += 7;
        }
    }
}

struct Header {
    max_var: u32,
    inputs: u32,
    latches: u32,
    outputs: u32,
    ands: u32,
    bads: u32,
}

fn parse_header(reader: &mut Reader<'_>, magic: &str) -> Result<Header> {
    let (at, text) = reader.line()?;
    let bad_header = |msg: &str| ParseError::Header {
        at,
        msg: msg.to_string(),
    };
    let mut tokens = text.split_ascii_whitespace();
    if tokens.next() != Some(magic) {
        return Err(bad_header(&format!("expected `{magic}`")));
    }
    let nums = tokens
        .map(|t| t.parse::<u32>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| bad_header("counts must be non-negative integers"))?;
    if !(5..=9).contains(&nums.len()) {
        return Err(bad_header("expected between 5 and 9 counts"));
    }
    let get = |i: usize| nums.get(i).copied().unwrap_or(0);
    if get(6) > 0 {
        return Err(ParseError::Unsupported("invariant constraints"));
    }
    if get(7) > 0 {
        return Err(ParseError::Unsupported("justice properties"));
    }
    if get(8) > 0 {
        return Err(ParseError::Unsupported("fairness constraints"));
    }
    let header = Header {
        max_var: get(0),
        inputs: get(1),
        latches: get(2),
        outputs: get(3),
        ands: get(4),
        bads: get(5),
    };
    let defined = u64::from(header.inputs) + u64::from(header.latches) + u64::from(header.ands);
    if defined > u64::from(header.max_var) {
        return Err(bad_header(
            "inputs + latches + ands exceeds the maximum variable index",
        ));
    }
    Ok(header)
}

struct Builder {
    max_lit: u64,
    defined: Vec<bool>,
}

impl Builder {
    fn new(max_var: u32) -> Self {
        let mut defined = vec![false; max_var as usize + 1];
        defined[0] = true;
        Builder {
            max_lit: 2 * u64::from(max_var) + 1,
            defined,
        }
    }

    fn literal(&self, at: Location, token: &str) -> Result<AigLit> {
        let value: u64 = token.parse().map_err(|_| ParseError::Syntax {
            at,
            msg: format!("`{token}` is not a literal"),
        })?;
        if value > self.max_lit {
            return Err(ParseError::LiteralOutOfRange {
                at,
                lit: value,
                max: self.max_lit,
            });
        }
        Ok(value as AigLit)
    }

    fn define(&mut self, at: Location, lit: AigLit, what: &str) -> Result<()> {
        if lit < 2 || lit & 1 == 1 {
            return Err(ParseError::Syntax {
                at,
                msg: format!("{what} literal {lit} must be even and non-constant"),
            });
        }
        let var = lit_var(lit);
        if std::mem::replace(&mut self.defined[var as usize], true) {
            return Err(ParseError::Redefined { at, var });
        }
        Ok(())
    }

    fn is_defined(&self, lit: AigLit) -> bool {
        self.defined[lit_var(lit) as usize]
    }
}

fn literals<'t>(
    builder: &Builder,
    at: Location,
    text: &'t str,
    min: usize,
    max: usize,
) -> Result<Vec<AigLit>> {
    let tokens: Vec<&'t str> = text.split_ascii_whitespace().collect();
    if tokens.len() < min || tokens.len() > max {
        let expected = if min == max {
            format!("{min}")
        } else {
            format!("{min} to {max}")
        };
        return Err(ParseError::Syntax {
            at,
            msg: format!("expected {expected} literals, found {}", tokens.len()),
        });
    }
    tokens.iter().map(|t| builder.literal(at, t)).collect()
}

fn reset_value(at: Location, latch: AigLit, token: Option<AigLit>) -> Result<Reset> {
    match token {
        None | Some(0) => Ok(Reset::Zero),
        Some(1) => Ok(Reset::One),
        Some(l) if l == latch => Ok(Reset::Uninit),
        Some(l) => Err(ParseError::Syntax {
            at,
            msg: format!("latch reset {l} must be 0, 1 or the latch literal"),
        }),
    }
}

/// Picks the property literal. Bad states win over outputs.
fn select_property(
    outputs: &[(Location, AigLit)],
    bads: &[(Location, AigLit)],
) -> Result<(Location, AigLit, PropertySource)> {
    let (section, list, source) = if !bads.is_empty() {
        ("bad", bads, PropertySource::Bad)
    } else {
        ("output", outputs, PropertySource::Output)
    };
    match list {
        [] => Err(ParseError::NoProperty),
        [(at, lit)] => Ok((*at, *lit, source)),
        _ => Err(ParseError::MultipleProperties {
            section,
            count: list.len(),
        }),
    }
}

type Located = Vec<(Location, AigLit)>;

fn read_properties(
    reader: &mut Reader<'_>,
    builder: &Builder,
    header: &Header,
) -> Result<(Located, Located)> {
    let mut section = |count: u32| -> Result<Located> {
        (0..count)
            .map(|_| {
                let (at, text) = reader.line()?;
                Ok((at, literals(builder, at, text, 1, 1)?[0]))
            })
            .collect()
    };
    let outputs = section(header.outputs)?;
    let bads = section(header.bads)?;
    Ok((outputs, bads))
}

fn finish(
    builder: &Builder,
    header: &Header,
    inputs: Vec<AigLit>,
    latches: Vec<(Location, Latch)>,
    ands: Vec<AndGate>,
    outputs: &[(Location, AigLit)],
    bads: &[(Location, AigLit)],
) -> Result<Aig> {
    for (at, latch) in &latches {
        if !builder.is_defined(latch.next) {
            return Err(ParseError::Undefined {
                at: *at,
                lit: latch.next,
            });
        }
    }
    let (at, bad, property_source) = select_property(outputs, bads)?;
    if !builder.is_defined(bad) {
        return Err(ParseError::Undefined { at, lit: bad });
    }
    Ok(Aig {
        max_var: header.max_var,
        inputs,
        latches: latches.into_iter().map(|(_, l)| l).collect(),
        ands,
        bad,
        property_source,
    })
}

fn parse_ascii(bytes: &[u8]) -> Result<Aig> {
    let mut reader = Reader::new(bytes);
    let header = parse_header(&mut reader, "aag")?;
    let mut builder = Builder::new(header.max_var);

    let mut inputs = Vec::with_capacity(header.inputs as usize);
    for _ in 0..header.inputs {
        let (at, text) = reader.line()?;
        let lit = literals(&builder, at, text, 1, 1)?[0];
        builder.define(at, lit, "input")?;
        inputs.push(lit);
    }

    let mut latches = Vec::with_capacity(header.latches as usize);
    for _ in 0..header.latches {
        let (at, text) = reader.line()?;
        let lits = literals(&builder, at, text, 2, 3)?;
        builder.define(at, lits[0], "latch")?;
        let reset = reset_value(at, lits[0], lits.get(2).copied())?;
        latches.push((
            at,
            Latch {
                lit: lits[0],
                next: lits[1],
                reset,
            },
        ));
    }

    let (outputs, bads) = read_properties(&mut reader, &builder, &header)?;

    let mut ands = Vec::with_capacity(header.ands as usize);
    for _ in 0..header.ands {
        let (at, text) = reader.line()?;
        let lits = literals(&builder, at, text, 3, 3)?;
        let gate = AndGate {
            lhs: lits[0],
            rhs0: lits[1],
            rhs1: lits[2],
        };
        if gate.lhs >= 2 && (!builder.is_defined(gate.rhs0) || !builder.is_defined(gate.rhs1)) {
            return Err(ParseError::AndOrder { at, lhs: gate.lhs });
        }
        builder.define(at, gate.lhs, "AND gate")?;
        ands.push(gate);
    }
    // Symbol table and comments are ignored.
    finish(&builder, &header, inputs, latches, ands, &outputs, &bads)
}

fn parse_binary(bytes: &[u8]) -> Result<Aig> {
    let mut reader = Reader::new(bytes);
    let header_at = reader.here();
    let header = parse_header(&mut reader, "aig")?;
    if header.inputs + header.latches + header.ands != header.max_var {
        return Err(ParseError::Header {
            at: header_at,
            msg: "binary files require M = I + L + A".into(),
        });
    }
    let mut builder = Builder::new(header.max_var);

    let inputs: Vec<AigLit> = (1..=header.inputs).map(|v| 2 * v).collect();
    for &lit in &inputs {
        builder.define(header_at, lit, "input")?;
    }

    let mut latches = Vec::with_capacity(header.latches as usize);
    for i in 0..header.latches {
        let (at, text) = reader.line()?;
        let lit = 2 * (header.inputs + i + 1);
        builder.define(at, lit, "latch")?;
        let lits = literals(&builder, at, text, 1, 2)?;
        let reset = reset_value(at, lit, lits.get(1).copied())?;
        latches.push((
            at,
            Latch {
                lit,
                next: lits[0],
                reset,
            },
        ));
    }

    let (outputs, bads) = read_properties(&mut reader, &builder, &header)?;

    let mut ands = Vec::with_capacity(header.ands as usize);
    for i in 0..header.ands {
        let at = reader.here();
        let lhs = 2 * (header.inputs + header.latches + i + 1);
        let delta0 = reader.varint()?;
        let delta1 = reader.varint()?;
        if delta0 == 0 || delta0 > lhs {
            return Err(ParseError::AndOrder { at, lhs });
        }
        let rhs0 = lhs - delta0;
        if delta1 > rhs0 {
            return Err(ParseError::Syntax {
                at,
                msg: format!("AND gate {lhs}: second delta {delta1} exceeds {rhs0}"),
            });
        }
        let rhs1 = rhs0 - delta1;
        builder.define(at, lhs, "AND gate")?;
        ands.push(AndGate { lhs, rhs0, rhs1 });
    }
    finish(&builder, &header, inputs, latches, ands, &outputs, &bads)
}

/// Parses and validates an AIGER file.
pub fn parse(bytes: &[u8], format: Format) -> Result<Aig> {
    let format = match format {
        Format::Auto if bytes.starts_with(b"aig") => Format::Binary,
        Format::Auto => Format::Ascii,
        f => f,
    };
    match format {
        Format::Binary => parse_binary(bytes),
        _ => parse_ascii(bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ascii(text: &str) -> Result<Aig> {
        parse(text.as_bytes(), Format::Auto)
    }

    #[test]
    fn toggle() {
        let aig = ascii("aag 1 0 1 1 0\n2 3\n2\n").unwrap();
        assert_eq!(
            aig.latches,
            vec![Latch {
                lit: 2,
                next: 3,
                reset: Reset::Zero
            }]
        );
        assert_eq!(aig.bad, 2);
        assert_eq!(aig.property_source, PropertySource::Output);
    }

    #[test]
    fn constant_false_property() {
        let aig = ascii("aag 0 0 0 1 0\n0\n").unwrap();
        assert_eq!(aig.bad, 0);
        assert!(aig.latches.is_empty());
    }

    #[test]
    fn literal_out_of_range() {
        let err = ascii("aag 1 0 1 1 0\n2 5\n2\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::LiteralOutOfRange {
                at: Location { line: 2, byte: 14 },
                lit: 5,
                max: 3
            }
        );
        assert!(err.to_string().contains("literal 5 out of range"));
    }

    #[test]
    fn bad_section_wins_over_outputs() {
        let aig = ascii("aag 2 1 1 1 0 1\n2\n4 2\n4\n5\n").unwrap();
        assert_eq!(aig.bad, 5);
        assert_eq!(aig.property_source, PropertySource::Bad);
    }

    #[test]
    fn property_count_errors() {
        assert_eq!(
            ascii("aag 1 1 0 0 0\n2\n").unwrap_err(),
            ParseError::NoProperty
        );
        assert_eq!(
            ascii("aag 1 1 0 2 0\n2\n2\n3\n").unwrap_err(),
            ParseError::MultipleProperties {
                section: "output",
                count: 2
            }
        );
        assert!(matches!(
            ascii("aag 1 1 0 0 0 2\n2\n2\n3\n").unwrap_err(),
            ParseError::MultipleProperties { section: "bad", .. }
        ));
    }

    #[test]
    fn unsupported_sections() {
        assert_eq!(
            ascii("aag 1 1 0 0 0 1 1\n2\n2\n3\n").unwrap_err(),
            ParseError::Unsupported("invariant constraints")
        );
        assert_eq!(
            ascii("aag 1 1 0 0 0 1 0 1\n2\n2\n").unwrap_err(),
            ParseError::Unsupported("justice properties")
        );
    }

    #[test]
    fn and_gates_must_be_topological() {
        let err = ascii("aag 3 1 0 1 2\n2\n6\n6 4 2\n4 2 3\n").unwrap_err();
        assert!(matches!(err, ParseError::AndOrder { lhs: 6, .. }));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(
            ascii("aag 1 x\n").unwrap_err(),
            ParseError::Header { .. }
        ));
        assert!(matches!(
            ascii("aag 1 1 1 1 1\n").unwrap_err(),
            ParseError::Header { .. }
        ));
        assert!(matches!(
            ascii("").unwrap_err(),
            ParseError::UnexpectedEof { .. }
        ));
    }

    #[test]
    fn uninitialized_reset() {
        let aig = ascii("aag 1 0 1 1 0\n2 3 2\n2\n").unwrap();
        assert_eq!(aig.latches[0].reset, Reset::Uninit);
        assert_eq!(aig.uninitialized_latches(), vec![0]);
        assert!(ascii("aag 2 0 2 1 0\n2 3 4\n4 4\n2\n").is_err());
    }

    #[test]
    fn symbols_and_comments_ignored() {
        let aig = ascii("aag 1 0 1 1 0\n2 3\n2\nl0 toggle\no0 out\nc\nanything\n").unwrap();
        assert_eq!(aig.latches.len(), 1);
    }

    #[test]
    fn binary_toggle() {
        let aig = parse(b"aig 1 0 1 1 0\n3\n2\n", Format::Auto).unwrap();
        assert_eq!(aig, ascii("aag 1 0 1 1 0\n2 3\n2\n").unwrap());
    }

    #[test]
    fn binary_rejects_zero_delta() {
        let bytes = b"aig 2 1 0 1 1\n4\n\x00\x00";
        let err = parse(bytes, Format::Binary).unwrap_err();
        assert!(matches!(err, ParseError::AndOrder { lhs: 4, .. }));
        let truncated = b"aig 2 1 0 1 1\n4\n\x02";
        assert!(matches!(
            parse(truncated, Format::Binary).unwrap_err(),
            ParseError::UnexpectedEof { .. }
        ));
    }
}
