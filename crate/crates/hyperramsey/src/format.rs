//! The `tc3` coloring file format and the `r2` table format.
//!
//! A `tc3` file starts with one header line. Explicit colorings follow it with one hex digit
//! per triple in colex order, 64 digits per line:
//!
//! ```text
//! tc3 1 explicit N=5 l=2
//! 0110100101
//! ```
//!
//! Implicit colorings consist of the header alone and round-trip as generator specs:
//!
//! ```text
//! tc3 1 implicit N=512 l=2 gen=blockmix seed=3 params=m:4
//! ```

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use hyperramsey_core::gen::{GeneratorKind, GeneratorSpec};
use hyperramsey_core::math::choose3;
use hyperramsey_core::model::{Backing, ColorId, ModelError, PackedColors, TripleColoring};
use hyperramsey_core::oracle::R2Table;

pub const FORMAT_VERSION: u32 = 1;
const DIGITS_PER_LINE: u64 = 64;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported format version {found} (this build reads version {FORMAT_VERSION})")]
    VersionMismatch { found: String },
    #[error("truncated payload: expected {expected} digits, found {found}")]
    TruncatedPayload { expected: u64, found: u64 },
    #[error("bad payload digit {byte:?} at byte offset {offset}")]
    BadDigit { offset: u64, byte: char },
    #[error("color {color} at byte offset {offset} is out of range for {colors} colors")]
    DigitOutOfRange { offset: u64, color: u32, colors: u32 },
    #[error("unexpected data after the payload at byte offset {offset}")]
    TrailingData { offset: u64 },
    #[error("line {line}: {reason}")]
    MalformedTable { line: usize, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Storage written to a `tc3` file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Implicit colorings as their spec, explicit ones as a payload.
    Native,
    /// Always a payload, evaluating implicit colorings triple by triple.
    Explicit,
}

pub fn header(coloring: &TripleColoring, layout: Layout) -> String {
    let (n, l) = (coloring.n_vertices(), coloring.n_colors());
    match (coloring.backing(), layout) {
        (Backing::Implicit(spec), Layout::Native) => {
            let params: Vec<String> = spec.params().iter().map(|(k, v)| format!("{k}:{v}")).collect();
            format!(
                "tc3 {FORMAT_VERSION} implicit N={n} l={l} gen={} seed={} params={}",
                spec.name(),
                spec.seed,
                params.join(",")
            )
        }
        _ => format!("tc3 {FORMAT_VERSION} explicit N={n} l={l}"),
    }
}

pub fn write_to(coloring: &TripleColoring, layout: Layout, out: &mut impl Write) -> Result<(), FormatError> {
    writeln!(out, "{}", header(coloring, layout))?;
    if matches!((coloring.backing(), layout), (Backing::Implicit(_), Layout::Native)) {
        return Ok(());
    }
    let total = choose3(coloring.n_vertices() as u64);
    if total > 1 << 40 {
        return Err(ModelError::TooLarge { triples: total }.into());
    }
    let mut line = Vec::with_capacity(DIGITS_PER_LINE as usize + 1);
    let n = coloring.n_vertices();
    for k in 2..n {
        for j in 1..k {
            for i in 0..j {
                line.push(hex_digit(coloring.color_sorted(i, j, k).0));
                if line.len() as u64 == DIGITS_PER_LINE {
                    line.push(b'\n');
                    out.write_all(&line)?;
                    line.clear();
                }
            }
        }
    }
    if !line.is_empty() {
        line.push(b'\n');
        out.write_all(&line)?;
    }
    Ok(())
}

pub fn to_bytes(coloring: &TripleColoring, layout: Layout) -> Result<Vec<u8>, FormatError> {
    let mut buf = Vec::new();
    write_to(coloring, layout, &mut buf)?;
    Ok(buf)
}

pub fn write_coloring(coloring: &TripleColoring, layout: Layout, path: &Path) -> Result<(), FormatError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_to(coloring, layout, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_coloring(path: &Path) -> Result<TripleColoring, FormatError> {
    parse(&std::fs::read(path)?)
}

fn hex_digit(c: u8) -> u8 {
    b"0123456789abcdef"[c as usize]
}

struct Header {
    explicit: bool,
    n: u32,
    colors: u32,
    spec: Option<GeneratorSpec>,
}

fn malformed(reason: impl Into<String>) -> FormatError {
    FormatError::MalformedHeader(reason.into())
}

fn parse_header(line: &str) -> Result<Header, FormatError> {
    let mut tokens = line.split(' ');
    if tokens.next() != Some("tc3") {
        return Err(malformed("missing tc3 magic"));
    }
    let version = tokens.next().ok_or_else(|| malformed("missing version"))?;
    if version != FORMAT_VERSION.to_string() {
        if version.parse::<u32>().is_ok() {
            return Err(FormatError::VersionMismatch { found: version.to_string() });
        }
        return Err(malformed(format!("version {version:?} is not a number")));
    }
    let explicit = match tokens.next() {
        Some("explicit") => true,
        Some("implicit") => false,
        other => return Err(malformed(format!("unknown storage kind {other:?}"))),
    };
    let wanted: &[&str] = if explicit { &["N", "l"] } else { &["N", "l", "gen", "seed", "params"] };
    let mut values: Vec<&str> = Vec::with_capacity(wanted.len());
    for key in wanted {
        let token = tokens.next().ok_or_else(|| malformed(format!("missing {key}=")))?;
        let value = token
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| malformed(format!("expected {key}=, found {token:?}")))?;
        values.push(value);
    }
    if let Some(extra) = tokens.next() {
        return Err(malformed(format!("unexpected field {extra:?}")));
    }
    let number = |key: &str, v: &str| v.parse::<u64>().map_err(|_| malformed(format!("{key}={v:?} is not a number")));
    let n = number("N", values[0])?;
    let colors = number("l", values[1])?;
    let n = u32::try_from(n).map_err(|_| malformed(format!("N={n} is too large")))?;
    let colors = u32::try_from(colors).map_err(|_| malformed(format!("l={colors} is too large")))?;
    let spec = if explicit {
        None
    } else {
        let seed = number("seed", values[3])?;
        Some(parse_spec(values[2], seed, values[4])?)
    };
    Ok(Header { explicit, n, colors, spec })
}

/// Builds a spec from a generator name, seed and `k:v,..` parameter list.
pub fn parse_spec(name: &str, seed: u64, params: &str) -> Result<GeneratorSpec, FormatError> {
    let mut pairs = Vec::new();
    for item in params.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once(':').ok_or_else(|| malformed(format!("parameter {item:?} is not k:v")))?;
        let v: u64 = v.parse().map_err(|_| malformed(format!("parameter {k} value {v:?} is not a number")))?;
        pairs.push((k, v));
    }
    let take = |key: &str| -> Result<u64, FormatError> {
        match pairs.as_slice() {
            [(k, v)] if *k == key => Ok(*v),
            _ => Err(malformed(format!("generator {name} takes exactly the parameter {key}"))),
        }
    };
    let kind = match name {
        "uniform" if pairs.is_empty() => GeneratorKind::Uniform,
        "uniform" => return Err(malformed("generator uniform takes no parameters")),
        "constant" => GeneratorKind::Constant {
            color: u8::try_from(take("color")?).map_err(|_| malformed("color out of range"))?,
        },
        "blockmix" => GeneratorKind::Blockmix {
            blocks: u32::try_from(take("m")?).map_err(|_| malformed("m out of range"))?,
        },
        other => return Err(malformed(format!("unknown generator {other:?}"))),
    };
    Ok(GeneratorSpec { kind, seed })
}

pub fn parse(bytes: &[u8]) -> Result<TripleColoring, FormatError> {
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| malformed("header line is not terminated"))?;
    let line = std::str::from_utf8(&bytes[..header_end]).map_err(|_| malformed("header is not UTF-8"))?;
    let h = parse_header(line.trim_end_matches('\r'))?;
    let payload_start = header_end + 1;
    if !h.explicit {
        if let Some(p) = bytes[payload_start..].iter().position(|b| !b.is_ascii_whitespace()) {
            return Err(FormatError::TrailingData { offset: (payload_start + p) as u64 });
        }
        return Ok(TripleColoring::implicit(h.n, h.colors, h.spec.expect("implicit header has a spec"))?);
    }
    // validate dimensions before allocating
    TripleColoring::constant(h.n, h.colors, ColorId(0))?;
    let expected = choose3(h.n as u64);
    let mut packed = PackedColors::zeroed(h.colors, expected);
    let mut found = 0u64;
    for (i, &byte) in bytes[payload_start..].iter().enumerate() {
        let offset = (payload_start + i) as u64;
        if byte == b'\n' || byte == b'\r' {
            continue;
        }
        if found == expected {
            if byte.is_ascii_whitespace() {
                continue;
            }
            return Err(FormatError::TrailingData { offset });
        }
        let color = (byte as char).to_digit(16).ok_or(FormatError::BadDigit { offset, byte: byte as char })?;
        if color >= h.colors {
            return Err(FormatError::DigitOutOfRange { offset, color, colors: h.colors });
        }
        packed.set(found, color as u8);
        found += 1;
    }
    if found < expected {
        return Err(FormatError::TruncatedPayload { expected, found });
    }
    Ok(TripleColoring::from_packed(h.n, h.colors, packed)?)
}

/// One line per entry: `r2 k=<int> l=<int> value=<int> proof=exhaustive seed-independent`.
pub fn r2_table_to_string(table: &R2Table) -> String {
    table
        .entries()
        .map(|(k, l, v)| format!("r2 k={k} l={l} value={v} proof=exhaustive seed-independent\n"))
        .collect()
}

pub fn parse_r2_table(text: &str) -> Result<R2Table, FormatError> {
    let mut table = R2Table::new();
    for (no, line) in text.lines().enumerate() {
        let line_no = no + 1;
        let bad = |reason: &str| FormatError::MalformedTable { line: line_no, reason: reason.to_string() };
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [tag, k, l, value, proof, scope] = tokens.as_slice() else {
            return Err(bad("expected 6 fields"));
        };
        if *tag != "r2" || *proof != "proof=exhaustive" || *scope != "seed-independent" {
            return Err(bad("expected `r2 .. proof=exhaustive seed-independent`"));
        }
        let field = |token: &str, key: &str| -> Result<u64, FormatError> {
            token
                .strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(&format!("expected {key}=<int>, found {token:?}")))
        };
        let k = u32::try_from(field(k, "k")?).map_err(|_| bad("k out of range"))?;
        let l = u32::try_from(field(l, "l")?).map_err(|_| bad("l out of range"))?;
        table.insert(k, l, field(value, "value")?);
    }
    Ok(table)
}
