//! Text formats for circuits and sample sets, and the binary distribution dump.
//!
//! Circuit text:
//!
//! ```text
//! qubits <n>
//! seed <u64>
//! <layer> U <qubit> <re00> <im00> <re01> <im01> <re10> <im10> <re11> <im11>
//! <layer> CZ <q1> <q2>
//! <layer> X <qubit>
//! ```
//!
//! Sample set text: `n <n> k <k> distinct <0|1>` followed by one bitstring
//! per line, most significant qubit first. In both formats tokens are
//! whitespace separated and everything after `#` is ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::str::FromStr;

use xeblab_core::{Circuit, Complex64, Gate, Layer, OutputDistribution, SampleSet};

use crate::error::{FileError, ParseError};

/// Non-empty lines with comments stripped, paired with their 1-based number.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn number<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::at(line, format!("invalid {what} {token:?}")))
}

fn keyword<'t, 'a>(line: usize, tokens: &'t [&'a str], key: &str, arity: usize) -> Result<&'t [&'a str], ParseError> {
    if tokens.first() != Some(&key) {
        return Err(ParseError::at(line, format!("expected `{key}`")));
    }
    if tokens.len() != arity + 1 {
        return Err(ParseError::at(line, format!("`{key}` takes {arity} value(s), got {}", tokens.len() - 1)));
    }
    Ok(&tokens[1..])
}

pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {}\nseed {}\n", c.n(), c.seed());
    for (index, layer) in c.layers().iter().enumerate() {
        for gate in layer.gates() {
            match gate {
                Gate::Unitary { qubit, matrix } => {
                    let _ = write!(out, "{index} U {qubit}");
                    for entry in matrix {
                        let _ = write!(out, " {:.16e} {:.16e}", entry.re, entry.im);
                    }
                    out.push('\n');
                }
                Gate::Cz(a, b) => {
                    let _ = writeln!(out, "{index} CZ {a} {b}");
                }
                Gate::X(q) => {
                    let _ = writeln!(out, "{index} X {q}");
                }
            }
        }
    }
    out
}

/// Parses the circuit text format. Layer indices may skip values or appear
/// out of order; gates are grouped by index and empty layers vanish.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = content_lines(text);
    let (line, tokens) = lines.next().ok_or_else(|| ParseError::at(1, "missing `qubits` header"))?;
    let n: usize = number(line, keyword(line, &tokens, "qubits", 1)?[0], "qubit count")?;
    let (line, tokens) = lines.next().ok_or_else(|| ParseError::at(line + 1, "missing `seed` header"))?;
    let seed: u64 = number(line, keyword(line, &tokens, "seed", 1)?[0], "seed")?;

    let mut layers: BTreeMap<usize, Vec<Gate>> = BTreeMap::new();
    for (line, tokens) in lines {
        let index: usize = number(line, tokens[0], "layer index")?;
        let kind = tokens.get(1).copied().unwrap_or("");
        let args = tokens.get(2..).unwrap_or(&[]);
        let expect = |count: usize| {
            if args.len() == count {
                Ok(())
            } else {
                Err(ParseError::at(line, format!("{kind} gate takes {count} values, got {}", args.len())))
            }
        };
        let qubit = |token: &str| -> Result<usize, ParseError> {
            let q: usize = number(line, token, "qubit")?;
            if q >= n {
                return Err(ParseError::at(line, format!("qubit {q} out of range for {n} qubits")));
            }
            Ok(q)
        };
        let gate = match kind {
            "U" => {
                expect(9)?;
                let mut values = [0.0f64; 8];
                for (v, token) in values.iter_mut().zip(&args[1..]) {
                    *v = number(line, token, "matrix entry")?;
                }
                let matrix: [Complex64; 4] = core::array::from_fn(|i| Complex64::new(values[2 * i], values[2 * i + 1]));
                Gate::Unitary { qubit: qubit(args[0])?, matrix }
            }
            "CZ" => {
                expect(2)?;
                Gate::Cz(qubit(args[0])?, qubit(args[1])?)
            }
            "X" => {
                expect(1)?;
                Gate::X(qubit(args[0])?)
            }
            other => return Err(ParseError::at(line, format!("unknown gate {other:?}"))),
        };
        layers.entry(index).or_default().push(gate);
    }
    Ok(Circuit::new(n, seed, layers.into_values().map(Layer::new).collect())?)
}

fn bitstring(z: u64, n: usize) -> String {
    (0..n).rev().map(|q| if z >> q & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn serialize_samples(s: &SampleSet) -> String {
    let mut out = format!("n {} k {} distinct {}\n", s.n(), s.k(), u8::from(s.distinct()));
    for &z in s.samples() {
        out.push_str(&bitstring(z, s.n()));
        out.push('\n');
    }
    out
}

pub fn parse_samples(text: &str) -> Result<SampleSet, ParseError> {
    let mut lines = content_lines(text);
    let (line, tokens) = lines.next().ok_or_else(|| ParseError::at(1, "missing `n <n> k <k> distinct <0|1>` header"))?;
    if tokens.len() != 6 || tokens[0] != "n" || tokens[2] != "k" || tokens[4] != "distinct" {
        return Err(ParseError::at(line, "expected `n <n> k <k> distinct <0|1>`"));
    }
    let n: usize = number(line, tokens[1], "qubit count")?;
    let k: usize = number(line, tokens[3], "sample count")?;
    let distinct = match tokens[5] {
        "0" => false,
        "1" => true,
        other => return Err(ParseError::at(line, format!("distinct must be 0 or 1, got {other:?}"))),
    };
    if n == 0 || n > 63 {
        return Err(ParseError::at(line, format!("qubit count must be in 1..=63, got {n}")));
    }
    let mut samples = Vec::with_capacity(k.min(1 << 20));
    let mut last = line;
    for (line, tokens) in lines {
        last = line;
        let [bits] = tokens[..] else {
            return Err(ParseError::at(line, "expected a single bitstring"));
        };
        if bits.len() != n || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(ParseError::at(line, format!("expected {n} binary digits, got {bits:?}")));
        }
        samples.push(u64::from_str_radix(bits, 2).expect("validated binary digits"));
    }
    if samples.len() != k {
        return Err(ParseError::at(last, format!("header declares {k} samples but {} follow", samples.len())));
    }
    Ok(SampleSet::new(n, samples, distinct)?)
}

/// Writes `n` as a little-endian u64 followed by `2^n` little-endian f64s.
pub fn write_distribution(dist: &OutputDistribution, mut w: impl Write) -> io::Result<()> {
    w.write_all(&(dist.n() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(dist.probs().len() * 8);
    for p in dist.probs() {
        buf.extend_from_slice(&p.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

pub fn read_distribution(mut r: impl Read) -> Result<OutputDistribution, ParseError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| ParseError::at(0, e.to_string()))?;
    let header: [u8; 8] = bytes.get(..8).and_then(|h| h.try_into().ok()).ok_or_else(|| ParseError::at(0, "missing 8-byte header"))?;
    let n = u64::from_le_bytes(header);
    if n == 0 || n > 40 {
        return Err(ParseError::at(0, format!("unsupported qubit count {n}")));
    }
    let body = &bytes[8..];
    if body.len() as u64 != 8u64 << n {
        return Err(ParseError::at(0, format!("expected {} probabilities, found {} bytes", 1u64 << n, body.len())));
    }
    let probs = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    Ok(OutputDistribution::new(n as usize, probs)?)
}

pub fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| FileError::io(path, e))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), FileError> {
    fs::write(path, contents).map_err(|e| FileError::io(path, e))
}

pub fn load_circuit(path: &Path) -> Result<Circuit, FileError> {
    parse_circuit(&read_text(path)?).map_err(|source| FileError::Parse { path: path.into(), source })
}

pub fn load_samples(path: &Path) -> Result<SampleSet, FileError> {
    parse_samples(&read_text(path)?).map_err(|source| FileError::Parse { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_put_the_top_qubit_first() {
        assert_eq!(bitstring(0b0011, 4), "0011");
        assert_eq!(bitstring(1, 1), "1");
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let c = parse_circuit("# header\nqubits 2   # two\n\nseed 9\n0 X 1 # flip\n").unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.seed(), 9);
        assert_eq!(c.final_not_mask(), Some(0b10));
    }

    #[test]
    fn layer_gaps_are_closed() {
        let c = parse_circuit("qubits 2\nseed 0\n5 X 0\n2 CZ 0 1\n").unwrap();
        assert_eq!(c.layers().len(), 2);
        assert_eq!(c.layers()[0].gates(), &[Gate::Cz(0, 1)]);
    }
}
