//! Plain-text RLNC conformance vectors.
//!
//! One vector per line, five whitespace-separated fields:
//!
//! ```text
//! w m coefficients payloads expected
//! ```
//!
//! Matrix fields list rows separated by `:`; each row is its elements
//! concatenated as lowercase hex, `ceil(w / 4)` digits per element.
//! `expected` is the recovered source rows, or `singular`. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;

use rand::Rng;
use specshape_core::rlnc::{decode_batch, Encoder, GaloisField, Symbol};
use specshape_core::RlncError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestVector {
    pub width: u32,
    pub coefficients: Vec<Vec<Symbol>>,
    pub payloads: Vec<Vec<Symbol>>,
    /// `None` when the coefficient matrix is singular.
    pub expected: Option<Vec<Vec<Symbol>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VectorError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: {source}")]
    Codec { line: usize, source: RlncError },
}

fn digits(width: u32) -> usize {
    width.div_ceil(4) as usize
}

fn format_matrix(width: u32, rows: &[Vec<Symbol>]) -> String {
    let d = digits(width);
    let mut s = String::new();
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            s.push(':');
        }
        for x in row {
            write!(s, "{x:0d$x}").unwrap();
        }
    }
    s
}

fn parse_matrix(width: u32, text: &str) -> Result<Vec<Vec<Symbol>>, String> {
    let d = digits(width);
    text.split(':')
        .map(|row| {
            if row.is_empty() || row.len() % d != 0 || !row.is_ascii() {
                return Err(format!("row {row:?} is not a multiple of {d} hex digits"));
            }
            (0..row.len() / d)
                .map(|i| {
                    let cell = &row[i * d..(i + 1) * d];
                    let x = u32::from_str_radix(cell, 16).map_err(|e| format!("{cell:?}: {e}"))?;
                    if x >= 1 << width {
                        return Err(format!("element {cell} outside GF(2^{width})"));
                    }
                    Ok(x as Symbol)
                })
                .collect()
        })
        .collect()
}

impl TestVector {
    pub fn batch_size(&self) -> usize {
        self.coefficients.len()
    }

    pub fn to_line(&self) -> String {
        let w = self.width;
        format!(
            "{w} {} {} {} {}",
            self.batch_size(),
            format_matrix(w, &self.coefficients),
            format_matrix(w, &self.payloads),
            self.expected.as_ref().map_or("singular".into(), |e| format_matrix(w, e)),
        )
    }

    fn parse(line_no: usize, line: &str) -> Result<Self, VectorError> {
        let err = |reason: String| VectorError::Parse { line: line_no, reason };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [w, m, coeffs, payloads, expected] = fields[..] else {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        };
        let width: u32 = w.parse().map_err(|_| err(format!("bad width {w:?}")))?;
        GaloisField::new(width).map_err(|e| err(e.to_string()))?;
        let m: usize = m.parse().map_err(|_| err(format!("bad batch size {m:?}")))?;
        let coefficients = parse_matrix(width, coeffs).map_err(err)?;
        let payloads = parse_matrix(width, payloads).map_err(err)?;
        let expected = match expected {
            "singular" => None,
            e => Some(parse_matrix(width, e).map_err(err)?),
        };
        if coefficients.len() != m || coefficients.iter().any(|r| r.len() != m) {
            return Err(err(format!("coefficients are not {m} x {m}")));
        }
        if payloads.len() != m || expected.as_ref().is_some_and(|e| e.len() != m) {
            return Err(err(format!("expected {m} payload rows")));
        }
        Ok(Self {
            width,
            coefficients,
            payloads,
            expected,
        })
    }

    /// Decodes the payloads and reports whether the result matches.
    pub fn check(&self) -> Result<bool, RlncError> {
        let field = GaloisField::new(self.width)?;
        Ok(decode_batch(&field, &self.coefficients, &self.payloads)? == self.expected)
    }
}

/// `(line number, vector)` for every vector in `text`.
pub fn parse_vectors(text: &str) -> Result<Vec<(usize, TestVector)>, VectorError> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(n, l)| TestVector::parse(n, l).map(|v| (n, v)))
        .collect()
}

/// Random vectors over every supported width, batch sizes 1 to 4 and
/// payloads of `len` symbols. Small fields produce singular cases.
pub fn generate<R: Rng + ?Sized>(count: usize, len: usize, rng: &mut R) -> Vec<TestVector> {
    const WIDTHS: [u32; 4] = [1, 4, 8, 16];
    (0..count)
        .map(|i| {
            let width = WIDTHS[i % WIDTHS.len()];
            let field = GaloisField::new(width).expect("supported width");
            let m = rng.random_range(1..=4);
            let enc = Encoder::random_batch(field.clone(), m, len, rng);
            let pkts: Vec<_> = (0..m).map(|_| enc.encode(rng)).collect();
            let coefficients: Vec<_> = pkts.iter().map(|p| p.coefficients.clone()).collect();
            let payloads: Vec<_> = pkts.into_iter().map(|p| p.payload).collect();
            let expected = decode_batch(&field, &coefficients, &payloads)
                .expect("well-formed batch")
                .map(|_| enc.sources().to_vec());
            TestVector {
                width,
                coefficients,
                payloads,
                expected,
            }
        })
        .collect()
}
