//! Plain-text hypergraph format.
//!
//! ```text
//! # comment lines start with '#'
//! n k m
//! v1 v2 ... vk      (m lines, strictly increasing 1-based ids)
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::Hypergraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<u64>, ParseError> {
    text.split_whitespace()
        .map(|tok| tok.parse::<u64>().map_err(|_| err(line, format!("not a nonnegative integer: {tok:?}"))))
        .collect()
}

/// Parses the text format. Blank lines and `#` comments are skipped.
pub fn read_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| err(1, "missing header \"n k m\""))?;
    let nums = parse_numbers(header_line, header)?;
    let [n, k, m] = nums[..] else {
        return Err(err(header_line, format!("header must be \"n k m\", got {} fields", nums.len())));
    };
    let (n, k, m) = (n as usize, k as usize, m as usize);
    if n == 0 {
        return Err(err(header_line, "vertex count must be positive"));
    }
    if k < 2 {
        return Err(err(header_line, format!("edge size must be at least 2, got {k}")));
    }
    if n > u32::MAX as usize {
        return Err(err(header_line, "vertex count too large"));
    }

    let mut flat = Vec::with_capacity(m.saturating_mul(k).min(1 << 24));
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    for index in 0..m {
        let (line, body) = lines
            .next()
            .ok_or_else(|| err(text.lines().count().max(1), format!("expected {m} edges, found {index}")))?;
        let edge = parse_numbers(line, body)?;
        if edge.len() != k {
            return Err(err(line, format!("edge has {} vertices, expected {k}", edge.len())));
        }
        if let Some(&v) = edge.iter().find(|&&v| v == 0 || v as usize > n) {
            return Err(err(line, format!("vertex {v} out of range 1..={n}")));
        }
        if edge.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err(line, "vertex ids must be strictly increasing"));
        }
        let edge: Vec<u32> = edge.into_iter().map(|v| v as u32).collect();
        if !seen.insert(edge.clone()) {
            return Err(err(line, "duplicate edge"));
        }
        flat.extend_from_slice(&edge);
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, format!("unexpected content after {m} edges")));
    }
    Ok(Hypergraph::from_flat_unchecked(n, k, flat))
}

/// Serialises in the text format; `read_hypergraph` inverts it exactly.
pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = String::with_capacity(16 + h.m() * h.k() * 4);
    writeln!(out, "{} {} {}", h.n(), h.k(), h.m()).unwrap();
    for e in h.edges() {
        for (i, v) in e.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}
