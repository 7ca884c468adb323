//! Text formats for matrices, graphs, metrics and communities.
//!
//! * matrices and metrics: headerless CSV, one row per line;
//! * graphs: a line holding `n`, then one 1-based edge `i j` per line;
//! * abundances: comma- or newline-separated probabilities.
//!
//! Blank lines and lines starting with `#` are skipped. Errors carry the
//! 1-based line and column of the offending token.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::diversity::{Distribution, DiversityProfile, SUM_TOLERANCE};
use crate::graph::{FiniteMetric, IrreflexiveGraph, ReflexiveGraph, METRIC_TOLERANCE};
use crate::linalg::SimilarityMatrix;

/// Asymmetry up to this size is averaged away when a symmetric matrix is required.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Abundance files may miss a unit sum by this much before they are rejected.
pub const ABUNDANCE_SUM_TOLERANCE: f64 = 1e-9;

/// Abundances below this are read as exact zeros.
pub const ABUNDANCE_FLOOR: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

type ParseResult<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    /// Similarity matrix; asymmetry beyond [`SYMMETRY_TOLERANCE`] is an error.
    Matrix,
    /// Similarity matrix, possibly nonsymmetric.
    GeneralMatrix,
    /// Reflexive graph; loops in the edge list are ignored.
    Graph,
    /// Irreflexive graph; loops are rejected.
    IrreflexiveGraph,
    Metric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Matrix(SimilarityMatrix),
    Graph(ReflexiveGraph),
    IrreflexiveGraph(IrreflexiveGraph),
    Metric(FiniteMetric),
    Community {
        matrix: SimilarityMatrix,
        abundances: Distribution,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputDocument {
    pub source: Option<PathBuf>,
    pub payload: Payload,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

/// Content lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

fn split_tokens(line_no: usize, line: &str, commas_only: bool) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    let is_sep = |c: char| c == ',' || !commas_only && c.is_whitespace();
    for (idx, c) in line.char_indices().chain([(line.len(), ',')]) {
        if idx == line.len() || is_sep(c) {
            let raw = &line[start..idx];
            let trimmed = raw.trim_start();
            let lead = raw.len() - trimmed.len();
            let text = trimmed.trim_end();
            if !text.is_empty() || commas_only {
                out.push(Token {
                    text,
                    line: line_no,
                    column: start + lead + 1,
                });
            }
            start = idx + c.len_utf8();
        }
    }
    out
}

fn parse_float(tok: &Token) -> ParseResult<f64> {
    let value: f64 = tok
        .text
        .parse()
        .map_err(|_| ParseError::at(tok.line, tok.column, format!("expected a number, found {:?}", tok.text)))?;
    if !value.is_finite() {
        return Err(ParseError::at(tok.line, tok.column, format!("{} is not finite", tok.text)));
    }
    Ok(value)
}

fn parse_count(tok: &Token) -> ParseResult<usize> {
    tok.text
        .parse()
        .map_err(|_| ParseError::at(tok.line, tok.column, format!("expected a nonnegative integer, found {:?}", tok.text)))
}

struct Located {
    values: Vec<Vec<f64>>,
    /// `(line, column)` of every entry.
    positions: Vec<Vec<(usize, usize)>>,
}

impl Located {
    fn at(&self, i: usize, j: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = self.positions[i][j];
        ParseError::at(line, column, message)
    }
}

fn parse_square(text: &str) -> ParseResult<Located> {
    let mut values = Vec::new();
    let mut positions = Vec::new();
    let mut last_line = 0;
    for (line_no, line) in content_lines(text) {
        last_line = line_no;
        let tokens = split_tokens(line_no, line, true);
        let row = tokens.iter().map(parse_float).collect::<ParseResult<Vec<_>>>()?;
        if let Some(first) = values.first().map(Vec::len) {
            if row.len() != first {
                return Err(ParseError::at(
                    line_no,
                    1,
                    format!("row has {} entries, expected {first}", row.len()),
                ));
            }
        }
        positions.push(tokens.iter().map(|t| (t.line, t.column)).collect());
        values.push(row);
    }
    if values.is_empty() {
        return Err(ParseError::at(1, 1, "no matrix rows"));
    }
    let n = values.len();
    if values[0].len() != n {
        return Err(ParseError::at(
            last_line,
            1,
            format!("{n} rows of {} entries; the matrix must be square", values[0].len()),
        ));
    }
    Ok(Located { values, positions })
}

fn check_symmetry(m: &mut Located, tolerance: f64, what: &str) -> ParseResult<()> {
    let n = m.values.len();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (m.values[i][j], m.values[j][i]);
            if (a - b).abs() > tolerance {
                return Err(m.at(
                    j,
                    i,
                    format!(
                        "{what} is not symmetric: entry ({}, {}) = {b} but ({}, {}) = {a}",
                        j + 1,
                        i + 1,
                        i + 1,
                        j + 1
                    ),
                ));
            }
            if a != b {
                let mean = 0.5 * (a + b);
                m.values[i][j] = mean;
                m.values[j][i] = mean;
            }
        }
    }
    Ok(())
}

fn parse_matrix_with(text: &str, symmetric: bool) -> ParseResult<SimilarityMatrix> {
    let mut m = parse_square(text)?;
    let n = m.values.len();
    for i in 0..n {
        for j in 0..n {
            let v = m.values[i][j];
            if v < 0.0 {
                return Err(m.at(i, j, format!("negative similarity {v}")));
            }
            if i == j && v <= 0.0 {
                return Err(m.at(i, j, format!("diagonal entry {v} must be positive")));
            }
        }
    }
    if symmetric {
        check_symmetry(&mut m, SYMMETRY_TOLERANCE, "matrix")?;
    }
    SimilarityMatrix::from_rows(&m.values).map_err(|e| ParseError::at(1, 1, e.to_string()))
}

/// A symmetric similarity matrix.
pub fn parse_matrix(text: &str) -> ParseResult<SimilarityMatrix> {
    parse_matrix_with(text, true)
}

/// A similarity matrix that need not be symmetric.
pub fn parse_general_matrix(text: &str) -> ParseResult<SimilarityMatrix> {
    parse_matrix_with(text, false)
}

pub fn parse_metric(text: &str) -> ParseResult<FiniteMetric> {
    let mut m = parse_square(text)?;
    let n = m.values.len();
    for i in 0..n {
        for j in 0..n {
            let v = m.values[i][j];
            if v < 0.0 {
                return Err(m.at(i, j, format!("negative distance {v}")));
            }
            if i == j && v > METRIC_TOLERANCE {
                return Err(m.at(i, j, format!("self-distance {v} must be zero")));
            }
        }
    }
    check_symmetry(&mut m, METRIC_TOLERANCE, "distance matrix")?;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if m.values[i][k] > m.values[i][j] + m.values[j][k] + METRIC_TOLERANCE {
                    return Err(m.at(
                        i,
                        k,
                        format!(
                            "triangle inequality fails through point {}: d({}, {}) > d({}, {}) + d({}, {})",
                            j + 1,
                            i + 1,
                            k + 1,
                            i + 1,
                            j + 1,
                            j + 1,
                            k + 1
                        ),
                    ));
                }
            }
        }
    }
    FiniteMetric::from_rows(&m.values).map_err(|e| ParseError::at(1, 1, e.to_string()))
}

fn parse_edges(text: &str, loops_allowed: bool) -> ParseResult<(usize, Vec<(usize, usize)>)> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines.next().ok_or_else(|| ParseError::at(1, 1, "missing vertex count"))?;
    let tokens = split_tokens(header_line, header, false);
    if tokens.len() != 1 {
        return Err(ParseError::at(header_line, 1, "header must hold the vertex count alone"));
    }
    let n = parse_count(&tokens[0])?;
    if n == 0 {
        return Err(ParseError::at(header_line, tokens[0].column, "graph has no vertices"));
    }
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let tokens = split_tokens(line_no, line, false);
        if tokens.len() != 2 {
            return Err(ParseError::at(
                line_no,
                1,
                format!("expected an edge \"i j\", found {} fields", tokens.len()),
            ));
        }
        let mut ends = [0; 2];
        for (end, tok) in ends.iter_mut().zip(&tokens) {
            let v = parse_count(tok)?;
            if v == 0 || v > n {
                return Err(ParseError::at(
                    tok.line,
                    tok.column,
                    format!("vertex {v} outside 1..={n}"),
                ));
            }
            *end = v - 1;
        }
        if ends[0] == ends[1] && !loops_allowed {
            return Err(ParseError::at(line_no, tokens[0].column, format!("loop at vertex {}", ends[0] + 1)));
        }
        edges.push((ends[0], ends[1]));
    }
    Ok((n, edges))
}

pub fn parse_graph(text: &str) -> ParseResult<ReflexiveGraph> {
    let (n, edges) = parse_edges(text, true)?;
    ReflexiveGraph::new(n, edges).map_err(|e| ParseError::at(1, 1, e.to_string()))
}

pub fn parse_irreflexive_graph(text: &str) -> ParseResult<IrreflexiveGraph> {
    let (n, edges) = parse_edges(text, false)?;
    IrreflexiveGraph::new(n, edges).map_err(|e| ParseError::at(1, 1, e.to_string()))
}

/// Relative abundances for `n` species.
///
/// Entries below [`ABUNDANCE_FLOOR`] become zero. The total must be within
/// [`ABUNDANCE_SUM_TOLERANCE`] of 1; totals off by more than
/// [`SUM_TOLERANCE`] are renormalized.
pub fn parse_abundances(text: &str, n: usize) -> ParseResult<Distribution> {
    let mut values = Vec::new();
    let mut last = (1, 1);
    for (line_no, line) in content_lines(text) {
        for tok in split_tokens(line_no, line, false) {
            let v = parse_float(&tok)?;
            if v < 0.0 {
                return Err(ParseError::at(tok.line, tok.column, format!("negative abundance {v}")));
            }
            last = (tok.line, tok.column);
            values.push(if v < ABUNDANCE_FLOOR { 0.0 } else { v });
        }
    }
    if values.len() != n {
        return Err(ParseError::at(
            last.0,
            last.1,
            format!("{} abundances for {n} species", values.len()),
        ));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > ABUNDANCE_SUM_TOLERANCE {
        return Err(ParseError::at(last.0, last.1, format!("abundances sum to {total}, not 1")));
    }
    if (total - 1.0).abs() > SUM_TOLERANCE {
        for v in &mut values {
            *v /= total;
        }
    }
    Ok(Distribution::from_probs_unchecked(values))
}

/// A possibly nonsymmetric matrix together with abundances on its species.
pub fn parse_community(matrix_text: &str, abundance_text: &str) -> ParseResult<(SimilarityMatrix, Distribution)> {
    let z = parse_general_matrix(matrix_text)?;
    let p = parse_abundances(abundance_text, z.n())?;
    Ok((z, p))
}

pub fn parse_input(text: &str, kind: InputKind) -> ParseResult<InputDocument> {
    let payload = match kind {
        InputKind::Matrix => Payload::Matrix(parse_matrix(text)?),
        InputKind::GeneralMatrix => Payload::Matrix(parse_general_matrix(text)?),
        InputKind::Graph => Payload::Graph(parse_graph(text)?),
        InputKind::IrreflexiveGraph => Payload::IrreflexiveGraph(parse_irreflexive_graph(text)?),
        InputKind::Metric => Payload::Metric(parse_metric(text)?),
    };
    Ok(InputDocument { source: None, payload })
}

fn emit_rows(rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-tripping decimal for every entry, so parsing gives back the
/// same bits.
pub fn emit_matrix(z: &SimilarityMatrix) -> String {
    emit_rows(z.rows().into_iter())
}

pub fn emit_metric(d: &FiniteMetric) -> String {
    emit_rows(d.rows().into_iter())
}

fn emit_edges(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> String {
    let mut out = format!("{n}\n");
    for (i, j) in edges {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

pub fn emit_graph(g: &ReflexiveGraph) -> String {
    emit_edges(g.n(), g.edges())
}

pub fn emit_irreflexive_graph(x: &IrreflexiveGraph) -> String {
    emit_edges(x.n(), x.edges())
}

pub fn emit_abundances(p: &Distribution) -> String {
    emit_rows(std::iter::once(p.probs().to_vec()))
}

/// `q,value` rows with `inf` for the infinite order, values at full precision.
pub fn emit_profile_csv(profile: &DiversityProfile) -> String {
    let mut out = String::from("q,value\n");
    for (q, v) in profile.iter() {
        let _ = writeln!(out, "{q},{v}");
    }
    out
}

/// Inverse of the emitters: the text form of `payload` in its own format.
/// Communities emit as `(matrix, abundances)`.
pub fn emit_payload(payload: &Payload) -> (String, Option<String>) {
    match payload {
        Payload::Matrix(z) => (emit_matrix(z), None),
        Payload::Graph(g) => (emit_graph(g), None),
        Payload::IrreflexiveGraph(x) => (emit_irreflexive_graph(x), None),
        Payload::Metric(d) => (emit_metric(d), None),
        Payload::Community { matrix, abundances } => (emit_matrix(matrix), Some(emit_abundances(abundances))),
    }
}
