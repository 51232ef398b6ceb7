//! Text formats: series files, pair files, and input-signal specifications.
//!
//! Series format (UTF-8, line oriented): `#` starts a comment, a `degree N`
//! header is required before any term, and each term line is
//! `<rational> <word>` with the `p`, `-p`, `p/q` rational syntax and the
//! `1` / `x0x1...` word syntax. Repeated words sum; words longer than the
//! declared degree are dropped, matching series construction.
//!
//! Pair format: two series sections headed `[e1]` and `[e2]`, each with its
//! own `degree N` header; both sections must declare the same degree.
//!
//! Serialization is canonical (graded lexicographic term order, reduced
//! rationals), so parse(serialize(x)) = x bit-exactly.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::pair::{AffinePair, TangentPair};
use crate::rational::{ParseRationalError, Rational};
use crate::series::TruncatedSeries;
use crate::sim::{Grid, Signal};
use crate::words::{Word, MAX_WORD_LEN};

/// A parse error with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct FormatError {
    pub line: usize,
    pub kind: FormatErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatErrorKind {
    #[error("missing 'degree N' header before terms")]
    MissingDegree,
    #[error("malformed degree header (expected 'degree N')")]
    BadDegree,
    #[error("duplicate degree header")]
    DuplicateDegree,
    #[error("degree exceeds the storage cap {max}")]
    DegreeTooLarge { max: usize },
    #[error("malformed term line (expected '<rational> <word>')")]
    BadTerm,
    #[error("malformed rational: {0}")]
    BadRational(ParseRationalError),
    #[error("malformed word (expected '1' or a run of 'x0'/'x1')")]
    BadWord,
    #[error("expected section header '{expected}'")]
    MissingSection { expected: &'static str },
    #[error("unexpected content after the '[e2]' section")]
    TrailingSection,
    #[error("sections declare different degrees")]
    MismatchedDegrees,
    #[error("multiplicative component must have constant term 1")]
    NotInGroup,
    #[error("tangent first component must have constant term 0")]
    NotTangent,
}

fn err(line: usize, kind: FormatErrorKind) -> FormatError {
    FormatError { line, kind }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

struct SeriesBuilder {
    degree: Option<(usize, usize)>, // (declared degree, header line)
    terms: Vec<(Rational, Word)>,
}

impl SeriesBuilder {
    fn new() -> Self {
        SeriesBuilder {
            degree: None,
            terms: Vec::new(),
        }
    }

    fn feed(&mut self, line_no: usize, content: &str) -> Result<(), FormatError> {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens[0] == "degree" {
            if self.degree.is_some() {
                return Err(err(line_no, FormatErrorKind::DuplicateDegree));
            }
            if tokens.len() != 2 {
                return Err(err(line_no, FormatErrorKind::BadDegree));
            }
            let degree: usize = tokens[1]
                .parse()
                .map_err(|_| err(line_no, FormatErrorKind::BadDegree))?;
            if degree > MAX_WORD_LEN {
                return Err(err(
                    line_no,
                    FormatErrorKind::DegreeTooLarge { max: MAX_WORD_LEN },
                ));
            }
            self.degree = Some((degree, line_no));
            return Ok(());
        }
        if self.degree.is_none() {
            return Err(err(line_no, FormatErrorKind::MissingDegree));
        }
        if tokens.len() != 2 {
            return Err(err(line_no, FormatErrorKind::BadTerm));
        }
        let coeff = Rational::from_str(tokens[0])
            .map_err(|e| err(line_no, FormatErrorKind::BadRational(e)))?;
        let word =
            Word::from_str(tokens[1]).map_err(|_| err(line_no, FormatErrorKind::BadWord))?;
        self.terms.push((coeff, word));
        Ok(())
    }

    fn finish(self, eof_line: usize) -> Result<TruncatedSeries, FormatError> {
        let (degree, _) = self
            .degree
            .ok_or_else(|| err(eof_line, FormatErrorKind::MissingDegree))?;
        Ok(TruncatedSeries::from_terms(self.terms, degree))
    }
}

/// Parse the series text format.
pub fn parse_series_str(text: &str) -> Result<TruncatedSeries, FormatError> {
    let mut builder = SeriesBuilder::new();
    let mut lines = 0;
    for (idx, raw) in text.lines().enumerate() {
        lines = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        builder.feed(lines, content)?;
    }
    builder.finish(lines + 1)
}

/// Parse the two-section pair text format into raw components.
pub fn parse_pair_str(
    text: &str,
) -> Result<(TruncatedSeries, TruncatedSeries, usize), FormatError> {
    // returns (first, second, line number of the [e1] header) for diagnostics
    let mut sections: Vec<(SeriesBuilder, usize)> = Vec::new();
    let mut lines = 0;
    for (idx, raw) in text.lines().enumerate() {
        lines = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        match content {
            "[e1]" => {
                if !sections.is_empty() {
                    return Err(err(lines, FormatErrorKind::TrailingSection));
                }
                sections.push((SeriesBuilder::new(), lines));
            }
            "[e2]" => match sections.len() {
                0 => {
                    return Err(err(
                        lines,
                        FormatErrorKind::MissingSection { expected: "[e1]" },
                    ))
                }
                1 => sections.push((SeriesBuilder::new(), lines)),
                _ => return Err(err(lines, FormatErrorKind::TrailingSection)),
            },
            _ => match sections.last_mut() {
                None => {
                    return Err(err(
                        lines,
                        FormatErrorKind::MissingSection { expected: "[e1]" },
                    ))
                }
                Some((builder, _)) => builder.feed(lines, content)?,
            },
        }
    }
    if sections.len() != 2 {
        let expected = if sections.is_empty() { "[e1]" } else { "[e2]" };
        return Err(err(lines + 1, FormatErrorKind::MissingSection { expected }));
    }
    let (second_builder, e2_line) = sections.pop().expect("two sections");
    let (first_builder, e1_line) = sections.pop().expect("two sections");
    let first = first_builder.finish(e2_line)?;
    let second = second_builder.finish(lines + 1)?;
    if first.degree() != second.degree() {
        return Err(err(e2_line, FormatErrorKind::MismatchedDegrees));
    }
    Ok((first, second, e1_line))
}

/// Parse a pair file and enforce the affine group membership c1(1) = 1.
pub fn parse_affine_pair_str(text: &str) -> Result<AffinePair, FormatError> {
    let (first, second, e1_line) = parse_pair_str(text)?;
    AffinePair::new(first, second).map_err(|_| err(e1_line, FormatErrorKind::NotInGroup))
}

/// Parse a pair file as a tangent vector, enforcing a proper first component.
pub fn parse_tangent_pair_str(text: &str) -> Result<TangentPair, FormatError> {
    let (first, second, e1_line) = parse_pair_str(text)?;
    TangentPair::new(first, second).map_err(|_| err(e1_line, FormatErrorKind::NotTangent))
}

/// Canonical series serialization: `degree N` then one term per line in
/// graded lexicographic order.
pub fn serialize_series(series: &TruncatedSeries) -> String {
    let mut out = format!("degree {}\n", series.degree());
    for (word, coeff) in series.terms() {
        out.push_str(&format!("{coeff} {word}\n"));
    }
    out
}

fn serialize_sections(first: &TruncatedSeries, second: &TruncatedSeries) -> String {
    format!(
        "[e1]\n{}[e2]\n{}",
        serialize_series(first),
        serialize_series(second)
    )
}

pub fn serialize_affine_pair(pair: &AffinePair) -> String {
    serialize_sections(pair.first(), pair.second())
}

pub fn serialize_tangent_pair(pair: &TangentPair) -> String {
    serialize_sections(pair.first(), pair.second())
}

/// An input-signal specification: `const:<a>`, `sin:<amp>:<freq_hz>`, or
/// `csv:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    Const(f64),
    Sine { amplitude: f64, freq_hz: f64 },
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignalSpecError {
    #[error("unknown signal kind (expected const:, sin:, or csv:)")]
    UnknownKind,
    #[error("malformed numeric field")]
    BadNumber,
    #[error("empty csv path")]
    EmptyPath,
}

fn parse_finite(s: &str) -> Result<f64, SignalSpecError> {
    let value: f64 = s.parse().map_err(|_| SignalSpecError::BadNumber)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SignalSpecError::BadNumber)
    }
}

impl FromStr for SignalSpec {
    type Err = SignalSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("const:") {
            return Ok(SignalSpec::Const(parse_finite(rest)?));
        }
        if let Some(rest) = s.strip_prefix("sin:") {
            let (amp, freq) = rest.split_once(':').ok_or(SignalSpecError::BadNumber)?;
            return Ok(SignalSpec::Sine {
                amplitude: parse_finite(amp)?,
                freq_hz: parse_finite(freq)?,
            });
        }
        if let Some(rest) = s.strip_prefix("csv:") {
            if rest.is_empty() {
                return Err(SignalSpecError::EmptyPath);
            }
            return Ok(SignalSpec::Csv(PathBuf::from(rest)));
        }
        Err(SignalSpecError::UnknownKind)
    }
}

impl SignalSpec {
    /// Materialize the signal on a grid, reading the file for `csv:` specs.
    pub fn realize(&self, grid: Grid) -> Result<Signal, FileError> {
        match self {
            SignalSpec::Const(a) => Ok(Signal::constant(grid, *a)),
            SignalSpec::Sine { amplitude, freq_hz } => {
                Ok(Signal::sine(grid, *amplitude, *freq_hz))
            }
            SignalSpec::Csv(path) => {
                let text = read_file(path)?;
                parse_signal_csv(&text, grid).map_err(|e| FileError::Format {
                    path: path.display().to_string(),
                    err: e,
                })
            }
        }
    }
}

/// Parse a two-column `t,value` CSV signal; the time column must match the
/// grid sample points. A literal `t,value` header row is permitted.
pub fn parse_signal_csv(text: &str, grid: Grid) -> Result<Signal, FormatError> {
    let mut values = Vec::with_capacity(grid.len());
    let tolerance = 1e-9 * grid.t_max().max(1.0);
    let mut expected_index = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line_no == 1 && line == "t,value" {
            continue;
        }
        let (t_str, v_str) = line
            .split_once(',')
            .ok_or_else(|| err(line_no, FormatErrorKind::BadTerm))?;
        let t: f64 = t_str
            .trim()
            .parse()
            .map_err(|_| err(line_no, FormatErrorKind::BadTerm))?;
        let v: f64 = v_str
            .trim()
            .parse()
            .map_err(|_| err(line_no, FormatErrorKind::BadTerm))?;
        if !t.is_finite() || !v.is_finite() {
            return Err(err(line_no, FormatErrorKind::BadTerm));
        }
        if expected_index >= grid.len() || (t - grid.time(expected_index)).abs() > tolerance {
            return Err(err(line_no, FormatErrorKind::BadTerm));
        }
        values.push(v);
        expected_index += 1;
    }
    if values.len() != grid.len() {
        return Err(err(
            text.lines().count() + 1,
            FormatErrorKind::BadTerm,
        ));
    }
    Ok(Signal::new(grid, values))
}

/// A file-level error: I/O failure or a format error with its path.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {err}")]
    Io {
        path: String,
        #[source]
        err: std::io::Error,
    },
    #[error("{path}: {err}")]
    Format {
        path: String,
        #[source]
        err: FormatError,
    },
}

fn read_file(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|err| FileError::Io {
        path: path.display().to_string(),
        err,
    })
}

fn wrap_format(path: &Path) -> impl FnOnce(FormatError) -> FileError + '_ {
    move |err| FileError::Format {
        path: path.display().to_string(),
        err,
    }
}

pub fn parse_series_file(path: &Path) -> Result<TruncatedSeries, FileError> {
    parse_series_str(&read_file(path)?).map_err(wrap_format(path))
}

pub fn parse_affine_pair_file(path: &Path) -> Result<AffinePair, FileError> {
    parse_affine_pair_str(&read_file(path)?).map_err(wrap_format(path))
}

pub fn parse_tangent_pair_file(path: &Path) -> Result<TangentPair, FileError> {
    parse_tangent_pair_str(&read_file(path)?).map_err(wrap_format(path))
}
