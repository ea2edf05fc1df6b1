//! Dense row-major square matrices and their plain-text form.
//!
//! Text layout: one row per line, whitespace-separated entries. Distances
//! use `inf` for a missing edge, predecessor entries use `null` for absence
//! and zero-based vertex indices otherwise. Blank lines and lines starting
//! with `#` are ignored when parsing.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("line {line}: expected {expected} entries, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} rows, found {found}")]
    NotSquare { expected: usize, found: usize },
    #[error("line {line}: cannot parse entry `{token}`")]
    BadEntry { line: usize, token: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type DistMatrix = SquareMatrix<f64>;
pub type PredMatrix = SquareMatrix<Option<usize>>;

impl<T: Clone> SquareMatrix<T> {
    pub fn filled(n: usize, value: T) -> Self {
        Self {
            n,
            data: vec![value; n * n],
        }
    }
}

impl<T> SquareMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::RaggedRow {
                    line: i + 1,
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        // chunks(0) panics, so special-case the empty matrix
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        &mut self.data[i * self.n + j]
    }
}

fn format_weight(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn parse_weight(token: &str) -> Option<f64> {
    match token {
        "inf" | "Inf" | "INF" | "∞" => Some(f64::INFINITY),
        _ => token.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

fn parse_grid<T>(
    text: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<SquareMatrix<T>, MatrixError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                parse(tok).ok_or_else(|| MatrixError::BadEntry {
                    line: lineno + 1,
                    token: tok.to_string(),
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        let expected = *width.get_or_insert(row.len());
        if row.len() != expected {
            return Err(MatrixError::RaggedRow {
                line: lineno + 1,
                expected,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    if let Some(w) = width {
        if w != rows.len() {
            return Err(MatrixError::NotSquare {
                expected: w,
                found: rows.len(),
            });
        }
    }
    SquareMatrix::from_rows(rows)
}

impl DistMatrix {
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        parse_grid(text, parse_weight)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|&v| format_weight(v)).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    /// Rows as JSON-friendly values: numbers, or `"inf"` for infinity.
    pub fn to_json_rows(&self) -> Vec<Vec<serde_json::Value>> {
        self.rows()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        if v.is_finite() {
                            serde_json::json!(v)
                        } else {
                            serde_json::json!(format_weight(v))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl PredMatrix {
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        parse_grid(text, |tok| match tok {
            "null" | "∅" | "-" => Some(None),
            _ => tok.parse::<usize>().ok().map(Some),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row
                .iter()
                .map(|p| p.map_or_else(|| "null".to_string(), |k| k.to_string()))
                .collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_inf() {
        let m = DistMatrix::parse("# header\n0 5\n\ninf 0\n").unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m[(0, 1)], 5.0);
        assert_eq!(m[(1, 0)], f64::INFINITY);
        assert_eq!(m.to_text(), "0 5\ninf 0\n");
    }

    #[test]
    fn rejects_ragged_and_non_square() {
        assert!(matches!(
            DistMatrix::parse("0 1\n0\n"),
            Err(MatrixError::RaggedRow { line: 2, .. })
        ));
        assert!(matches!(
            DistMatrix::parse("0 1\n"),
            Err(MatrixError::NotSquare { .. })
        ));
        assert!(matches!(
            DistMatrix::parse("0 x\n1 0"),
            Err(MatrixError::BadEntry { .. })
        ));
        assert!(DistMatrix::parse("0 nan\n1 0").is_err());
    }

    #[test]
    fn empty_text_is_empty_matrix() {
        let m = DistMatrix::parse("").unwrap();
        assert_eq!(m.n(), 0);
        assert_eq!(m.to_text(), "");
        assert_eq!(m.rows().count(), 0);
    }

    #[test]
    fn pred_text_round_trip() {
        let p = PredMatrix::parse("null 0\n1 null\n").unwrap();
        assert_eq!(p[(0, 1)], Some(0));
        assert_eq!(p[(0, 0)], None);
        assert_eq!(PredMatrix::parse(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn fractional_weights_keep_precision() {
        let m = DistMatrix::from_rows(vec![vec![0.0, 0.1 + 0.2], vec![-1.5, 0.0]]).unwrap();
        assert_eq!(DistMatrix::parse(&m.to_text()).unwrap(), m);
    }
}
