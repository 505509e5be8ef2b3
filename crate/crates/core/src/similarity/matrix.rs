//! Precomputed similarity matrices and their plain-text file format.
//!
//! The format is the item count on the first line followed by `n` lines of
//! `n` whitespace-separated decimals.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::{SimilarityError, SimilaritySource};

/// Largest accepted `|s(i,j) - s(j,i)|` when loading a matrix.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Square, symmetric similarity matrix with unit diagonal and entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validates a row-major `n * n` buffer.
    ///
    /// Pairs that agree within [`SYMMETRY_TOLERANCE`] are replaced by their
    /// mean so lookups are exactly symmetric; diagonal entries within the same
    /// tolerance of 1 are stored as exactly 1.
    pub fn new(n: usize, mut values: Vec<f64>) -> Result<Self, SimilarityError> {
        if n == 0 {
            return Err(SimilarityError::EmptyDataset);
        }
        if values.len() != n * n {
            return Err(SimilarityError::Shape {
                line: 0,
                expected: n * n,
                got: values.len(),
            });
        }
        for row in 0..n {
            for col in 0..n {
                let value = values[row * n + col];
                if !(0.0..=1.0).contains(&value) {
                    return Err(SimilarityError::OutOfRange { row, col, value });
                }
            }
        }
        for row in 0..n {
            let value = values[row * n + row];
            if (value - 1.0).abs() > SYMMETRY_TOLERANCE {
                return Err(SimilarityError::Diagonal { row, value });
            }
            values[row * n + row] = 1.0;
        }
        for row in 0..n {
            for col in (row + 1)..n {
                let upper = values[row * n + col];
                let lower = values[col * n + row];
                if (upper - lower).abs() > SYMMETRY_TOLERANCE {
                    return Err(SimilarityError::Asymmetric {
                        row,
                        col,
                        upper,
                        lower,
                    });
                }
                let mean = 0.5 * (upper + lower);
                values[row * n + col] = mean;
                values[col * n + row] = mean;
            }
        }
        Ok(Self { n, values })
    }

    /// Evaluates every pair of `source` once, in parallel.
    pub fn from_source<S: SimilaritySource + ?Sized>(source: &S) -> Self {
        let n = source.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| source.similarity(i, j)).collect())
            .collect();
        let mut values = vec![1.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            for (offset, v) in row.into_iter().enumerate() {
                let j = i + 1 + offset;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.n).unwrap();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }
}

impl SimilaritySource for SimilarityMatrix {
    fn len(&self) -> usize {
        self.n
    }

    fn similarity(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

pub fn parse_similarity_matrix(text: &str) -> Result<SimilarityMatrix, SimilarityError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(SimilarityError::Parse {
        line: 1,
        message: "missing item count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| SimilarityError::Parse {
        line,
        message: format!("invalid item count {header:?}"),
    })?;
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line, content) in lines {
        if rows == n {
            return Err(SimilarityError::Shape {
                line,
                expected: 0,
                got: content.split_whitespace().count(),
            });
        }
        let start = values.len();
        for tok in content.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| SimilarityError::Parse {
                line,
                message: format!("invalid number {tok:?}"),
            })?;
            values.push(v);
        }
        let got = values.len() - start;
        if got != n {
            return Err(SimilarityError::Shape {
                line,
                expected: n,
                got,
            });
        }
        rows += 1;
    }
    if rows != n {
        return Err(SimilarityError::Shape {
            line: rows + 2,
            expected: n,
            got: 0,
        });
    }
    SimilarityMatrix::new(n, values)
}

pub fn load_similarity_matrix(path: impl AsRef<Path>) -> Result<SimilarityMatrix, SimilarityError> {
    let text = std::fs::read_to_string(path)?;
    parse_similarity_matrix(&text)
}
