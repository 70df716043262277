//! Zero/nonzero/arbitrary pattern matrices and structured systems.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// One entry of a pattern matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternSymbol {
    /// `0`: the entry is zero in every member.
    FixedZero,
    /// `*`: the entry is nonzero in every member.
    Nonzero,
    /// `?`: the entry may take any real value, zero included.
    Arbitrary,
}

impl PatternSymbol {
    pub const ALL: [PatternSymbol; 3] = [Self::FixedZero, Self::Nonzero, Self::Arbitrary];

    pub fn as_char(self) -> char {
        match self {
            Self::FixedZero => '0',
            Self::Nonzero => '*',
            Self::Arbitrary => '?',
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "0" => Some(Self::FixedZero),
            "*" | "∗" => Some(Self::Nonzero),
            "?" => Some(Self::Arbitrary),
            _ => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Self::FixedZero
    }
}

impl fmt::Display for PatternSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A `rows × cols` grid of [`PatternSymbol`]s, stored row-major.
///
/// Indices are 0-based. Zero-column matrices exist only as the empty right block of a
/// concatenation; the text parser never produces them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<PatternSymbol>,
}

impl PatternMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<PatternSymbol>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                actual: (entries.len() / cols.max(1), cols),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn filled(rows: usize, cols: usize, symbol: PatternSymbol) -> Self {
        Self {
            rows,
            cols,
            entries: vec![symbol; rows * cols],
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> PatternSymbol,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> PatternSymbol {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: PatternSymbol) {
        self.entries[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> &[PatternSymbol] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[PatternSymbol] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Number of non-fixed-zero entries.
    pub fn free_entries(&self) -> usize {
        self.entries.iter().filter(|s| !s.is_zero()).count()
    }

    /// `out[i][j] = self[rows[i]][cols[j]]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(rows[i], cols[j]))
    }

    /// Compact form used in JSON reports: one string per row, no separators.
    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|s| s.as_char()).collect())
            .collect()
    }
}

/// Canonical text form: single spaces between tokens, `\n` after each row.
pub fn render_pattern(m: &PatternMatrix) -> String {
    let mut out = String::with_capacity(m.rows * (2 * m.cols + 1));
    for i in 0..m.rows {
        for (j, s) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            out.push(s.as_char());
        }
        out.push('\n');
    }
    out
}

/// Parses whitespace-separated `0`/`*`/`?` tokens, one row per line.
///
/// Trailing blank lines are ignored; any other blank line is a zero-length row.
pub fn parse_pattern(text: &str) -> Result<PatternMatrix, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let used = lines
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1);
    if used == 0 {
        return Err(ParseError::EmptyInput);
    }
    let mut cols = None;
    let mut entries = Vec::new();
    for (r, line) in lines[..used].iter().enumerate() {
        let mut count = 0;
        for (c, tok) in line.split_whitespace().enumerate() {
            let s = PatternSymbol::from_token(tok)
                .ok_or_else(|| ParseError::BadToken(r, c, tok.to_string()))?;
            entries.push(s);
            count += 1;
        }
        match cols {
            None if count == 0 => return Err(ParseError::EmptyInput),
            None => cols = Some(count),
            Some(q) if q != count => return Err(ParseError::RaggedRows(r)),
            Some(_) => {}
        }
    }
    let cols = cols.unwrap_or(0);
    Ok(PatternMatrix {
        rows: used,
        cols,
        entries,
    })
}

impl FromStr for PatternMatrix {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

impl fmt::Display for PatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_pattern(self))
    }
}

/// The diagonal modification `Ā`: off-diagonal entries are kept, a zero diagonal entry
/// becomes `*` and any other diagonal entry becomes `?`.
pub fn modified_diagonal(a: &PatternMatrix) -> Result<PatternMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let mut out = a.clone();
    for i in 0..a.rows {
        let d = if a.get(i, i).is_zero() {
            PatternSymbol::Nonzero
        } else {
            PatternSymbol::Arbitrary
        };
        out.set(i, i, d);
    }
    Ok(out)
}

/// `[left right]`. The right block may have zero columns.
pub fn concat_horizontal(left: &PatternMatrix, right: &PatternMatrix) -> Result<PatternMatrix> {
    if left.rows != right.rows {
        return Err(Error::RowMismatch {
            left: left.rows,
            right: right.rows,
        });
    }
    let cols = left.cols + right.cols;
    let mut entries = Vec::with_capacity(left.rows * cols);
    for i in 0..left.rows {
        entries.extend_from_slice(left.row(i));
        entries.extend_from_slice(right.row(i));
    }
    Ok(PatternMatrix {
        rows: left.rows,
        cols,
        entries,
    })
}

/// Replaces every `*` by `?`, keeping zeros.
pub fn weak_relaxation(m: &PatternMatrix) -> PatternMatrix {
    PatternMatrix {
        rows: m.rows,
        cols: m.cols,
        entries: m
            .entries
            .iter()
            .map(|&s| match s {
                PatternSymbol::Nonzero => PatternSymbol::Arbitrary,
                other => other,
            })
            .collect(),
    }
}

/// A pair `(A, B)` with `A` square and `B` sharing its row count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuredSystem {
    a: PatternMatrix,
    b: PatternMatrix,
}

impl StructuredSystem {
    pub fn new(a: PatternMatrix, b: PatternMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        if a.rows != b.rows {
            return Err(Error::RowMismatch {
                left: a.rows,
                right: b.rows,
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &PatternMatrix {
        &self.a
    }

    pub fn b(&self) -> &PatternMatrix {
        &self.b
    }

    pub fn states(&self) -> usize {
        self.a.rows
    }

    pub fn inputs(&self) -> usize {
        self.b.cols
    }

    /// `[A B]`.
    pub fn stacked(&self) -> PatternMatrix {
        concat_horizontal(&self.a, &self.b).expect("row counts checked at construction")
    }

    /// `[Ā B]`.
    pub fn modified_stacked(&self) -> PatternMatrix {
        let abar = modified_diagonal(&self.a).expect("A is square");
        concat_horizontal(&abar, &self.b).expect("row counts checked at construction")
    }

    /// Parses a combined file whose rows read `A-row | B-row`.
    pub fn parse_combined(text: &str) -> Result<Self> {
        let mut left = String::new();
        let mut right = String::new();
        for (line_no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                left.push('\n');
                right.push('\n');
                continue;
            }
            let (l, r) = line.split_once('|').ok_or_else(|| ParseError::BadLine {
                line: line_no,
                message: "expected `A-row | B-row`".into(),
            })?;
            left.push_str(l);
            left.push('\n');
            right.push_str(r);
            right.push('\n');
        }
        let a = parse_pattern(&left)?;
        let b = parse_pattern(&right)?;
        Self::new(a, b)
    }
}
