//! Ordered designs, Steiner systems, and Latin squares.
//!
//! A perfect independent set in `A_{n+k,n}` is the same object as an ordered
//! design `OD_1(n-1, n, n+k)`: the set members, written as columns, induce
//! every ordered `(n-1)`-tuple of distinct values exactly once in every choice
//! of `n-1` rows. This module holds the validators for these artifacts, the
//! converters to and from assignment sets, and the two Latin-square
//! constructions used by the `n = 3` and `n = 4` strategies.
//!
//! All entries are 1-based.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use itertools::Itertools;
use thiserror::Error;

use crate::space::{AssignmentSet, Color, SpaceError, SpaceParams};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("set is not a perfect independent set: {0}")]
    NotPerfect(String),
    #[error("invalid Steiner system: {0}")]
    InvalidSystem(SteinerViolation),
    #[error("no idempotent Latin square of order {0}")]
    UnsupportedOrder(usize),
    #[error("symmetric Latin-square construction needs even k ≥ 2, got {0}")]
    OddK(usize),
    #[error("block/column/row {index} is malformed: {msg}")]
    BadShape { index: usize, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

// ---------------------------------------------------------------------------
// Ordered designs
// ---------------------------------------------------------------------------

/// An `n × C(v,t)·t!` array over `1..=v`; columns are the design's tuples.
#[derive(Debug, Clone)]
pub struct OrderedDesignArray {
    pub t: usize,
    pub n: usize,
    pub v: usize,
    columns: Vec<Vec<Color>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OdViolation {
    #[error("column {col} has a repeated entry")]
    DuplicateInColumn { col: usize },
    #[error("column count {found} ≠ v!/(v-t)! = {expected}")]
    ColumnCount { found: usize, expected: u64 },
    #[error("rows {rows:?}: ordered tuple {tuple:?} appears {count} times")]
    TupleMultiplicity { rows: Vec<usize>, tuple: Vec<Color>, count: usize },
}

impl OrderedDesignArray {
    pub fn new(
        t: usize,
        n: usize,
        v: usize,
        columns: Vec<Vec<Color>>,
    ) -> Result<OrderedDesignArray, DesignError> {
        for (i, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(DesignError::BadShape {
                    index: i,
                    msg: format!("column has {} entries, expected {n}", col.len()),
                });
            }
            if let Some(&e) = col.iter().find(|&&e| e == 0 || e as usize > v) {
                return Err(DesignError::BadShape {
                    index: i,
                    msg: format!("entry {e} out of range 1..={v}"),
                });
            }
        }
        Ok(OrderedDesignArray { t, n, v, columns })
    }

    pub fn columns(&self) -> &[Vec<Color>] {
        &self.columns
    }

    /// Checks both ordered-design properties: distinct entries per column,
    /// and — for every `t`-subset of rows — every ordered `t`-tuple of
    /// distinct values exactly once among the columns.
    pub fn validate(&self) -> Result<(), OdViolation> {
        for (i, col) in self.columns.iter().enumerate() {
            let mut sorted = col.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(OdViolation::DuplicateInColumn { col: i });
            }
        }
        let expected = falling(self.v as u64, self.t as u64);
        if self.columns.len() as u64 != expected {
            return Err(OdViolation::ColumnCount {
                found: self.columns.len(),
                expected,
            });
        }
        for rows in (0..self.n).combinations(self.t) {
            let mut counts: HashMap<Vec<Color>, usize> = HashMap::new();
            for col in &self.columns {
                let tuple: Vec<Color> = rows.iter().map(|&r| col[r]).collect();
                *counts.entry(tuple).or_insert(0) += 1;
            }
            if let Some((tuple, &count)) = counts.iter().find(|(_, &c)| c > 1) {
                return Err(OdViolation::TupleMultiplicity {
                    rows: rows.clone(),
                    tuple: tuple.clone(),
                    count,
                });
            }
            // multiplicities are all 1; completeness follows from the column
            // count, but report a concrete missing tuple if one slips through
            if (counts.len() as u64) < expected {
                let missing = ordered_tuples(self.v, self.t)
                    .into_iter()
                    .find(|tup| !counts.contains_key(tup))
                    .expect("some tuple is missing");
                return Err(OdViolation::TupleMultiplicity {
                    rows,
                    tuple: missing,
                    count: 0,
                });
            }
        }
        Ok(())
    }

    /// Interprets the columns as hat assignments for `n` prisoners and
    /// `k = v - n` extra hats.
    pub fn to_set(&self) -> Result<AssignmentSet, DesignError> {
        if self.v < self.n {
            return Err(DesignError::BadShape {
                index: 0,
                msg: format!("v={} smaller than n={}", self.v, self.n),
            });
        }
        let params = SpaceParams::new(self.n, self.v - self.n)?;
        let set = AssignmentSet::from_color_rows(
            params,
            self.columns.clone(),
            format!("od({},{},{})", self.t, self.n, self.v),
        )?;
        Ok(set)
    }

    /// Writes one array row per line, comma-separated.
    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        for r in 0..self.n {
            let row: Vec<String> = self.columns.iter().map(|c| c[r].to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Reads a CSV of array rows. `n` is the row count, `v` the largest
    /// entry, and `t` the unique value with `v!/(v-t)!` columns.
    pub fn read_from(r: impl BufRead) -> Result<OrderedDesignArray, DesignError> {
        let mut rows: Vec<Vec<Color>> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let entries: Result<Vec<Color>, _> = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<Color>().map_err(|_| DesignError::Parse {
                        line: idx + 1,
                        msg: format!("bad entry '{s}'"),
                    })
                })
                .collect();
            rows.push(entries?);
        }
        if rows.is_empty() {
            return Err(DesignError::Parse { line: 0, msg: "empty array".into() });
        }
        let cols = rows[0].len();
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(DesignError::Parse {
                line: bad + 1,
                msg: format!("row has {} entries, expected {cols}", rows[bad].len()),
            });
        }
        let n = rows.len();
        let v = rows.iter().flatten().copied().max().unwrap_or(0) as usize;
        let t = (0..=n)
            .find(|&t| falling(v as u64, t as u64) == cols as u64)
            .ok_or_else(|| DesignError::Parse {
                line: 0,
                msg: format!("column count {cols} matches no t for v={v}"),
            })?;
        let columns = (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        OrderedDesignArray::new(t, n, v, columns)
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<OrderedDesignArray, DesignError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

/// Converts a perfect independent set to its `OD_1(n-1, n, n+k)` array.
pub fn set_to_od(set: &AssignmentSet) -> Result<OrderedDesignArray, DesignError> {
    let params = set.params();
    if !set.is_perfect()? {
        return Err(DesignError::NotPerfect(format!(
            "size {} ≠ {}",
            set.len(),
            params.perfect_size()?
        )));
    }
    if let crate::space::Independence::Violation(a, b) = set.check_independent() {
        return Err(DesignError::NotPerfect(format!("adjacent members {a:?} and {b:?}")));
    }
    let columns = set.iter().map(|a| a.colors().to_vec()).collect();
    OrderedDesignArray::new(params.n - 1, params.n, params.colors(), columns)
}

fn falling(v: u64, t: u64) -> u64 {
    (0..t).map(|i| v - i).product()
}

fn ordered_tuples(v: usize, t: usize) -> Vec<Vec<Color>> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn rec(v: usize, t: usize, prefix: &mut Vec<Color>, out: &mut Vec<Vec<Color>>) {
        if prefix.len() == t {
            out.push(prefix.clone());
            return;
        }
        for e in 1..=v as Color {
            if !prefix.contains(&e) {
                prefix.push(e);
                rec(v, t, prefix, out);
                prefix.pop();
            }
        }
    }
    rec(v, t, &mut prefix, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Steiner systems
// ---------------------------------------------------------------------------

/// A Steiner system `S(t, n, m)`: `n`-subsets of `1..=m` covering every
/// `t`-subset exactly once.
#[derive(Debug, Clone)]
pub struct SteinerSystem {
    pub t: usize,
    pub n: usize,
    pub m: usize,
    blocks: Vec<Vec<Color>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinerViolation {
    #[error("{t}-subset {subset:?} is uncovered")]
    Uncovered { t: usize, subset: Vec<Color> },
    #[error("{t}-subset {subset:?} is covered {count} times")]
    CoveredTwice { t: usize, subset: Vec<Color>, count: usize },
}

impl SteinerSystem {
    /// Blocks are stored sorted; entries must be distinct and in `1..=m`.
    pub fn new(
        t: usize,
        n: usize,
        m: usize,
        blocks: Vec<Vec<Color>>,
    ) -> Result<SteinerSystem, DesignError> {
        let mut clean = Vec::with_capacity(blocks.len());
        for (i, block) in blocks.into_iter().enumerate() {
            if block.len() != n {
                return Err(DesignError::BadShape {
                    index: i,
                    msg: format!("block has {} points, expected {n}", block.len()),
                });
            }
            let mut b = block;
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) {
                return Err(DesignError::BadShape { index: i, msg: "repeated point".into() });
            }
            if b[0] == 0 || b[n - 1] as usize > m {
                return Err(DesignError::BadShape {
                    index: i,
                    msg: format!("point out of range 1..={m}"),
                });
            }
            clean.push(b);
        }
        Ok(SteinerSystem { t, n, m, blocks: clean })
    }

    pub fn blocks(&self) -> &[Vec<Color>] {
        &self.blocks
    }

    /// Exhaustively checks that every `t`-subset of `1..=m` lies in exactly
    /// one block.
    pub fn validate(&self) -> Result<(), SteinerViolation> {
        let mut counts: HashMap<Vec<Color>, usize> = HashMap::new();
        for block in &self.blocks {
            for subset in block.iter().copied().combinations(self.t) {
                *counts.entry(subset).or_insert(0) += 1;
            }
        }
        if let Some((subset, &count)) = counts.iter().find(|(_, &c)| c > 1) {
            return Err(SteinerViolation::CoveredTwice {
                t: self.t,
                subset: subset.clone(),
                count,
            });
        }
        for subset in (1..=self.m as Color).combinations(self.t) {
            if !counts.contains_key(&subset) {
                return Err(SteinerViolation::Uncovered { t: self.t, subset });
            }
        }
        Ok(())
    }

    /// One block per line, space-separated points.
    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        for block in &self.blocks {
            let row: Vec<String> = block.iter().map(|p| p.to_string()).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// Reads blocks, one per line; `n` is the block size, `m` the largest
    /// point, and `t` defaults to `n - 1`.
    pub fn read_from(r: impl BufRead) -> Result<SteinerSystem, DesignError> {
        let mut blocks: Vec<Vec<Color>> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let block: Result<Vec<Color>, _> = text
                .split_whitespace()
                .map(|s| {
                    s.parse::<Color>().map_err(|_| DesignError::Parse {
                        line: idx + 1,
                        msg: format!("bad point '{s}'"),
                    })
                })
                .collect();
            blocks.push(block?);
        }
        if blocks.is_empty() {
            return Err(DesignError::Parse { line: 0, msg: "no blocks".into() });
        }
        let n = blocks[0].len();
        let m = blocks.iter().flatten().copied().max().unwrap_or(0) as usize;
        SteinerSystem::new(n - 1, n, m, blocks)
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<SteinerSystem, DesignError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

/// Expands a valid `S(n-1, n, n+k)` into the assignment set of all `n!`
/// orderings of every block — a perfect independent set that depends only on
/// the *set* of visible colors, not on who wears what.
pub fn steiner_to_set(sys: &SteinerSystem) -> Result<AssignmentSet, DesignError> {
    if sys.t + 1 != sys.n {
        return Err(DesignError::InvalidSystem(SteinerViolation::Uncovered {
            t: sys.t,
            subset: vec![],
        }));
    }
    sys.validate().map_err(DesignError::InvalidSystem)?;
    let params = SpaceParams::new(sys.n, sys.m - sys.n)?;
    let mut rows = Vec::new();
    for block in &sys.blocks {
        for perm in block.iter().copied().permutations(sys.n) {
            rows.push(perm);
        }
    }
    let set = AssignmentSet::from_color_rows(
        params,
        rows,
        format!("steiner({},{},{})", sys.t, sys.n, sys.m),
    )?;
    Ok(set)
}

// ---------------------------------------------------------------------------
// Latin squares
// ---------------------------------------------------------------------------

/// An `m × m` array over `1..=m`; flags are recomputed by [`LatinSquare::validate`],
/// never asserted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    m: usize,
    entries: Vec<Color>, // row-major
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatinFlags {
    pub idempotent: bool,
    pub symmetric: bool,
    pub constant_diagonal: Option<Color>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatinViolation {
    #[error("row {0} is not a permutation of 1..=m")]
    Row(usize),
    #[error("column {0} is not a permutation of 1..=m")]
    Col(usize),
}

impl LatinSquare {
    pub fn from_rows(rows: Vec<Vec<Color>>) -> Result<LatinSquare, DesignError> {
        let m = rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(DesignError::BadShape {
                    index: i + 1,
                    msg: format!("row has {} entries, expected {m}", row.len()),
                });
            }
            if let Some(&e) = row.iter().find(|&&e| e == 0 || e as usize > m) {
                return Err(DesignError::BadShape {
                    index: i + 1,
                    msg: format!("entry {e} out of range 1..={m}"),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(LatinSquare { m, entries })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: Color, col: Color) -> Color {
        self.entries[(row as usize - 1) * self.m + (col as usize - 1)]
    }

    /// Checks the Latin property and computes the structural flags.
    pub fn validate(&self) -> Result<LatinFlags, LatinViolation> {
        let m = self.m;
        for r in 0..m {
            let mut seen = vec![false; m + 1];
            for c in 0..m {
                let e = self.entries[r * m + c] as usize;
                if seen[e] {
                    return Err(LatinViolation::Row(r + 1));
                }
                seen[e] = true;
            }
        }
        for c in 0..m {
            let mut seen = vec![false; m + 1];
            for r in 0..m {
                let e = self.entries[r * m + c] as usize;
                if seen[e] {
                    return Err(LatinViolation::Col(c + 1));
                }
                seen[e] = true;
            }
        }
        let idempotent = (1..=m as Color).all(|i| self.get(i, i) == i);
        let symmetric =
            (1..=m as Color).all(|i| (1..=m as Color).all(|j| self.get(i, j) == self.get(j, i)));
        let d0 = self.get(1, 1);
        let constant_diagonal =
            (1..=m as Color).all(|i| self.get(i, i) == d0).then_some(d0);
        Ok(LatinFlags { idempotent, symmetric, constant_diagonal })
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        for r in 0..self.m {
            let row: Vec<String> =
                (0..self.m).map(|c| self.entries[r * self.m + c].to_string()).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<LatinSquare, DesignError> {
        let mut rows: Vec<Vec<Color>> = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let row: Result<Vec<Color>, _> = text
                .split_whitespace()
                .map(|s| {
                    s.parse::<Color>().map_err(|_| DesignError::Parse {
                        line: idx + 1,
                        msg: format!("bad entry '{s}'"),
                    })
                })
                .collect();
            rows.push(row?);
        }
        LatinSquare::from_rows(rows)
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<LatinSquare, DesignError> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

/// Builds an idempotent Latin square of order `m ≥ 3`.
///
/// Odd orders use the affine rule `M[i,j] = (i+j)·(m+1)/2` reduced into
/// `1..=m`. Even orders place `1..m` down the diagonal, thread the symbol `m`
/// along the broken superdiagonal (leftmost slot in the penultimate row),
/// fill the bottom and right borders with rotations of `1..m-1` anchored at
/// positions `m/2 + 1` and `m/2`, and extend back-diagonals through the rest:
/// `M[i,j] = (m/2)(i+j)` reduced mod `m-1` into `1..=m-1`.
pub fn idempotent_latin(m: usize) -> Result<LatinSquare, DesignError> {
    if m <= 2 {
        return Err(DesignError::UnsupportedOrder(m));
    }
    let mut rows = vec![vec![0 as Color; m]; m];
    if m % 2 == 1 {
        let half = (m + 1) / 2; // inverse of 2 mod m
        for i in 1..=m {
            for j in 1..=m {
                rows[i - 1][j - 1] = (((half * (i + j)) - 1) % m + 1) as Color;
            }
        }
    } else {
        let h = m / 2;
        let q = m - 1;
        for i in 1..=m {
            rows[i - 1][i - 1] = i as Color;
        }
        for i in 1..=m - 2 {
            rows[i - 1][i] = m as Color;
        }
        rows[m - 2][0] = m as Color;
        for j in 1..=q {
            // bottom row: rotation of 1..=q with 1 at column h+1
            rows[m - 1][j - 1] = (((j + q) - (h + 1)) % q + 1) as Color;
        }
        for i in 1..=q {
            // right column: rotation of 1..=q with 1 at row h
            rows[i - 1][m - 1] = (((i + q) - h) % q + 1) as Color;
        }
        for i in 1..=q {
            for j in 1..=q {
                if rows[i - 1][j - 1] == 0 {
                    rows[i - 1][j - 1] = ((h * (i + j) - 1) % q + 1) as Color;
                }
            }
        }
    }
    LatinSquare::from_rows(rows)
}

/// The symmetric constant-diagonal Latin square of order `m = k + 4` used by
/// the four-prisoner strategy for even `k ≥ 2`:
/// `M[i,i] = m`, last row and column are the identity border, and otherwise
/// `M[i,j] = (k+4)/2 · (i+j)` reduced mod `k+3` into `1..=k+3`.
pub fn symmetric_latin_n4(k: usize) -> Result<LatinSquare, DesignError> {
    if k % 2 == 1 || k < 2 {
        return Err(DesignError::OddK(k));
    }
    let m = k + 4;
    let h = m / 2; // inverse of 2 mod m-1
    let q = m - 1;
    let mut rows = vec![vec![0 as Color; m]; m];
    for i in 1..=m {
        for j in 1..=m {
            rows[i - 1][j - 1] = if i == j {
                m as Color
            } else if i == m {
                j as Color
            } else if j == m {
                i as Color
            } else {
                ((h * (i + j) - 1) % q + 1) as Color
            };
        }
    }
    LatinSquare::from_rows(rows)
}
