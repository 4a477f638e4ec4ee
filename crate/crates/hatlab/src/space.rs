//! The hat-assignment space for `n` prisoners and `k` extra hats.
//!
//! A hat assignment is an ordered `n`-tuple of distinct colors drawn from
//! `1..=n+k` — a vertex of the arrangement graph `A_{n+k,n}`, whose edges join
//! tuples differing in exactly one position. An [`AssignmentSet`] is a finite
//! set of such tuples; independent sets are exactly the winning "assumed sets"
//! of deterministic guessing strategies.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::perm::Permutation;

pub type Color = u8;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("need at least one prisoner (n ≥ 1)")]
    NoPrisoners,
    #[error("space size for n={n}, k={k} exceeds 64-bit range")]
    Overflow { n: usize, k: usize },
    #[error("color {color} out of range 1..={max}")]
    ColorOutOfRange { color: u64, max: usize },
    #[error("color {0} repeated within an assignment")]
    DuplicateColor(Color),
    #[error("assignment has {found} colors, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("assignments come from mismatched spaces")]
    ParamMismatch,
    #[error("ghost order is not a permutation of the unused colors")]
    GhostMismatch,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Space parameters: `n` prisoners, `k` extra hats, colors `1..=n+k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceParams {
    pub n: usize,
    pub k: usize,
}

impl SpaceParams {
    pub fn new(n: usize, k: usize) -> Result<SpaceParams, SpaceError> {
        if n == 0 {
            return Err(SpaceError::NoPrisoners);
        }
        Ok(SpaceParams { n, k })
    }

    /// Number of hat colors, `n + k`.
    pub fn colors(&self) -> usize {
        self.n + self.k
    }

    /// Number of hat assignments, `(n+k)!/k!`.
    pub fn space_size(&self) -> Result<u64, SpaceError> {
        falling_factorial(self.colors() as u64, self.n as u64)
            .ok_or(SpaceError::Overflow { n: self.n, k: self.k })
    }

    /// Size of a perfect independent set, `(n+k)!/(k+1)!`.
    pub fn perfect_size(&self) -> Result<u64, SpaceError> {
        falling_factorial(self.colors() as u64, self.n as u64 - 1)
            .ok_or(SpaceError::Overflow { n: self.n, k: self.k })
    }

    /// Streams every assignment exactly once in lexicographic color order.
    pub fn enumerate(&self) -> Enumerate {
        Enumerate {
            colors: self.colors() as u8,
            current: Some((1..=self.n as u8).collect()),
        }
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} k={}", self.n, self.k)
    }
}

/// `m · (m-1) · … · (m-len+1)` with overflow detection.
fn falling_factorial(m: u64, len: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for i in 0..len {
        acc = acc.checked_mul(m - i)?;
    }
    Some(acc)
}

/// An ordered tuple of distinct colors; one vertex of the arrangement graph.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HatAssignment {
    colors: Vec<Color>,
}

impl HatAssignment {
    pub fn new(colors: Vec<Color>, params: SpaceParams) -> Result<HatAssignment, SpaceError> {
        let a = HatAssignment { colors };
        a.validate(params)?;
        Ok(a)
    }

    pub(crate) fn from_colors_unchecked(colors: Vec<Color>) -> HatAssignment {
        HatAssignment { colors }
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn validate(&self, params: SpaceParams) -> Result<(), SpaceError> {
        if self.colors.len() != params.n {
            return Err(SpaceError::WrongLength {
                expected: params.n,
                found: self.colors.len(),
            });
        }
        let max = params.colors();
        let mut seen = [false; 256];
        for &c in &self.colors {
            if c == 0 || c as usize > max {
                return Err(SpaceError::ColorOutOfRange { color: c as u64, max });
            }
            if seen[c as usize] {
                return Err(SpaceError::DuplicateColor(c));
            }
            seen[c as usize] = true;
        }
        Ok(())
    }

    /// The `k` colors of `1..=n+k` absent from this assignment, ascending.
    pub fn unused_colors(&self, params: SpaceParams) -> Vec<Color> {
        let mut used = [false; 256];
        for &c in &self.colors {
            used[c as usize] = true;
        }
        (1..=params.colors() as u8).filter(|&c| !used[c as usize]).collect()
    }

    /// Extends this assignment to a full `(n+k)`-permutation by appending the
    /// unused "ghost" colors in the given order.
    pub fn augment(
        &self,
        params: SpaceParams,
        ghost_order: &[Color],
    ) -> Result<Permutation, SpaceError> {
        let unused = self.unused_colors(params);
        if ghost_order.len() != unused.len() {
            return Err(SpaceError::GhostMismatch);
        }
        let mut sorted = ghost_order.to_vec();
        sorted.sort_unstable();
        if sorted != unused {
            return Err(SpaceError::GhostMismatch);
        }
        let mut image = Vec::with_capacity(params.colors());
        image.extend_from_slice(&self.colors);
        image.extend_from_slice(ghost_order);
        Ok(Permutation::from_image(image).expect("assignment plus ghosts is a bijection"))
    }

    /// Copy with position `pos` (0-based) replaced by `color`.
    pub(crate) fn substitute(&self, pos: usize, color: Color) -> HatAssignment {
        let mut colors = self.colors.clone();
        colors[pos] = color;
        HatAssignment { colors }
    }
}

impl fmt::Display for HatAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.colors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for HatAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

/// True iff the tuples differ in exactly one position.
pub fn is_adjacent(a: &HatAssignment, b: &HatAssignment) -> Result<bool, SpaceError> {
    if a.len() != b.len() {
        return Err(SpaceError::ParamMismatch);
    }
    Ok(hamming_one(a, b))
}

fn hamming_one(a: &HatAssignment, b: &HatAssignment) -> bool {
    let mut diff = 0;
    for (x, y) in a.colors.iter().zip(&b.colors) {
        if x != y {
            diff += 1;
            if diff > 1 {
                return false;
            }
        }
    }
    diff == 1
}

/// Lexicographic stream over all assignments of a space.
pub struct Enumerate {
    colors: u8,
    current: Option<Vec<Color>>,
}

impl Iterator for Enumerate {
    type Item = HatAssignment;

    fn next(&mut self) -> Option<HatAssignment> {
        let cur = self.current.take()?;
        self.current = lex_successor(&cur, self.colors);
        Some(HatAssignment { colors: cur })
    }
}

fn lex_successor(tuple: &[Color], m: u8) -> Option<Vec<Color>> {
    let n = tuple.len();
    let mut t = tuple.to_vec();
    for i in (0..n).rev() {
        let mut used = [false; 256];
        for &c in &t[..i] {
            used[c as usize] = true;
        }
        if let Some(c) = (t[i] + 1..=m).find(|&c| !used[c as usize]) {
            t[i] = c;
            used[c as usize] = true;
            for j in i + 1..n {
                let next = (1..=m).find(|&c| !used[c as usize]).expect("m ≥ n");
                t[j] = next;
                used[next as usize] = true;
            }
            return Some(t);
        }
    }
    None
}

/// Outcome of an independence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Independence {
    Independent,
    /// Two members differing in exactly one position.
    Violation(HatAssignment, HatAssignment),
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

/// A set of hat assignments for a fixed space, with exact membership.
#[derive(Debug, Clone)]
pub struct AssignmentSet {
    params: SpaceParams,
    members: BTreeSet<HatAssignment>,
    provenance: String,
}

impl AssignmentSet {
    pub fn new(
        params: SpaceParams,
        members: impl IntoIterator<Item = HatAssignment>,
        provenance: String,
    ) -> Result<AssignmentSet, SpaceError> {
        let mut set = BTreeSet::new();
        for a in members {
            a.validate(params)?;
            set.insert(a);
        }
        Ok(AssignmentSet { params, members: set, provenance })
    }

    pub fn from_color_rows(
        params: SpaceParams,
        rows: Vec<Vec<Color>>,
        provenance: String,
    ) -> Result<AssignmentSet, SpaceError> {
        Self::new(params, rows.into_iter().map(HatAssignment::from_colors_unchecked), provenance)
    }

    pub fn empty(params: SpaceParams, provenance: String) -> AssignmentSet {
        AssignmentSet { params, members: BTreeSet::new(), provenance }
    }

    pub fn params(&self) -> SpaceParams {
        self.params
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &HatAssignment) -> bool {
        self.members.contains(a)
    }

    pub fn contains_colors(&self, colors: &[Color]) -> bool {
        self.members.contains(&HatAssignment { colors: colors.to_vec() })
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &HatAssignment> {
        self.members.iter()
    }

    pub fn same_members(&self, other: &AssignmentSet) -> bool {
        self.params == other.params && self.members == other.members
    }

    /// True iff the set has size `(n+k)!/(k+1)!`.
    pub fn is_perfect(&self) -> Result<bool, SpaceError> {
        Ok(self.len() as u64 == self.params.perfect_size()?)
    }

    /// Checks pairwise non-adjacency by probing all `n·k` single-position
    /// substitutions of each member, so the cost is `O(|s|·n·k)` lookups
    /// rather than quadratic in the set size.
    pub fn check_independent(&self) -> Independence {
        let n = self.params.n;
        for a in &self.members {
            let unused = a.unused_colors(self.params);
            for pos in 0..n {
                for &c in &unused {
                    let b = a.substitute(pos, c);
                    if self.members.contains(&b) {
                        return Independence::Violation(a.clone(), b);
                    }
                }
            }
        }
        Independence::Independent
    }

    /// Writes the set file format: a `n=<n> k=<k>` header, then one
    /// assignment per line as space-separated colors.
    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "n={} k={}", self.params.n, self.params.k)?;
        for a in &self.members {
            writeln!(w, "{a}")?;
        }
        Ok(())
    }

    pub fn write_to_path(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let file = File::create(path)?;
        self.write_to(io::BufWriter::new(file))
    }

    /// Reads the set file format. Lines may use space-separated decimal
    /// colors, or — when `n+k ≤ 9` — a compact digit string, one color per
    /// character. `#` starts a comment.
    pub fn read_from(r: impl BufRead, provenance: String) -> Result<AssignmentSet, SpaceError> {
        let mut params: Option<SpaceParams> = None;
        let mut members = BTreeSet::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            match params {
                None => {
                    params = Some(parse_header(text, lineno)?);
                }
                Some(p) => {
                    let colors = parse_assignment_text(text, p, lineno)?;
                    let a = HatAssignment { colors };
                    a.validate(p).map_err(|e| SpaceError::Parse {
                        line: lineno,
                        msg: e.to_string(),
                    })?;
                    members.insert(a);
                }
            }
        }
        let params = params.ok_or(SpaceError::Parse {
            line: 0,
            msg: "missing 'n=<n> k=<k>' header".into(),
        })?;
        Ok(AssignmentSet { params, members, provenance })
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<AssignmentSet, SpaceError> {
        let provenance = path.as_ref().display().to_string();
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file), provenance)
    }
}

fn parse_header(text: &str, lineno: usize) -> Result<SpaceParams, SpaceError> {
    let err = |msg: String| SpaceError::Parse { line: lineno, msg };
    let mut n = None;
    let mut k = None;
    for token in text.split_whitespace() {
        if let Some(v) = token.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| err(format!("bad n '{v}'")))?);
        } else if let Some(v) = token.strip_prefix("k=") {
            k = Some(v.parse::<usize>().map_err(|_| err(format!("bad k '{v}'")))?);
        } else {
            return Err(err(format!("expected 'n=<n> k=<k>' header, found '{token}'")));
        }
    }
    match (n, k) {
        (Some(n), Some(k)) => SpaceParams::new(n, k)
            .map_err(|e| SpaceError::Parse { line: lineno, msg: e.to_string() }),
        _ => Err(err("header must give both n= and k=".into())),
    }
}

/// Parses one assignment in either decimal or compact digit form.
pub fn parse_assignment_text(
    text: &str,
    params: SpaceParams,
    lineno: usize,
) -> Result<Vec<Color>, SpaceError> {
    let err = |msg: String| SpaceError::Parse { line: lineno, msg };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() == params.n {
        return tokens
            .iter()
            .map(|t| t.parse::<Color>().map_err(|_| err(format!("bad color '{t}'"))))
            .collect();
    }
    if tokens.len() == 1
        && params.colors() <= 9
        && tokens[0].len() == params.n
        && tokens[0].chars().all(|c| c.is_ascii_digit())
    {
        return Ok(tokens[0].chars().map(|c| c.to_digit(10).unwrap() as Color).collect());
    }
    Err(err(format!(
        "expected {} colors (or a {}-digit string), found '{text}'",
        params.n, params.n
    )))
}
