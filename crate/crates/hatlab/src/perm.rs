//! Permutation algebra: parity, cycle-notation parsing, breadth-first group
//! closure, and orbit expansion of assignment sets under a position action.
//!
//! Permutations act on the 1-based points `1..=degree`. Cycle notation follows
//! the usual convention: `(2 4)(3 5)` swaps 2 with 4 and 3 with 5. Digits in a
//! cycle may be written without separators (`(24)(35)`); multi-digit points
//! require spaces.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::space::AssignmentSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image of length {0} is not a bijection on 1..={0}")]
    NotBijection(usize),
    #[error("degree {0} exceeds the supported maximum of 255")]
    DegreeTooLarge(usize),
    #[error("point {point} appears twice in cycle notation")]
    RepeatedElement { point: u64 },
    #[error("point {point} is out of range 1..={degree}")]
    OutOfRange { point: u64, degree: usize },
    #[error("malformed cycle notation: {0}")]
    Malformed(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("a group element moves position {position}, outside the {len} tuple positions")]
    ActionEscapesTuple { position: usize, len: usize },
}

/// Parity of a permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn xor(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(self) -> bool {
        self == Parity::Even
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// A permutation of `1..=degree` in one-line form: `image[i-1]` is the image
/// of point `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Permutation {
        Permutation {
            image: (1..=degree as u8).collect(),
        }
    }

    /// Builds a permutation from its one-line image, rejecting non-bijections.
    pub fn from_image(image: Vec<u8>) -> Result<Permutation, PermError> {
        let m = image.len();
        if m > 255 {
            return Err(PermError::DegreeTooLarge(m));
        }
        let mut seen = vec![false; m + 1];
        for &v in &image {
            if v == 0 || v as usize > m || seen[v as usize] {
                return Err(PermError::NotBijection(m));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { image })
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    /// Image of `point` (1-based). Points beyond the degree are fixed, so a
    /// permutation acts on any larger domain as well.
    pub fn apply(&self, point: usize) -> usize {
        if point >= 1 && point <= self.image.len() {
            self.image[point - 1] as usize
        } else {
            point
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    /// Composition applying `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composition degree mismatch");
        Permutation {
            image: self.image.iter().map(|&v| other.image[v as usize - 1]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u8; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v as usize - 1] = (i + 1) as u8;
        }
        Permutation { image }
    }

    /// Parity from the cycle decomposition: even iff `degree - #cycles` is even.
    pub fn parity(&self) -> Parity {
        let m = self.degree();
        let mut seen = vec![false; m + 1];
        let mut cycles = 0usize;
        for start in 1..=m {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.apply(p);
            }
        }
        if (m - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Nontrivial cycles, each starting at its smallest point, ordered by
    /// that point.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let m = self.degree();
        let mut seen = vec![false; m + 1];
        let mut out = Vec::new();
        for start in 1..=m {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p as u8);
                p = self.apply(p);
            }
            out.push(cycle);
        }
        out
    }

    /// Parses a product of disjoint cycles over `1..=degree`.
    ///
    /// Whitespace and commas separate points; a cycle with no separators is
    /// read one digit per point, so `(24)(35)` and `(2 4)(3 5)` agree. Fixed
    /// points may be omitted; empty text or `()` is the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, PermError> {
        if degree > 255 {
            return Err(PermError::DegreeTooLarge(degree));
        }
        let mut cycles: Vec<Vec<u64>> = Vec::new();
        let mut current: Option<(Vec<String>, bool)> = None; // (tokens, saw_separator)
        let mut token = String::new();

        let flush = |token: &mut String, tokens: &mut Vec<String>| {
            if !token.is_empty() {
                tokens.push(std::mem::take(token));
            }
        };

        for ch in text.chars() {
            match ch {
                '(' => {
                    if current.is_some() {
                        return Err(PermError::Malformed("nested '('".into()));
                    }
                    current = Some((Vec::new(), false));
                }
                ')' => match current.take() {
                    None => return Err(PermError::Malformed("unbalanced ')'".into())),
                    Some((mut tokens, saw_sep)) => {
                        flush(&mut token, &mut tokens);
                        let points = if saw_sep {
                            tokens
                                .iter()
                                .map(|t| {
                                    t.parse::<u64>().map_err(|_| {
                                        PermError::Malformed(format!("bad number '{t}'"))
                                    })
                                })
                                .collect::<Result<Vec<_>, _>>()?
                        } else {
                            // no separators: one digit per point
                            tokens
                                .iter()
                                .flat_map(|t| t.chars())
                                .map(|c| c.to_digit(10).unwrap() as u64)
                                .collect()
                        };
                        cycles.push(points);
                    }
                },
                c if c.is_whitespace() || c == ',' => {
                    if let Some((tokens, saw_sep)) = current.as_mut() {
                        flush(&mut token, tokens);
                        *saw_sep = true;
                    }
                }
                c if c.is_ascii_digit() => match current.as_mut() {
                    Some(_) => token.push(c),
                    None => {
                        return Err(PermError::Malformed(format!(
                            "digit '{c}' outside parentheses"
                        )))
                    }
                },
                c => return Err(PermError::Malformed(format!("unexpected character '{c}'"))),
            }
        }
        if current.is_some() {
            return Err(PermError::Malformed("unbalanced '('".into()));
        }

        let mut image: Vec<u8> = (1..=degree as u8).collect();
        let mut seen = vec![false; degree + 1];
        for cycle in &cycles {
            for &p in cycle {
                if p == 0 || p as usize > degree {
                    return Err(PermError::OutOfRange { point: p, degree });
                }
                if seen[p as usize] {
                    return Err(PermError::RepeatedElement { point: p });
                }
                seen[p as usize] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                image[p as usize - 1] = next as u8;
            }
        }
        Ok(Permutation { image })
    }
}

impl fmt::Display for Permutation {
    /// Disjoint-cycle form; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[deg={}, {}]", self.degree(), self)
    }
}

/// A permutation group given by generators, with its full element set from
/// breadth-first closure.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Elements in sorted one-line order; the identity is always present.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn trivial(degree: usize) -> PermGroup {
        group_closure(degree, &[]).expect("trivial group")
    }
}

/// Breadth-first closure of `generators` inside the symmetric group of the
/// given degree. The result contains the identity and is closed under
/// composition (and hence, the group being finite, under inverse).
pub fn group_closure(degree: usize, generators: &[Permutation]) -> Result<PermGroup, PermError> {
    for g in generators {
        if g.degree() != degree {
            return Err(PermError::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
    }
    let mut elements = BTreeSet::new();
    let mut queue = VecDeque::new();
    let id = Permutation::identity(degree);
    elements.insert(id.clone());
    queue.push_back(id);
    while let Some(g) = queue.pop_front() {
        for h in generators {
            let f = g.then(h);
            if elements.insert(f.clone()) {
                queue.push_back(f);
            }
        }
    }
    Ok(PermGroup {
        degree,
        generators: generators.to_vec(),
        elements: elements.into_iter().collect(),
    })
}

/// Parses a semicolon-separated list of generators in cycle notation.
pub fn parse_generators(text: &str, degree: usize) -> Result<Vec<Permutation>, PermError> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Permutation::parse_cycles(s, degree))
        .collect()
}

/// Expands `seeds` to the union of their images under `group`, acting on
/// positions: `(g · x)[i] = x[g⁻¹(i)]`.
///
/// The group degree may exceed the tuple length only if every element fixes
/// the excess positions pointwise.
pub fn orbit_expand(seeds: &AssignmentSet, group: &PermGroup) -> Result<AssignmentSet, PermError> {
    let n = seeds.params().n;
    for g in group.elements() {
        for position in n + 1..=group.degree() {
            if g.apply(position) != position {
                return Err(PermError::ActionEscapesTuple { position, len: n });
            }
        }
    }
    let mut members = Vec::with_capacity(seeds.len() * group.order());
    for g in group.elements() {
        let inv = g.inverse();
        for x in seeds.iter() {
            let colors = x.colors();
            let image: Vec<u8> = (1..=n).map(|i| colors[inv.apply(i) - 1]).collect();
            members.push(image);
        }
    }
    let provenance = format!("orbit({}, |G|={})", seeds.provenance(), group.order());
    AssignmentSet::from_color_rows(seeds.params(), members, provenance)
        .map_err(|e| PermError::Malformed(format!("orbit produced an invalid assignment: {e}")))
}
