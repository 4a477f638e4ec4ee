//! Deterministic guessing strategies as membership predicates.
//!
//! Every strategy is a total predicate over hat assignments: the prisoners
//! agree to assume the true assignment lies in the predicate's "assumed set".
//! When that set is independent in the arrangement graph, each prisoner's
//! color is uniquely determined whenever the assumption holds, so the win
//! probability equals the set's density. [`StrategySpec::generate`]
//! materializes the assumed set by filtering the enumerated space.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::datasets;
use crate::designs::{idempotent_latin, symmetric_latin_n4, DesignError, LatinSquare};
use crate::perm::Parity;
use crate::space::{AssignmentSet, HatAssignment, SpaceError, SpaceParams};

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("strategy {name} is undefined for n={n}, k={k}: {reason}")]
    Undefined { name: String, n: usize, k: usize, reason: String },
    #[error("unknown strategy '{0}'")]
    UnknownSpec(String),
    #[error("bad strategy parameter: {0}")]
    BadParam(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// Parameters of the mod-t strategy for `k ≥ 2` extra hats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModTParams {
    /// Modulus; the default is `⌊k²/2⌋`.
    pub t: u64,
    /// Target residue of the unused-color sum, in `0..t`.
    pub sigma: u64,
}

/// Parameters of the deletion-code strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppendixParams {
    /// Width `B` of the allowed top-bit window; also the modulus of the
    /// bit-sum condition. Defaults to `⌈2·log₂ k⌉` (at least 1).
    pub window: u32,
    /// Target residue of the bit sum, in `0..window`.
    pub r_sum: u32,
    /// Target residue of the ascent-position sum, in `0..=k`.
    pub r_pos: u32,
}

/// Default window width `⌈2·log₂ k⌉`, clamped to at least 1.
pub fn default_window(k: usize) -> u32 {
    ceil_log2((k as u64).saturating_mul(k as u64)).max(1)
}

fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// 0-based index of the highest bit on which `u` and `v` differ.
pub fn bit_diff(u: u64, v: u64) -> u32 {
    debug_assert_ne!(u, v);
    63 - (u ^ v).leading_zeros()
}

#[derive(Debug, Clone)]
pub enum StrategyKind {
    /// k=1: the augmented permutation is even.
    ParityK1,
    /// k=2: the color sum is `residue` mod n+2.
    ModularK2 { residue: u64 },
    /// k≥2: unused colors distinct mod t, even augmented permutation with
    /// ghosts in ascending residue order, unused sum ≡ sigma mod t.
    ModT(ModTParams),
    /// Alias of `ModT { t: 2, sigma: 1 }`.
    DoubleParity,
    /// n=2: pairs `(c, (c mod (k+2)) + 1)`.
    CyclicN2,
    /// n=3, k=2: third color is `3(a+b) mod 5`.
    AffineN3K2,
    /// n=3, even k: third color is `(a+b)(k+4)/2 mod (k+3)`.
    N3EvenK,
    /// n=3, odd k: third color read from an idempotent Latin square.
    N3OddK { square: LatinSquare },
    /// n=4, even k: `M[a,b] = M[c,d]` in a symmetric constant-diagonal square.
    N4EvenK { square: LatinSquare },
    /// Membership in an explicitly loaded assignment set.
    Dataset { id: String, members: AssignmentSet },
    /// The deletion-code strategy over the unused colors' bit sequence.
    AppendixCode(AppendixParams),
}

/// A named, parameterized, validated strategy over a fixed space.
#[derive(Debug, Clone)]
pub struct StrategySpec {
    kind: StrategyKind,
    space: SpaceParams,
    warnings: Vec<String>,
}

fn undefined(name: &str, space: SpaceParams, reason: impl Into<String>) -> StrategyError {
    StrategyError::Undefined {
        name: name.into(),
        n: space.n,
        k: space.k,
        reason: reason.into(),
    }
}

impl StrategySpec {
    pub fn parity_k1(n: usize) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(n, 1)?;
        Ok(StrategySpec { kind: StrategyKind::ParityK1, space, warnings: vec![] })
    }

    /// The modular sum strategy for k=2. Without an override, the residue is
    /// 1 when `n ≡ 2 (mod 4)` and 0 otherwise.
    pub fn modular_k2(n: usize, residue: Option<u64>) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(n, 2)?;
        let default = if n % 4 == 2 { 1 } else { 0 };
        let residue = residue.unwrap_or(default);
        let modulus = (n + 2) as u64;
        if residue >= modulus {
            return Err(undefined(
                "modular_k2",
                space,
                format!("residue {residue} not below the modulus {modulus}"),
            ));
        }
        Ok(StrategySpec { kind: StrategyKind::ModularK2 { residue }, space, warnings: vec![] })
    }

    /// The mod-t strategy. Any `t ≥ 1` is accepted, but `t < k` leaves the
    /// predicate constantly false (the k unused colors cannot be pairwise
    /// distinct mod t), which is reported as a warning rather than an error.
    pub fn mod_t(n: usize, k: usize, t: u64, sigma: u64) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(n, k)?;
        if k < 2 {
            return Err(undefined("mod_t", space, "needs k ≥ 2"));
        }
        if t == 0 {
            return Err(undefined("mod_t", space, "modulus t must be ≥ 1"));
        }
        if sigma >= t {
            return Err(undefined("mod_t", space, format!("sigma {sigma} not below t {t}")));
        }
        let mut warnings = vec![];
        if t < k as u64 {
            warnings.push(format!(
                "t={t} < k={k}: the {k} unused colors can never be pairwise distinct mod {t}, \
                 so the assumed set is empty"
            ));
        }
        Ok(StrategySpec { kind: StrategyKind::ModT(ModTParams { t, sigma }), space, warnings })
    }

    pub fn double_parity(n: usize) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(n, 2)?;
        Ok(StrategySpec { kind: StrategyKind::DoubleParity, space, warnings: vec![] })
    }

    pub fn cyclic_n2(k: usize) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(2, k)?;
        Ok(StrategySpec { kind: StrategyKind::CyclicN2, space, warnings: vec![] })
    }

    pub fn affine_n3_k2() -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(3, 2)?;
        Ok(StrategySpec { kind: StrategyKind::AffineN3K2, space, warnings: vec![] })
    }

    pub fn n3_even_k(k: usize) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(3, k)?;
        if k % 2 != 0 || k == 0 {
            return Err(undefined("n3_even_k", space, "needs even k ≥ 2"));
        }
        Ok(StrategySpec { kind: StrategyKind::N3EvenK, space, warnings: vec![] })
    }

    pub fn n3_odd_k(k: usize) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(3, k)?;
        if k % 2 != 1 {
            return Err(undefined("n3_odd_k", space, "needs odd k"));
        }
        let square = idempotent_latin(k + 3)?;
        Ok(StrategySpec { kind: StrategyKind::N3OddK { square }, space, warnings: vec![] })
    }

    pub fn n4_even_k(k: usize) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(4, k)?;
        if k % 2 != 0 || k == 0 {
            return Err(undefined("n4_even_k", space, "needs even k ≥ 2"));
        }
        let square = symmetric_latin_n4(k)?;
        Ok(StrategySpec { kind: StrategyKind::N4EvenK { square }, space, warnings: vec![] })
    }

    pub fn dataset(id: impl Into<String>, members: AssignmentSet) -> StrategySpec {
        let space = members.params();
        StrategySpec {
            kind: StrategyKind::Dataset { id: id.into(), members },
            space,
            warnings: vec![],
        }
    }

    pub fn appendix(
        n: usize,
        k: usize,
        window: Option<u32>,
        r_sum: u32,
        r_pos: u32,
    ) -> Result<StrategySpec, StrategyError> {
        let space = SpaceParams::new(n, k)?;
        if k == 0 {
            return Err(undefined("appendix_code", space, "needs k ≥ 1"));
        }
        let window = window.unwrap_or_else(|| default_window(k));
        if window == 0 {
            return Err(undefined("appendix_code", space, "window B must be ≥ 1"));
        }
        if r_sum >= window {
            return Err(undefined(
                "appendix_code",
                space,
                format!("r_sum {r_sum} not below B {window}"),
            ));
        }
        if r_pos as usize > k {
            return Err(undefined(
                "appendix_code",
                space,
                format!("r_pos {r_pos} not below k+1 = {}", k + 1),
            ));
        }
        Ok(StrategySpec {
            kind: StrategyKind::AppendixCode(AppendixParams { window, r_sum, r_pos }),
            space,
            warnings: vec![],
        })
    }

    pub fn space(&self) -> SpaceParams {
        self.space
    }

    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn name(&self) -> &'static str {
        match &self.kind {
            StrategyKind::ParityK1 => "parity_k1",
            StrategyKind::ModularK2 { .. } => "modular_k2",
            StrategyKind::ModT(_) => "mod_t",
            StrategyKind::DoubleParity => "double_parity",
            StrategyKind::CyclicN2 => "cyclic_n2",
            StrategyKind::AffineN3K2 => "affine_n3_k2",
            StrategyKind::N3EvenK => "n3_even_k",
            StrategyKind::N3OddK { .. } => "n3_odd_k",
            StrategyKind::N4EvenK { .. } => "n4_even_k",
            StrategyKind::Dataset { .. } => "dataset",
            StrategyKind::AppendixCode(_) => "appendix_code",
        }
    }

    /// Canonical spec string, e.g. `mod_t:t=2,sigma=1`.
    pub fn spec_string(&self) -> String {
        match &self.kind {
            StrategyKind::ModularK2 { residue } => format!("modular_k2:r={residue}"),
            StrategyKind::ModT(p) => format!("mod_t:t={},sigma={}", p.t, p.sigma),
            StrategyKind::Dataset { id, .. } => format!("dataset:{id}"),
            StrategyKind::AppendixCode(p) => {
                format!("appendix:B={},rs={},rp={}", p.window, p.r_sum, p.r_pos)
            }
            _ => self.name().to_string(),
        }
    }

    /// The strategy's defining predicate. `a` must belong to the spec's space.
    pub fn member(&self, a: &HatAssignment) -> bool {
        debug_assert!(a.validate(self.space).is_ok());
        let space = self.space;
        let c = a.colors();
        match &self.kind {
            StrategyKind::ParityK1 => {
                let unused = a.unused_colors(space);
                a.augment(space, &unused).expect("ascending unused").parity() == Parity::Even
            }
            StrategyKind::ModularK2 { residue } => {
                let sum: u64 = c.iter().map(|&x| x as u64).sum();
                sum % (space.n as u64 + 2) == *residue
            }
            StrategyKind::ModT(p) => mod_t_member(a, space, *p),
            StrategyKind::DoubleParity => mod_t_member(a, space, ModTParams { t: 2, sigma: 1 }),
            StrategyKind::CyclicN2 => {
                let modulus = (space.k + 2) as u64;
                c[1] as u64 == (c[0] as u64 % modulus) + 1
            }
            StrategyKind::AffineN3K2 => {
                let r = (3 * (c[0] as u64 + c[1] as u64)) % 5;
                c[2] as u64 == if r == 0 { 5 } else { r }
            }
            StrategyKind::N3EvenK => {
                let q = (space.k + 3) as u64;
                let h = (space.k as u64 + 4) / 2;
                let r = (h * (c[0] as u64 + c[1] as u64)) % q;
                c[2] as u64 == if r == 0 { q } else { r }
            }
            StrategyKind::N3OddK { square } => square.get(c[0], c[1]) == c[2],
            StrategyKind::N4EvenK { square } => square.get(c[0], c[1]) == square.get(c[2], c[3]),
            StrategyKind::Dataset { members, .. } => members.contains(a),
            StrategyKind::AppendixCode(p) => appendix_member(a, space, *p),
        }
    }

    /// Materializes the assumed set by filtering the enumerated space.
    pub fn generate(&self) -> AssignmentSet {
        let all: Vec<HatAssignment> = self.space.enumerate().collect();
        let members: Vec<HatAssignment> =
            all.into_par_iter().filter(|a| self.member(a)).collect();
        AssignmentSet::new(self.space, members, self.spec_string())
            .expect("enumerated assignments are valid")
    }
}

fn mod_t_member(a: &HatAssignment, space: SpaceParams, p: ModTParams) -> bool {
    let mut ghosts = a.unused_colors(space);
    // (1) residues pairwise distinct mod t
    let mut seen = vec![false; p.t as usize];
    for &y in &ghosts {
        let r = (y as u64 % p.t) as usize;
        if seen[r] {
            return false;
        }
        seen[r] = true;
    }
    // (3) unused sum hits the target residue
    let sum: u64 = ghosts.iter().map(|&y| y as u64).sum();
    if sum % p.t != p.sigma {
        return false;
    }
    // (2) even augmented permutation, ghosts in ascending residue order
    ghosts.sort_by_key(|&y| y as u64 % p.t);
    a.augment(space, &ghosts).expect("ghosts permute the unused colors").parity() == Parity::Even
}

fn appendix_member(a: &HatAssignment, space: SpaceParams, p: AppendixParams) -> bool {
    let ghosts = a.unused_colors(space);
    // (i) even augmented permutation, ghosts ascending
    if a.augment(space, &ghosts).expect("ascending unused").parity() != Parity::Even {
        return false;
    }
    let bits: Vec<i64> = ghosts
        .windows(2)
        .map(|w| bit_diff(w[0] as u64, w[1] as u64) as i64)
        .collect();
    let b_max = bit_diff(1, space.colors() as u64) as i64;
    // (ii) all bit indices inside the top window
    if bits.iter().any(|&b| b <= b_max - p.window as i64) {
        return false;
    }
    // (iii) bit sum
    let sum: i64 = bits.iter().sum();
    if sum.rem_euclid(p.window as i64) != p.r_sum as i64 {
        return false;
    }
    // (iv) ascent positions (1-based) summed mod k+1
    let ascents: i64 = bits
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] < w[1])
        .map(|(i, _)| (i + 1) as i64)
        .sum();
    ascents.rem_euclid(space.k as i64 + 1) == p.r_pos as i64
}

/// Exhaustively evaluates all `B·(k+1)` residue pairs of the deletion-code
/// strategy and returns an argmax `(r_sum, r_pos, member_count)`, ties broken
/// toward the lexicographically smallest pair.
pub fn best_residues(
    n: usize,
    k: usize,
    window: u32,
) -> Result<(u32, u32, u64), StrategyError> {
    let space = SpaceParams::new(n, k)?;
    if k == 0 || window == 0 {
        return Err(undefined("appendix_code", space, "needs k ≥ 1 and B ≥ 1"));
    }
    let mut counts = vec![vec![0u64; k + 1]; window as usize];
    let b_max = bit_diff(1, space.colors() as u64) as i64;
    for a in space.enumerate() {
        let ghosts = a.unused_colors(space);
        if a.augment(space, &ghosts).expect("ascending unused").parity() != Parity::Even {
            continue;
        }
        let bits: Vec<i64> = ghosts
            .windows(2)
            .map(|w| bit_diff(w[0] as u64, w[1] as u64) as i64)
            .collect();
        if bits.iter().any(|&b| b <= b_max - window as i64) {
            continue;
        }
        let sum: i64 = bits.iter().sum();
        let ascents: i64 = bits
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] < w[1])
            .map(|(i, _)| (i + 1) as i64)
            .sum();
        let rs = sum.rem_euclid(window as i64) as usize;
        let rp = ascents.rem_euclid(k as i64 + 1) as usize;
        counts[rs][rp] += 1;
    }
    let mut best = (0u32, 0u32, counts[0][0]);
    for rs in 0..window as usize {
        for rp in 0..=k {
            if counts[rs][rp] > best.2 {
                best = (rs as u32, rp as u32, counts[rs][rp]);
            }
        }
    }
    Ok(best)
}

/// Exhaustive argmax over the mod-t strategy's target residue sigma; ties go
/// to the smallest sigma.
pub fn best_sigma(n: usize, k: usize, t: u64) -> Result<(u64, u64), StrategyError> {
    let space = SpaceParams::new(n, k)?;
    if k < 2 || t == 0 {
        return Err(undefined("mod_t", space, "needs k ≥ 2 and t ≥ 1"));
    }
    let mut counts = vec![0u64; t as usize];
    'outer: for a in space.enumerate() {
        let mut ghosts = a.unused_colors(space);
        let mut seen = vec![false; t as usize];
        for &y in &ghosts {
            let r = (y as u64 % t) as usize;
            if seen[r] {
                continue 'outer;
            }
            seen[r] = true;
        }
        ghosts.sort_by_key(|&y| y as u64 % t);
        if a.augment(space, &ghosts).expect("ghost order").parity() != Parity::Even {
            continue;
        }
        let sum: u64 = ghosts.iter().map(|&y| y as u64).sum();
        counts[(sum % t) as usize] += 1;
    }
    let mut best = (0u64, counts[0]);
    for (sigma, &count) in counts.iter().enumerate() {
        if count > best.1 {
            best = (sigma as u64, count);
        }
    }
    Ok(best)
}

/// Known good default sigma when `t = k` is chosen, for `k = 2..=5`.
pub fn default_sigma_for_t_eq_k(k: usize) -> Option<u64> {
    match k {
        2 => Some(1),
        3 => Some(0),
        4 => Some(2),
        5 => Some(0),
        _ => None,
    }
}

/// Perfect strategies exist whenever the prime factorization `∏ pᵢ^aᵢ` of
/// `k + 1` satisfies `∏ aᵢ(pᵢ − 1) ≥ n`; in particular whenever `k ≥ n` and
/// `k + 1` is prime.
pub fn teirlinck_criterion(n: usize, k: usize) -> bool {
    let mut rest = (k + 1) as u64;
    let mut product: u64 = 1;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut a = 0u64;
            while rest % p == 0 {
                rest /= p;
                a += 1;
            }
            product = product.saturating_mul(a * (p - 1));
        }
        p += 1;
    }
    if rest > 1 {
        product = product.saturating_mul(rest - 1);
    }
    product >= n as u64
}

/// Parses a CLI strategy spec such as `parity_k1`, `mod_t:t=2,sigma=1`,
/// `appendix:B=2,rs=0,rp=0`, or `dataset:n5k2`. The `n` and `k` arguments
/// fill in whatever the spec itself does not determine.
pub fn parse_spec(
    text: &str,
    n: Option<usize>,
    k: Option<usize>,
) -> Result<StrategySpec, StrategyError> {
    let (name, params_text) = match text.split_once(':') {
        Some((name, rest)) => (name.trim(), rest.trim()),
        None => (text.trim(), ""),
    };
    let params = if name == "dataset" {
        HashMap::new()
    } else {
        parse_params(params_text)?
    };
    let need_n = || n.ok_or_else(|| StrategyError::BadParam(format!("{name} needs --n")));
    let need_k = || k.ok_or_else(|| StrategyError::BadParam(format!("{name} needs --k")));

    let known_keys: &[&str] = match name {
        "modular_k2" => &["r"],
        "mod_t" => &["t", "sigma"],
        "appendix" | "appendix_code" => &["B", "rs", "rp"],
        _ => &[],
    };
    for key in params.keys() {
        if !known_keys.contains(&key.as_str()) {
            return Err(StrategyError::BadParam(format!("unknown parameter '{key}' for {name}")));
        }
    }

    match name {
        "parity_k1" => StrategySpec::parity_k1(need_n()?),
        "modular_k2" => {
            let residue = params.get("r").map(|v| parse_u64(v, "r")).transpose()?;
            StrategySpec::modular_k2(need_n()?, residue)
        }
        "mod_t" => {
            let n = need_n()?;
            let k = need_k()?;
            let t = match params.get("t") {
                Some(v) => parse_u64(v, "t")?,
                None => (k as u64 * k as u64) / 2,
            };
            let sigma = match params.get("sigma") {
                Some(v) => parse_u64(v, "sigma")?,
                None if t == k as u64 => default_sigma_for_t_eq_k(k).unwrap_or(0),
                None => 0,
            };
            StrategySpec::mod_t(n, k, t, sigma)
        }
        "double_parity" => StrategySpec::double_parity(need_n()?),
        "cyclic_n2" => StrategySpec::cyclic_n2(need_k()?),
        "affine_n3_k2" => StrategySpec::affine_n3_k2(),
        "n3_even_k" => StrategySpec::n3_even_k(need_k()?),
        "n3_odd_k" => StrategySpec::n3_odd_k(need_k()?),
        "n4_even_k" => StrategySpec::n4_even_k(need_k()?),
        "appendix" | "appendix_code" => {
            let n = need_n()?;
            let k = need_k()?;
            let window = params.get("B").map(|v| parse_u64(v, "B").map(|x| x as u32)).transpose()?;
            let r_sum = params.get("rs").map(|v| parse_u64(v, "rs")).transpose()?.unwrap_or(0);
            let r_pos = params.get("rp").map(|v| parse_u64(v, "rp")).transpose()?.unwrap_or(0);
            StrategySpec::appendix(n, k, window, r_sum as u32, r_pos as u32)
        }
        "dataset" => {
            if params_text.is_empty() {
                return Err(StrategyError::BadParam("dataset needs an id, e.g. dataset:n5k2".into()));
            }
            let set = datasets::resolve_set(params_text)
                .ok_or_else(|| StrategyError::UnknownSpec(format!("dataset:{params_text}")))?;
            Ok(StrategySpec::dataset(params_text, set))
        }
        other => Err(StrategyError::UnknownSpec(other.to_string())),
    }
}

fn parse_params(text: &str) -> Result<HashMap<String, String>, StrategyError> {
    let mut map = HashMap::new();
    if text.is_empty() {
        return Ok(map);
    }
    for pair in text.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| StrategyError::BadParam(format!("expected key=value, got '{pair}'")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_u64(text: &str, key: &str) -> Result<u64, StrategyError> {
    text.parse::<u64>()
        .map_err(|_| StrategyError::BadParam(format!("bad value '{text}' for {key}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(spec: &StrategySpec) -> u64 {
        spec.generate().len() as u64
    }

    #[test]
    fn parity_counts() {
        assert_eq!(count(&StrategySpec::parity_k1(2).unwrap()), 3);
        for n in 1..=6 {
            let spec = StrategySpec::parity_k1(n).unwrap();
            assert_eq!(count(&spec), spec.space().space_size().unwrap() / 2);
        }
    }

    #[test]
    fn modular_k2_counts_follow_the_rate_formula() {
        for n in 2..=6usize {
            let spec = StrategySpec::modular_k2(n, None).unwrap();
            let space = spec.space().space_size().unwrap();
            let denom = 2 * n.div_ceil(2) as u64 + 1;
            assert_eq!(count(&spec) * denom, space, "n={n}");
        }
    }

    #[test]
    fn double_parity_matches_the_embedded_triples() {
        let spec = StrategySpec::double_parity(3).unwrap();
        let set = spec.generate();
        assert_eq!(set.len(), 18);
        assert!(set.same_members(&datasets::dp18_n3k2()));
    }

    #[test]
    fn double_parity_rate_formula() {
        // size = space · (1/4 + 1/(4(n+1))) for even n, 1/4 + 1/(4(n+2)) for odd
        for n in 2..=6usize {
            let spec = StrategySpec::double_parity(n).unwrap();
            let space = spec.space().space_size().unwrap();
            let denom = if n % 2 == 0 { n as u64 + 1 } else { n as u64 + 2 };
            let expected = space / 4 + space / (4 * denom);
            assert_eq!(count(&spec), expected, "n={n}");
        }
    }

    #[test]
    fn double_parity_equals_mod_t_with_t2_sigma1() {
        for n in 2..=5 {
            let dp = StrategySpec::double_parity(n).unwrap().generate();
            let mt = StrategySpec::mod_t(n, 2, 2, 1).unwrap().generate();
            assert!(dp.same_members(&mt), "n={n}");
        }
    }

    #[test]
    fn mod_t_sigma_zero_with_two_hats_is_empty() {
        let spec = StrategySpec::mod_t(3, 2, 2, 0).unwrap();
        assert_eq!(count(&spec), 0);
    }

    #[test]
    fn mod_t_below_k_warns_and_is_empty() {
        let spec = StrategySpec::mod_t(3, 3, 2, 0).unwrap();
        assert!(!spec.warnings().is_empty());
        assert_eq!(count(&spec), 0);
    }

    #[test]
    fn cyclic_counts() {
        for k in 1..=6 {
            let spec = StrategySpec::cyclic_n2(k).unwrap();
            assert_eq!(count(&spec), k as u64 + 2);
        }
    }

    #[test]
    fn affine_matches_od_columns_and_even_rule() {
        let affine = StrategySpec::affine_n3_k2().unwrap().generate();
        assert_eq!(affine.len(), 20);
        let od_set = datasets::od_2_3_5().to_set().unwrap();
        assert!(affine.same_members(&od_set));
        let even = StrategySpec::n3_even_k(2).unwrap().generate();
        assert!(affine.same_members(&even));
    }

    #[test]
    fn perfect_families_hit_perfect_size() {
        let cases: Vec<StrategySpec> = vec![
            StrategySpec::cyclic_n2(4).unwrap(),
            StrategySpec::affine_n3_k2().unwrap(),
            StrategySpec::n3_even_k(4).unwrap(),
            StrategySpec::n3_odd_k(1).unwrap(),
            StrategySpec::n3_odd_k(3).unwrap(),
            StrategySpec::n3_odd_k(5).unwrap(),
            StrategySpec::n4_even_k(2).unwrap(),
            StrategySpec::n4_even_k(4).unwrap(),
        ];
        for spec in cases {
            let set = spec.generate();
            assert!(set.is_perfect().unwrap(), "{}", spec.spec_string());
            assert!(set.check_independent().is_independent(), "{}", spec.spec_string());
        }
    }

    #[test]
    fn n4_even_k2_has_120_members() {
        assert_eq!(count(&StrategySpec::n4_even_k(2).unwrap()), 120);
    }

    #[test]
    fn generated_sets_are_independent_across_the_desk_matrix() {
        let mut specs: Vec<StrategySpec> = vec![];
        for n in 1..=6 {
            specs.push(StrategySpec::parity_k1(n).unwrap());
        }
        for n in 2..=5 {
            specs.push(StrategySpec::modular_k2(n, None).unwrap());
            specs.push(StrategySpec::double_parity(n).unwrap());
        }
        for k in 1..=6 {
            specs.push(StrategySpec::cyclic_n2(k).unwrap());
        }
        specs.push(StrategySpec::mod_t(3, 3, 3, 0).unwrap());
        specs.push(StrategySpec::mod_t(4, 3, 3, 0).unwrap());
        specs.push(StrategySpec::mod_t(3, 4, 8, 0).unwrap());
        specs.push(StrategySpec::appendix(4, 2, None, 0, 0).unwrap());
        specs.push(StrategySpec::appendix(5, 2, None, 1, 0).unwrap());
        specs.push(StrategySpec::appendix(4, 3, None, 0, 0).unwrap());
        for spec in specs {
            let set = spec.generate();
            assert!(
                set.check_independent().is_independent(),
                "{} on {}",
                spec.spec_string(),
                spec.space()
            );
        }
    }

    #[test]
    fn appendix_with_one_extra_hat_degenerates_to_parity() {
        let parity = StrategySpec::parity_k1(4).unwrap().generate();
        let code = StrategySpec::appendix(4, 1, Some(2), 0, 0).unwrap().generate();
        assert!(parity.same_members(&code));
        let shifted = StrategySpec::appendix(4, 1, Some(2), 1, 0).unwrap().generate();
        assert!(shifted.is_empty());
        let shifted = StrategySpec::appendix(4, 1, Some(2), 0, 1).unwrap().generate();
        assert!(shifted.is_empty());
    }

    #[test]
    fn bit_diff_examples_and_deletion_property() {
        assert_eq!(bit_diff(3, 6), 2);
        assert_eq!(bit_diff(1, 2), 1);
        for u in 1..=64u64 {
            for v in u + 1..=64 {
                assert_eq!(bit_diff(u, v), bit_diff(v, u));
                for w in v + 1..=64 {
                    let uv = bit_diff(u, v);
                    let vw = bit_diff(v, w);
                    let uw = bit_diff(u, w);
                    assert_ne!(uv, vw, "bit({u},{v}) vs bit({v},{w})");
                    assert!(uw == uv || uw == vw, "bit({u},{w}) out of pair");
                }
            }
        }
    }

    #[test]
    fn best_sigma_examples() {
        assert_eq!(best_sigma(3, 2, 2).unwrap(), (1, 18));
        assert_eq!(best_sigma(2, 2, 2).unwrap(), (1, 4));
        // exhaustive oracle at (4,3): recompute counts per sigma directly
        let (sigma, count) = best_sigma(4, 3, 3).unwrap();
        let mut best = 0u64;
        for s in 0..3 {
            let c = StrategySpec::mod_t(4, 3, 3, s).unwrap().generate().len() as u64;
            best = best.max(c);
        }
        assert_eq!(count, best);
        let direct = StrategySpec::mod_t(4, 3, 3, sigma).unwrap().generate().len() as u64;
        assert_eq!(direct, count);
    }

    #[test]
    fn best_residues_meets_the_density_bound() {
        for (n, k) in [(3usize, 2usize), (4, 2), (5, 2)] {
            let window = default_window(k);
            let (_, _, best) = best_residues(n, k, window).unwrap();
            let space = SpaceParams::new(n, k).unwrap().space_size().unwrap();
            assert!(
                best * 4 * (k as u64 + 1) * window as u64 >= space,
                "(n,k)=({n},{k}): {best}"
            );
        }
    }

    #[test]
    fn best_residues_agrees_with_brute_force_at_3_2() {
        let window = 2;
        let (rs, rp, best) = best_residues(3, 2, window).unwrap();
        let mut brute = 0u64;
        for s in 0..window {
            for p in 0..=2u32 {
                let c =
                    StrategySpec::appendix(3, 2, Some(window), s, p).unwrap().generate().len();
                brute = brute.max(c as u64);
            }
        }
        assert_eq!(best, brute);
        let direct =
            StrategySpec::appendix(3, 2, Some(window), rs, rp).unwrap().generate().len() as u64;
        assert_eq!(direct, best);
    }

    #[test]
    fn teirlinck_examples() {
        assert!(teirlinck_criterion(5, 6));
        assert!(teirlinck_criterion(5, 36));
        assert!(!teirlinck_criterion(4, 3));
        for k in [6usize, 10, 12, 16, 18, 22, 24, 26, 28, 30, 31, 36] {
            assert!(teirlinck_criterion(5, k), "k={k}");
        }
    }

    #[test]
    fn spec_strings_parse_and_round_trip() {
        let spec = parse_spec("mod_t:t=2,sigma=1", Some(3), Some(2)).unwrap();
        assert_eq!(spec.spec_string(), "mod_t:t=2,sigma=1");
        let spec = parse_spec("appendix:B=2,rs=0,rp=0", Some(4), Some(2)).unwrap();
        assert_eq!(spec.spec_string(), "appendix:B=2,rs=0,rp=0");
        let spec = parse_spec("dataset:n5k2", None, None).unwrap();
        assert_eq!(spec.space(), SpaceParams::new(5, 2).unwrap());
        assert_eq!(spec.generate().len(), 840);
        assert!(parse_spec("nonsense", Some(3), Some(2)).is_err());
        assert!(parse_spec("mod_t:bogus=1", Some(3), Some(2)).is_err());
        assert!(parse_spec("parity_k1", None, None).is_err());
    }

    #[test]
    fn undefined_strategies_are_rejected() {
        assert!(StrategySpec::n3_even_k(3).is_err());
        assert!(StrategySpec::n3_odd_k(2).is_err());
        assert!(StrategySpec::n4_even_k(3).is_err());
        assert!(StrategySpec::mod_t(3, 1, 2, 0).is_err());
        assert!(StrategySpec::mod_t(3, 2, 2, 2).is_err());
        assert!(StrategySpec::appendix(4, 0, None, 0, 0).is_err());
        assert!(StrategySpec::appendix(4, 2, Some(2), 2, 0).is_err());
        assert!(StrategySpec::appendix(4, 2, Some(2), 0, 3).is_err());
    }
}
