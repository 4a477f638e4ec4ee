//! Maximum-independent-set search on the arrangement graph, and LP-format
//! export of the independent-set model for external solvers.
//!
//! The exact solver branches on vertices in lexicographic order with a line
//! bound: fixing all positions but the last partitions the vertex set into
//! lines of k+1 mutually adjacent tuples, so an independent set takes at most
//! one vertex per line. Lines are consecutive runs in lexicographic order,
//! which keeps the bound cheap to maintain.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::perm::{PermError, PermGroup};
use crate::space::{AssignmentSet, HatAssignment, SpaceError, SpaceParams};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("space has {size} vertices, above the exact-mode ceiling {ceiling}")]
    TooLarge { size: u64, ceiling: u64 },
    #[error("seed set is not independent")]
    SeedNotIndependent,
    #[error("seed set belongs to a different space")]
    SeedParamMismatch,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    ExactBacktracking,
    Greedy,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub time_limit: Duration,
    /// Restrict the search to unions of whole orbits under this position
    /// action. Prunes hard but may sacrifice optimality.
    pub symmetry_group: Option<PermGroup>,
    /// Known independent set used as the initial incumbent.
    pub seed_set: Option<AssignmentSet>,
    /// Known lower bound on the independence number; must not exceed it.
    pub lower_bound_hint: Option<u64>,
    /// Largest vertex count accepted in exact mode.
    pub ceiling: u64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            mode: SearchMode::ExactBacktracking,
            time_limit: Duration::from_secs(60),
            symmetry_group: None,
            seed_set: None,
            lower_bound_hint: None,
            ceiling: 5040,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_set: AssignmentSet,
    /// True only when the searched space was exhausted (or the line bound was
    /// met, which certifies optimality even under a symmetry restriction).
    pub optimal: bool,
    pub nodes_explored: u64,
    pub wall_time: Duration,
    pub timed_out: bool,
}

/// `space_size/(k+1)`: one vertex per line. Equals the perfect size.
pub fn clique_upper_bound(params: SpaceParams) -> Result<u64, SpaceError> {
    params.perfect_size()
}

struct Graph {
    vertices: Vec<HatAssignment>,
    neighbors: Vec<Vec<u32>>,
    /// `line_ids[p][v]`: index of v's line in the partition that varies
    /// position p and fixes the others. Every partition bounds the
    /// independent set by its free-line count.
    line_ids: Vec<Vec<u32>>,
    line_count: usize,
}

fn build_graph(params: SpaceParams) -> Result<Graph, SpaceError> {
    let vertices: Vec<HatAssignment> = params.enumerate().collect();
    let mut index: HashMap<HatAssignment, u32> = HashMap::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        index.insert(v.clone(), i as u32);
    }
    let mut neighbors = Vec::with_capacity(vertices.len());
    for v in &vertices {
        let unused = v.unused_colors(params);
        let mut nb = Vec::with_capacity(params.n * params.k);
        for pos in 0..params.n {
            for &c in &unused {
                let w = v.substitute(pos, c);
                nb.push(index[&w]);
            }
        }
        neighbors.push(nb);
    }
    let mut line_ids = Vec::with_capacity(params.n);
    let mut line_count = 0;
    for pos in 0..params.n {
        let mut keys: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut ids = Vec::with_capacity(vertices.len());
        for v in &vertices {
            let mut key = v.colors().to_vec();
            key.remove(pos);
            let next = keys.len() as u32;
            ids.push(*keys.entry(key).or_insert(next));
        }
        line_count = keys.len();
        line_ids.push(ids);
    }
    Ok(Graph { vertices, neighbors, line_ids, line_count })
}

fn greedy_set(graph: &Graph) -> Vec<u32> {
    // the graph is n·k-regular, so degree order reduces to vertex order
    let mut blocked = vec![false; graph.vertices.len()];
    let mut chosen = Vec::new();
    for v in 0..graph.vertices.len() {
        if !blocked[v] {
            chosen.push(v as u32);
            for &w in &graph.neighbors[v] {
                blocked[w as usize] = true;
            }
        }
    }
    chosen
}

/// Finds a maximum (exact mode) or maximal (greedy mode) independent set.
pub fn max_independent_set(
    params: SpaceParams,
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    let size = params.space_size()?;
    if cfg.mode == SearchMode::ExactBacktracking && size > cfg.ceiling {
        return Err(SearchError::TooLarge { size, ceiling: cfg.ceiling });
    }
    let graph = build_graph(params)?;
    let bound = clique_upper_bound(params)?;

    let seed_indices: Vec<u32> = match &cfg.seed_set {
        Some(seed) => {
            if seed.params() != params {
                return Err(SearchError::SeedParamMismatch);
            }
            if !seed.check_independent().is_independent() {
                return Err(SearchError::SeedNotIndependent);
            }
            let index: HashMap<&HatAssignment, u32> = graph
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| (v, i as u32))
                .collect();
            seed.iter().map(|a| index[a]).collect()
        }
        None => Vec::new(),
    };

    match cfg.mode {
        SearchMode::Greedy => {
            let chosen = match &cfg.symmetry_group {
                Some(group) => orbit_greedy(&graph, params, group)?,
                None => {
                    let greedy = greedy_set(&graph);
                    if greedy.len() >= seed_indices.len() { greedy } else { seed_indices }
                }
            };
            let best_set = indices_to_set(&graph, params, &chosen, "greedy")?;
            Ok(SearchResult {
                optimal: chosen.len() as u64 == bound,
                best_set,
                nodes_explored: graph.vertices.len() as u64,
                wall_time: start.elapsed(),
                timed_out: false,
            })
        }
        SearchMode::ExactBacktracking => {
            let (chosen, nodes, timed_out, exhausted) = match &cfg.symmetry_group {
                Some(_) => orbit_search(&graph, params, cfg, &seed_indices, bound, start)?,
                None => {
                    let mut incumbent = greedy_set(&graph);
                    if seed_indices.len() > incumbent.len() {
                        incumbent = seed_indices.clone();
                    }
                    exact_search(&graph, cfg, incumbent, bound, start)
                }
            };
            let met_bound = chosen.len() as u64 == bound;
            let optimal = if cfg.symmetry_group.is_some() {
                met_bound
            } else {
                !timed_out && exhausted || met_bound
            };
            let best_set = indices_to_set(&graph, params, &chosen, "exact")?;
            Ok(SearchResult {
                best_set,
                optimal,
                nodes_explored: nodes,
                wall_time: start.elapsed(),
                timed_out,
            })
        }
    }
}

fn indices_to_set(
    graph: &Graph,
    params: SpaceParams,
    chosen: &[u32],
    label: &str,
) -> Result<AssignmentSet, SearchError> {
    let members = chosen.iter().map(|&i| graph.vertices[i as usize].clone());
    Ok(AssignmentSet::new(params, members, format!("search:{label}"))?)
}

struct ExactState<'g> {
    graph: &'g Graph,
    blocked: Vec<u32>,
    /// Per position partition: free (undecided, unblocked) vertices per line,
    /// and the number of lines still holding one.
    avail: Vec<Vec<u32>>,
    lines_nonempty: Vec<usize>,
    chosen: Vec<u32>,
    best: Vec<u32>,
    floor: usize,
    clique_bound: u64,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
    done: bool,
}

impl ExactState<'_> {
    /// An independent set takes at most one vertex per line, in every one of
    /// the n line partitions; the tightest partition bounds the extension.
    fn capacity(&self) -> usize {
        self.lines_nonempty.iter().copied().min().unwrap_or(0)
    }

    fn remove_free(&mut self, w: usize) {
        for (p, ids) in self.graph.line_ids.iter().enumerate() {
            let line = ids[w] as usize;
            self.avail[p][line] -= 1;
            if self.avail[p][line] == 0 {
                self.lines_nonempty[p] -= 1;
            }
        }
    }

    fn restore_free(&mut self, w: usize) {
        for (p, ids) in self.graph.line_ids.iter().enumerate() {
            let line = ids[w] as usize;
            if self.avail[p][line] == 0 {
                self.lines_nonempty[p] += 1;
            }
            self.avail[p][line] += 1;
        }
    }
}

fn exact_search(
    graph: &Graph,
    cfg: &SearchConfig,
    incumbent: Vec<u32>,
    clique_bound: u64,
    start: Instant,
) -> (Vec<u32>, u64, bool, bool) {
    let positions = graph.line_ids.len();
    let mut avail = vec![vec![0u32; graph.line_count]; positions];
    for (p, ids) in graph.line_ids.iter().enumerate() {
        for &line in ids {
            avail[p][line as usize] += 1;
        }
    }
    let floor = incumbent
        .len()
        .max(cfg.lower_bound_hint.unwrap_or(0).saturating_sub(1) as usize);
    let mut state = ExactState {
        graph,
        blocked: vec![0; graph.vertices.len()],
        avail,
        lines_nonempty: vec![graph.line_count; positions],
        chosen: Vec::new(),
        best: incumbent,
        floor,
        clique_bound,
        nodes: 0,
        deadline: start + cfg.time_limit,
        timed_out: false,
        done: false,
    };
    if state.best.len() as u64 == clique_bound {
        // the incumbent already meets the line bound
        return (state.best, 0, false, true);
    }
    descend(&mut state, 0);
    let exhausted = !state.timed_out;
    (state.best, state.nodes, state.timed_out, exhausted)
}

fn descend(s: &mut ExactState, v: usize) {
    s.nodes += 1;
    if s.nodes & 0xfff == 0 && Instant::now() >= s.deadline {
        s.timed_out = true;
    }
    if s.timed_out || s.done {
        return;
    }
    if s.chosen.len() + s.capacity() <= s.floor {
        return;
    }
    if v == s.graph.vertices.len() {
        s.best = s.chosen.clone();
        s.floor = s.chosen.len();
        if s.floor as u64 == s.clique_bound {
            s.done = true;
        }
        return;
    }

    if s.blocked[v] == 0 {
        // branch: take v
        s.chosen.push(v as u32);
        for i in 0..s.graph.neighbors[v].len() {
            let w = s.graph.neighbors[v][i] as usize;
            s.blocked[w] += 1;
            if s.blocked[w] == 1 && w > v {
                s.remove_free(w);
            }
        }
        s.remove_free(v); // v leaves the undecided pool
        descend(s, v + 1);
        s.restore_free(v);
        for i in 0..s.graph.neighbors[v].len() {
            let w = s.graph.neighbors[v][i] as usize;
            s.blocked[w] -= 1;
            if s.blocked[w] == 0 && w > v {
                s.restore_free(w);
            }
        }
        s.chosen.pop();
        if s.timed_out || s.done {
            return;
        }
    }
    // branch: leave v out
    let was_free = s.blocked[v] == 0;
    if was_free {
        s.remove_free(v);
    }
    descend(s, v + 1);
    if was_free {
        s.restore_free(v);
    }
}

/// Computes vertex orbits under the position action; `orbit_of[v]` is the
/// orbit index, and orbits are numbered by their smallest vertex.
fn vertex_orbits(
    graph: &Graph,
    params: SpaceParams,
    group: &PermGroup,
) -> Result<(Vec<u32>, Vec<Vec<u32>>), SearchError> {
    let n = params.n;
    for g in group.elements() {
        for position in n + 1..=group.degree() {
            if g.apply(position) != position {
                return Err(PermError::ActionEscapesTuple { position, len: n }.into());
            }
        }
    }
    let index: HashMap<&HatAssignment, u32> =
        graph.vertices.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let inverses: Vec<_> = group.elements().iter().map(|g| g.inverse()).collect();
    let mut orbit_of = vec![u32::MAX; graph.vertices.len()];
    let mut orbits: Vec<Vec<u32>> = Vec::new();
    for v in 0..graph.vertices.len() {
        if orbit_of[v] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        let mut members = Vec::new();
        let colors = graph.vertices[v].colors();
        for inv in &inverses {
            let image: Vec<u8> = (1..=n).map(|i| colors[inv.apply(i) - 1]).collect();
            let w = index[&HatAssignment::from_colors_unchecked(image)];
            if orbit_of[w as usize] == u32::MAX {
                orbit_of[w as usize] = id;
                members.push(w);
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    Ok((orbit_of, orbits))
}

/// Greedy insertion over whole orbits in first-vertex order.
fn orbit_greedy(
    graph: &Graph,
    params: SpaceParams,
    group: &PermGroup,
) -> Result<Vec<u32>, SearchError> {
    let (orbit_of, orbits) = vertex_orbits(graph, params, group)?;
    let count = orbits.len();
    let mut selectable = vec![true; count];
    let mut conflicts: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); count];
    for v in 0..graph.vertices.len() {
        let ov = orbit_of[v];
        for &w in &graph.neighbors[v] {
            let ow = orbit_of[w as usize];
            if ov == ow {
                selectable[ov as usize] = false;
            } else {
                conflicts[ov as usize].insert(ow);
            }
        }
    }
    let mut blocked = vec![false; count];
    let mut vertices = Vec::new();
    for o in 0..count {
        if selectable[o] && !blocked[o] {
            vertices.extend(orbits[o].iter().copied());
            for &c in &conflicts[o] {
                blocked[c as usize] = true;
            }
        }
    }
    Ok(vertices)
}

/// Branch and bound over whole orbits: an orbit is selectable only if it is
/// internally independent, and two orbits conflict when any cross pair is
/// adjacent. Returns `(chosen vertices, nodes, timed_out, exhausted)`.
fn orbit_search(
    graph: &Graph,
    params: SpaceParams,
    cfg: &SearchConfig,
    seed: &[u32],
    clique_bound: u64,
    start: Instant,
) -> Result<(Vec<u32>, u64, bool, bool), SearchError> {
    let group = cfg.symmetry_group.as_ref().expect("orbit search needs a group");
    let (orbit_of, orbits) = vertex_orbits(graph, params, group)?;
    let count = orbits.len();

    let mut selectable = vec![true; count];
    let mut conflicts: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); count];
    for v in 0..graph.vertices.len() {
        let ov = orbit_of[v];
        for &w in &graph.neighbors[v] {
            let ow = orbit_of[w as usize];
            if ov == ow {
                selectable[ov as usize] = false;
            } else {
                conflicts[ov as usize].insert(ow);
            }
        }
    }
    let weights: Vec<u64> = orbits.iter().map(|o| o.len() as u64).collect();
    // suffix sums over selectable orbits bound any extension of a prefix state
    let mut suffix = vec![0u64; count + 1];
    for i in (0..count).rev() {
        suffix[i] = suffix[i + 1] + if selectable[i] { weights[i] } else { 0 };
    }

    // the seed counts as an incumbent only if it is a union of whole orbits
    let mut incumbent: Vec<u32> = Vec::new();
    if !seed.is_empty() {
        let mut orbit_hits: HashMap<u32, u64> = HashMap::new();
        for &v in seed {
            *orbit_hits.entry(orbit_of[v as usize]).or_insert(0) += 1;
        }
        if orbit_hits.iter().all(|(&o, &hits)| hits == weights[o as usize]) {
            incumbent = orbit_hits.keys().copied().collect();
            incumbent.sort_unstable();
        }
    }
    let deadline = start + cfg.time_limit;
    let mut best = incumbent.clone();
    let mut best_weight: u64 = best.iter().map(|&o| weights[o as usize]).sum();
    let floor = best_weight.max(cfg.lower_bound_hint.unwrap_or(0).saturating_sub(1));
    let mut nodes = 0u64;
    let mut timed_out = false;

    struct Frame<'a> {
        selectable: &'a [bool],
        conflicts: &'a [std::collections::BTreeSet<u32>],
        weights: &'a [u64],
        suffix: &'a [u64],
    }
    let frame = Frame { selectable: &selectable, conflicts: &conflicts, weights: &weights, suffix: &suffix };

    fn rec(
        f: &Frame,
        i: usize,
        blocked: &mut Vec<u32>,
        chosen: &mut Vec<u32>,
        weight: u64,
        floor: &mut u64,
        best: &mut Vec<u32>,
        best_weight: &mut u64,
        clique_bound: u64,
        nodes: &mut u64,
        deadline: Instant,
        timed_out: &mut bool,
    ) {
        *nodes += 1;
        if *nodes & 0xfff == 0 && Instant::now() >= deadline {
            *timed_out = true;
        }
        if *timed_out || *best_weight == clique_bound {
            return;
        }
        if weight + f.suffix[i] <= *floor {
            return;
        }
        if i == f.selectable.len() {
            if weight > *best_weight {
                *best = chosen.clone();
                *best_weight = weight;
                *floor = weight;
            }
            return;
        }
        if f.selectable[i] && blocked[i] == 0 {
            chosen.push(i as u32);
            for &o in &f.conflicts[i] {
                blocked[o as usize] += 1;
            }
            rec(
                f,
                i + 1,
                blocked,
                chosen,
                weight + f.weights[i],
                floor,
                best,
                best_weight,
                clique_bound,
                nodes,
                deadline,
                timed_out,
            );
            for &o in &f.conflicts[i] {
                blocked[o as usize] -= 1;
            }
            chosen.pop();
        }
        rec(
            f, i + 1, blocked, chosen, weight, floor, best, best_weight, clique_bound, nodes,
            deadline, timed_out,
        );
    }

    let mut blocked = vec![0u32; count];
    let mut chosen = Vec::new();
    let mut floor = floor;
    rec(
        &frame,
        0,
        &mut blocked,
        &mut chosen,
        0,
        &mut floor,
        &mut best,
        &mut best_weight,
        clique_bound,
        &mut nodes,
        deadline,
        &mut timed_out,
    );

    let vertices: Vec<u32> = best
        .iter()
        .flat_map(|&o| orbits[o as usize].iter().copied())
        .collect();
    let exhausted = !timed_out;
    Ok((vertices, nodes, timed_out, exhausted))
}

// ---------------------------------------------------------------------------
// LP export
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpStats {
    pub variables: u64,
    pub constraints: u64,
}

const ILP_VARIABLE_LIMIT: u64 = 1_000_000;

fn variable_name(a: &HatAssignment) -> String {
    let parts: Vec<String> = a.colors().iter().map(|c| c.to_string()).collect();
    format!("x_{}", parts.join("_"))
}

/// Streams every line of the graph: for each position, each distinct-color
/// choice of the other n-1 positions yields the k+1 assignments completing it.
fn for_each_line(
    params: SpaceParams,
    mut f: impl FnMut(usize, usize, &[HatAssignment]),
) -> Result<(), SpaceError> {
    let n = params.n;
    let m = params.colors();
    if n == 1 {
        let line: Vec<HatAssignment> = params.enumerate().collect();
        f(1, 0, &line);
        return Ok(());
    }
    let rest_params = SpaceParams::new(n - 1, params.k + 1)?;
    for pos in 1..=n {
        for (idx, rest) in rest_params.enumerate().enumerate() {
            let mut used = [false; 256];
            for &c in rest.colors() {
                used[c as usize] = true;
            }
            let line: Vec<HatAssignment> = (1..=m as u8)
                .filter(|&c| !used[c as usize])
                .map(|c| {
                    let mut colors = rest.colors().to_vec();
                    colors.insert(pos - 1, c);
                    HatAssignment::from_colors_unchecked(colors)
                })
                .collect();
            f(pos, idx, &line);
        }
    }
    Ok(())
}

/// Writes the maximum-independent-set model in LP format: one binary variable
/// per assignment, one `≤ 1` constraint per line, objective maximizing the
/// variable sum. With a symmetry group, one aggregated binary per orbit and
/// line constraints rewritten over orbit counts.
pub fn export_ilp(
    params: SpaceParams,
    w: &mut impl Write,
    symmetry: Option<&PermGroup>,
) -> Result<IlpStats, SearchError> {
    let size = params.space_size()?;
    if size > ILP_VARIABLE_LIMIT {
        return Err(SearchError::TooLarge { size, ceiling: ILP_VARIABLE_LIMIT });
    }
    match symmetry {
        None => export_plain(params, w),
        Some(group) => export_orbit(params, w, group),
    }
}

pub fn export_ilp_to_path(
    params: SpaceParams,
    path: impl AsRef<Path>,
    symmetry: Option<&PermGroup>,
) -> Result<IlpStats, SearchError> {
    let mut w = BufWriter::new(File::create(path)?);
    let stats = export_ilp(params, &mut w, symmetry)?;
    w.flush()?;
    Ok(stats)
}

fn export_plain(params: SpaceParams, w: &mut impl Write) -> Result<IlpStats, SearchError> {
    writeln!(
        w,
        "\\ maximum independent set in the arrangement graph, n={} k={}",
        params.n, params.k
    )?;
    writeln!(w, "Maximize")?;
    write!(w, " obj:")?;
    let mut first = true;
    let mut on_line = 0;
    for a in params.enumerate() {
        if !first {
            write!(w, " +")?;
        }
        if on_line == 8 {
            writeln!(w)?;
            write!(w, "     ")?;
            on_line = 0;
        }
        write!(w, " {}", variable_name(&a))?;
        first = false;
        on_line += 1;
    }
    writeln!(w)?;
    writeln!(w, "Subject To")?;
    let mut constraints = 0u64;
    let mut write_err: Option<io::Error> = None;
    for_each_line(params, |pos, idx, line| {
        if write_err.is_some() {
            return;
        }
        let terms: Vec<String> = line.iter().map(variable_name).collect();
        if let Err(e) = writeln!(w, " L_{pos}_{idx}: {} <= 1", terms.join(" + ")) {
            write_err = Some(e);
            return;
        }
        constraints += 1;
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    writeln!(w, "Binaries")?;
    let mut on_line = 0;
    for a in params.enumerate() {
        if on_line == 10 {
            writeln!(w)?;
            on_line = 0;
        }
        write!(w, " {}", variable_name(&a))?;
        on_line += 1;
    }
    writeln!(w)?;
    writeln!(w, "End")?;
    Ok(IlpStats { variables: params.space_size()?, constraints })
}

fn export_orbit(
    params: SpaceParams,
    w: &mut impl Write,
    group: &PermGroup,
) -> Result<IlpStats, SearchError> {
    let graph = build_graph(params)?;
    let (orbit_of, orbits) = vertex_orbits(&graph, params, group)?;
    let index: HashMap<&HatAssignment, u32> =
        graph.vertices.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();

    writeln!(
        w,
        "\\ orbit-aggregated maximum independent set, n={} k={}, |G|={}",
        params.n,
        params.k,
        group.order()
    )?;
    writeln!(w, "Maximize")?;
    write!(w, " obj:")?;
    let mut on_line = 0;
    for (i, orbit) in orbits.iter().enumerate() {
        if i > 0 {
            write!(w, " +")?;
        }
        if on_line == 8 {
            writeln!(w)?;
            write!(w, "     ")?;
            on_line = 0;
        }
        if orbit.len() == 1 {
            write!(w, " z_{i}")?;
        } else {
            write!(w, " {} z_{i}", orbit.len())?;
        }
        on_line += 1;
    }
    writeln!(w)?;
    writeln!(w, "Subject To")?;
    let mut constraints = 0u64;
    let mut write_err: Option<io::Error> = None;
    for_each_line(params, |pos, idx, line| {
        if write_err.is_some() {
            return;
        }
        let mut counts: HashMap<u32, u64> = HashMap::new();
        for a in line {
            let v = index[a];
            *counts.entry(orbit_of[v as usize]).or_insert(0) += 1;
        }
        let mut ids: Vec<u32> = counts.keys().copied().collect();
        ids.sort_unstable();
        let terms: Vec<String> = ids
            .iter()
            .map(|&o| {
                let c = counts[&o];
                if c == 1 { format!("z_{o}") } else { format!("{c} z_{o}") }
            })
            .collect();
        if let Err(e) = writeln!(w, " L_{pos}_{idx}: {} <= 1", terms.join(" + ")) {
            write_err = Some(e);
            return;
        }
        constraints += 1;
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    writeln!(w, "Binaries")?;
    let mut on_line = 0;
    for i in 0..orbits.len() {
        if on_line == 10 {
            writeln!(w)?;
            on_line = 0;
        }
        write!(w, " z_{i}")?;
        on_line += 1;
    }
    writeln!(w)?;
    writeln!(w, "End")?;
    Ok(IlpStats { variables: orbits.len() as u64, constraints })
}

// ---------------------------------------------------------------------------
// LP syntax checking (used by the test suites and the CLI self-check)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LpConstraint {
    pub name: String,
    pub terms: Vec<(u64, String)>,
    pub rhs: u64,
}

#[derive(Debug, Clone)]
pub struct ParsedLp {
    pub objective: Vec<(u64, String)>,
    pub constraints: Vec<LpConstraint>,
    pub binaries: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().next().unwrap().is_ascii_alphabetic()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_terms(text: &str) -> Result<Vec<(u64, String)>, String> {
    let mut terms = Vec::new();
    for chunk in text.split('+') {
        let tokens: Vec<&str> = chunk.split_whitespace().collect();
        let (coef, name) = match tokens.as_slice() {
            [name] => (1u64, *name),
            [coef, name] => {
                (coef.parse::<u64>().map_err(|_| format!("bad coefficient '{coef}'"))?, *name)
            }
            _ => return Err(format!("bad term '{chunk}'")),
        };
        if !valid_name(name) {
            return Err(format!("bad variable name '{name}'"));
        }
        terms.push((coef, name.to_string()));
    }
    if terms.is_empty() {
        return Err("empty term list".into());
    }
    Ok(terms)
}

/// Strict parser for the LP dialect written by [`export_ilp`]. Checks section
/// structure, token shapes, and that the variable sets of the objective,
/// constraints, and `Binaries` section agree.
pub fn parse_lp(text: &str) -> Result<ParsedLp, String> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Binaries,
        End,
    }
    let mut section = Section::Preamble;
    let mut objective_text = String::new();
    let mut constraints = Vec::new();
    let mut binaries = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Maximize" => {
                if section != Section::Preamble {
                    return Err(format!("line {lineno}: unexpected 'Maximize'"));
                }
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                if section != Section::Objective {
                    return Err(format!("line {lineno}: unexpected 'Subject To'"));
                }
                section = Section::Constraints;
                continue;
            }
            "Binaries" => {
                if section != Section::Constraints {
                    return Err(format!("line {lineno}: unexpected 'Binaries'"));
                }
                section = Section::Binaries;
                continue;
            }
            "End" => {
                if section != Section::Binaries {
                    return Err(format!("line {lineno}: unexpected 'End'"));
                }
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Preamble => return Err(format!("line {lineno}: expected 'Maximize'")),
            Section::Objective => {
                objective_text.push(' ');
                objective_text.push_str(line);
            }
            Section::Constraints => {
                let (name, rest) = line
                    .split_once(':')
                    .ok_or(format!("line {lineno}: constraint without a name"))?;
                let name = name.trim();
                if !valid_name(name) {
                    return Err(format!("line {lineno}: bad constraint name '{name}'"));
                }
                let (lhs, rhs) = rest
                    .split_once("<=")
                    .ok_or(format!("line {lineno}: constraint without '<='"))?;
                let rhs: u64 = rhs
                    .trim()
                    .parse()
                    .map_err(|_| format!("line {lineno}: bad right-hand side"))?;
                let terms =
                    parse_terms(lhs).map_err(|e| format!("line {lineno}: {e}"))?;
                constraints.push(LpConstraint { name: name.to_string(), terms, rhs });
            }
            Section::Binaries => {
                for token in line.split_whitespace() {
                    if !valid_name(token) {
                        return Err(format!("line {lineno}: bad binary name '{token}'"));
                    }
                    binaries.push(token.to_string());
                }
            }
            Section::End => return Err(format!("line {lineno}: content after 'End'")),
        }
    }
    if section != Section::End {
        return Err("missing 'End'".into());
    }
    let objective_text = objective_text.trim();
    let body = objective_text
        .strip_prefix("obj:")
        .ok_or("objective must be named 'obj'")?;
    let objective = parse_terms(body)?;

    let declared: std::collections::HashSet<&String> = binaries.iter().collect();
    for (_, name) in &objective {
        if !declared.contains(name) {
            return Err(format!("objective variable '{name}' not declared binary"));
        }
    }
    for c in &constraints {
        for (_, name) in &c.terms {
            if !declared.contains(name) {
                return Err(format!(
                    "constraint {} uses undeclared variable '{name}'",
                    c.name
                ));
            }
        }
    }
    let used: std::collections::HashSet<&String> =
        objective.iter().map(|(_, n)| n).collect();
    for b in &binaries {
        if !used.contains(b) {
            return Err(format!("binary '{b}' never appears in the objective"));
        }
    }
    Ok(ParsedLp { objective, constraints, binaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{group_closure, parse_generators};

    fn params(n: usize, k: usize) -> SpaceParams {
        SpaceParams::new(n, k).unwrap()
    }

    /// Exponential oracle: bitmask enumeration over all subsets.
    fn brute_force_alpha(p: SpaceParams) -> usize {
        let vertices: Vec<HatAssignment> = p.enumerate().collect();
        let n_v = vertices.len();
        assert!(n_v <= 24, "oracle only for tiny spaces");
        let mut adj = vec![0u32; n_v];
        for i in 0..n_v {
            for j in 0..n_v {
                if i != j && crate::space::is_adjacent(&vertices[i], &vertices[j]).unwrap() {
                    adj[i] |= 1 << j;
                }
            }
        }
        let mut best = 0;
        for mask in 0u32..(1 << n_v) {
            if mask.count_ones() as usize <= best {
                continue;
            }
            let mut ok = true;
            for i in 0..n_v {
                if mask & (1 << i) != 0 && adj[i] & mask != 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                best = mask.count_ones() as usize;
            }
        }
        best
    }

    #[test]
    fn exact_matches_brute_force_on_tiny_spaces() {
        for p in [params(2, 2), params(1, 3), params(1, 5), params(2, 1)] {
            let result = max_independent_set(p, &SearchConfig::default()).unwrap();
            assert!(result.optimal);
            assert_eq!(result.best_set.len(), brute_force_alpha(p), "{p}");
        }
    }

    #[test]
    fn known_independence_numbers() {
        let cases = [(params(2, 2), 4), (params(3, 2), 20), (params(2, 4), 6)];
        for (p, alpha) in cases {
            let result = max_independent_set(p, &SearchConfig::default()).unwrap();
            assert!(result.optimal, "{p}");
            assert_eq!(result.best_set.len(), alpha, "{p}");
            assert!(result.best_set.check_independent().is_independent());
            assert!(result.best_set.len() as u64 <= clique_upper_bound(p).unwrap());
        }
    }

    #[test]
    fn clique_bound_values() {
        assert_eq!(clique_upper_bound(params(2, 2)).unwrap(), 4);
        assert_eq!(clique_upper_bound(params(7, 2)).unwrap(), 60480);
        // 840/4 = 210, consistent with (but weaker than) the known 209
        assert_eq!(clique_upper_bound(params(4, 3)).unwrap(), 210);
    }

    #[test]
    fn exact_mode_refuses_oversized_spaces() {
        let cfg = SearchConfig { ceiling: 100, ..Default::default() };
        assert!(matches!(
            max_independent_set(params(4, 2), &cfg),
            Err(SearchError::TooLarge { .. })
        ));
    }

    #[test]
    fn greedy_returns_a_maximal_set() {
        let p = params(3, 2);
        let cfg = SearchConfig { mode: SearchMode::Greedy, ..Default::default() };
        let result = max_independent_set(p, &cfg).unwrap();
        let set = &result.best_set;
        assert!(set.check_independent().is_independent());
        for v in p.enumerate() {
            if set.contains(&v) {
                continue;
            }
            let extends = set
                .iter()
                .all(|m| !crate::space::is_adjacent(m, &v).unwrap());
            assert!(!extends, "greedy set misses addable vertex {v}");
        }
    }

    #[test]
    fn seeded_perfect_set_confirms_instantly() {
        let p = params(3, 2);
        let seed = crate::strategy::StrategySpec::affine_n3_k2().unwrap().generate();
        let cfg = SearchConfig { seed_set: Some(seed), ..Default::default() };
        let result = max_independent_set(p, &cfg).unwrap();
        assert!(result.optimal);
        assert_eq!(result.best_set.len(), 20);
        assert_eq!(result.nodes_explored, 0);
    }

    #[test]
    fn symmetric_search_cracks_4_2() {
        // unrestricted branch and bound stalls on this space; restricting to
        // sets invariant under the order-8 group proves alpha = 120 instantly
        let gens = parse_generators("(1 2); (1 4)(2 3)", 4).unwrap();
        let group = group_closure(4, &gens).unwrap();
        assert_eq!(group.order(), 8);
        let cfg = SearchConfig { symmetry_group: Some(group), ..Default::default() };
        let result = max_independent_set(params(4, 2), &cfg).unwrap();
        assert_eq!(result.best_set.len(), 120);
        assert!(result.optimal);
        assert!(result.best_set.check_independent().is_independent());
    }

    #[test]
    fn symmetric_search_meets_the_bound_on_3_2() {
        let gens = parse_generators("(1 2)", 3).unwrap();
        let group = group_closure(3, &gens).unwrap();
        let cfg = SearchConfig { symmetry_group: Some(group), ..Default::default() };
        let result = max_independent_set(params(3, 2), &cfg).unwrap();
        // the affine perfect set is invariant under swapping the first two
        // positions, so the restricted search still reaches 20
        assert_eq!(result.best_set.len(), 20);
        assert!(result.optimal);
        assert!(result.best_set.check_independent().is_independent());
    }

    #[test]
    fn export_small_model_and_parse_it_back() {
        let mut buf = Vec::new();
        let stats = export_ilp(params(2, 2), &mut buf, None).unwrap();
        assert_eq!(stats.variables, 12);
        assert_eq!(stats.constraints, 8);
        let text = String::from_utf8(buf).unwrap();
        let parsed = parse_lp(&text).unwrap();
        assert_eq!(parsed.objective.len(), 12);
        assert_eq!(parsed.constraints.len(), 8);
        assert_eq!(parsed.binaries.len(), 12);
        for c in &parsed.constraints {
            assert_eq!(c.terms.len(), 3);
            assert_eq!(c.rhs, 1);
        }

        let mut buf = Vec::new();
        let stats = export_ilp(params(3, 2), &mut buf, None).unwrap();
        assert_eq!(stats.variables, 60);
        assert_eq!(stats.constraints, 60);
    }

    #[test]
    fn tiny_model_solves_to_four() {
        // brute-force 0/1 assignment over the parsed (2,2) model
        let mut buf = Vec::new();
        export_ilp(params(2, 2), &mut buf, None).unwrap();
        let parsed = parse_lp(&String::from_utf8(buf).unwrap()).unwrap();
        let vars: Vec<&String> = parsed.objective.iter().map(|(_, v)| v).collect();
        let var_index: HashMap<&String, usize> =
            vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut best = 0u32;
        for mask in 0u32..(1 << vars.len()) {
            let feasible = parsed.constraints.iter().all(|c| {
                let total: u64 = c
                    .terms
                    .iter()
                    .map(|(coef, v)| coef * u64::from(mask >> var_index[v] & 1))
                    .sum();
                total <= c.rhs
            });
            if feasible {
                best = best.max(mask.count_ones());
            }
        }
        assert_eq!(best, 4);
    }

    #[test]
    fn orbit_export_aggregates_variables() {
        let gens = parse_generators("(1 2)", 2).unwrap();
        let group = group_closure(2, &gens).unwrap();
        let mut buf = Vec::new();
        let stats = export_ilp(params(2, 2), &mut buf, Some(&group)).unwrap();
        assert!(stats.variables < 12);
        let parsed = parse_lp(&String::from_utf8(buf).unwrap()).unwrap();
        assert_eq!(parsed.constraints.len(), 8);
    }

    #[test]
    fn export_refuses_huge_spaces() {
        let mut buf = Vec::new();
        assert!(matches!(
            export_ilp(params(10, 2), &mut buf, None),
            Err(SearchError::TooLarge { .. })
        ));
    }
}
