//! Python bindings: the main types and operations, driven in-process.
//!
//! Assignments cross the boundary as lists of 1-based colors; structured
//! reports come back as JSON strings (`*_json` methods) so Python callers can
//! `json.loads` them.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hatlab::perm::{group_closure, orbit_expand, parse_generators, Permutation};
use hatlab::search::{export_ilp_to_path, max_independent_set, SearchConfig, SearchMode};
use hatlab::simulate::{birthday_bound, evaluate, monte_carlo, play, Guess, PlayMode};
use hatlab::space::{AssignmentSet, HatAssignment, Independence, SpaceParams};
use hatlab::strategy::{parse_spec, teirlinck_criterion, StrategySpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn space(n: usize, k: usize) -> PyResult<SpaceParams> {
    SpaceParams::new(n, k).map_err(value_err)
}

/// Lists of ints cross the boundary as `u32`; colors are internally `u8`.
fn colors_in(colors: Vec<u32>) -> PyResult<Vec<u8>> {
    colors
        .into_iter()
        .map(|c| u8::try_from(c).map_err(|_| PyValueError::new_err(format!("color {c} too large"))))
        .collect()
}

fn colors_out(colors: &[u8]) -> Vec<u32> {
    colors.iter().map(|&c| c as u32).collect()
}

fn to_set(n: usize, k: usize, members: Vec<Vec<u32>>) -> PyResult<AssignmentSet> {
    let rows = members.into_iter().map(colors_in).collect::<PyResult<Vec<_>>>()?;
    AssignmentSet::from_color_rows(space(n, k)?, rows, "python".into()).map_err(value_err)
}

fn mode_from_str(mode: &str) -> PyResult<PlayMode> {
    match mode {
        "strict" => Ok(PlayMode::Strict),
        "greedy" | "greedy_fallback" => Ok(PlayMode::GreedyFallback),
        other => Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    }
}

/// Number of hat assignments, (n+k)!/k!.
#[pyfunction]
fn space_size(n: usize, k: usize) -> PyResult<u64> {
    space(n, k)?.space_size().map_err(value_err)
}

/// Size of a perfect independent set, (n+k)!/(k+1)!.
#[pyfunction]
fn perfect_size(n: usize, k: usize) -> PyResult<u64> {
    space(n, k)?.perfect_size().map_err(value_err)
}

/// All assignments of the space in lexicographic order.
#[pyfunction]
fn enumerate_space(n: usize, k: usize) -> PyResult<Vec<Vec<u32>>> {
    Ok(space(n, k)?.enumerate().map(|a| colors_out(a.colors())).collect())
}

/// None if the set is independent, else one violating (adjacent) pair.
#[pyfunction]
fn check_independent(
    n: usize,
    k: usize,
    members: Vec<Vec<u32>>,
) -> PyResult<Option<(Vec<u32>, Vec<u32>)>> {
    let set = to_set(n, k, members)?;
    Ok(match set.check_independent() {
        Independence::Independent => None,
        Independence::Violation(a, b) => Some((colors_out(a.colors()), colors_out(b.colors()))),
    })
}

/// Parity ("even"/"odd") of a one-line permutation image.
#[pyfunction]
fn parity(image: Vec<u32>) -> PyResult<String> {
    let p = Permutation::from_image(colors_in(image)?).map_err(value_err)?;
    Ok(p.parity().to_string())
}

/// One-line image of a cycle-notation permutation over 1..=degree.
#[pyfunction]
fn parse_cycles(text: &str, degree: usize) -> PyResult<Vec<u32>> {
    Ok(colors_out(Permutation::parse_cycles(text, degree).map_err(value_err)?.image()))
}

/// Order of the group generated by semicolon-separated cycle generators.
#[pyfunction]
fn group_order(generators: &str, degree: usize) -> PyResult<usize> {
    let gens = parse_generators(generators, degree).map_err(value_err)?;
    Ok(group_closure(degree, &gens).map_err(value_err)?.order())
}

/// Orbit of seed assignments under a group acting on positions.
#[pyfunction]
fn expand_orbit(
    n: usize,
    k: usize,
    seeds: Vec<Vec<u32>>,
    generators: &str,
) -> PyResult<Vec<Vec<u32>>> {
    let seeds = to_set(n, k, seeds)?;
    let gens = parse_generators(generators, n).map_err(value_err)?;
    let group = group_closure(n, &gens).map_err(value_err)?;
    let orbit = orbit_expand(&seeds, &group).map_err(value_err)?;
    Ok(orbit.iter().map(|a| colors_out(a.colors())).collect())
}

/// Prime-factorization existence criterion for perfect strategies.
#[pyfunction]
fn teirlinck(n: usize, k: usize) -> bool {
    teirlinck_criterion(n, k)
}

/// Birthday lower bound t!/((t-k)!·t^k) as an exact "p/q" string.
#[pyfunction]
fn birthday(t: u64, k: u64) -> String {
    birthday_bound(t, k).to_string()
}

/// Exact or greedy maximum-independent-set search; returns a JSON report.
#[pyfunction]
#[pyo3(signature = (n, k, exact=true, time_limit=60, ceiling=5040))]
fn search_alpha(n: usize, k: usize, exact: bool, time_limit: u64, ceiling: u64) -> PyResult<String> {
    let cfg = SearchConfig {
        mode: if exact { SearchMode::ExactBacktracking } else { SearchMode::Greedy },
        time_limit: std::time::Duration::from_secs(time_limit),
        ceiling,
        ..Default::default()
    };
    let result = max_independent_set(space(n, k)?, &cfg).map_err(value_err)?;
    Ok(serde_json::json!({
        "size": result.best_set.len(),
        "optimal": result.optimal,
        "nodes": result.nodes_explored,
        "timed_out": result.timed_out,
    })
    .to_string())
}

/// Writes the LP-format independent-set model to a file.
#[pyfunction]
fn export_ilp(n: usize, k: usize, path: &str) -> PyResult<(u64, u64)> {
    let stats = export_ilp_to_path(space(n, k)?, path, None).map_err(value_err)?;
    Ok((stats.variables, stats.constraints))
}

/// A named guessing strategy over a fixed space.
///
/// Usage from Python:
///
///     s = Strategy("double_parity", n=3)
///     s.count()            # 18
///     s.member([1, 2, 3])  # True
///     json.loads(s.evaluate_json())["probability"]  # "3/10"
#[pyclass]
struct Strategy {
    spec: StrategySpec,
}

#[pymethods]
impl Strategy {
    #[new]
    #[pyo3(signature = (spec, n=None, k=None))]
    fn new(spec: &str, n: Option<usize>, k: Option<usize>) -> PyResult<Self> {
        let spec = parse_spec(spec, n, k).map_err(value_err)?;
        Ok(Strategy { spec })
    }

    /// Canonical spec string.
    fn spec_string(&self) -> String {
        self.spec.spec_string()
    }

    fn n(&self) -> usize {
        self.spec.space().n
    }

    fn k(&self) -> usize {
        self.spec.space().k
    }

    fn warnings(&self) -> Vec<String> {
        self.spec.warnings().to_vec()
    }

    /// Membership test for one assignment.
    fn member(&self, assignment: Vec<u32>) -> PyResult<bool> {
        let a = HatAssignment::new(colors_in(assignment)?, self.spec.space()).map_err(value_err)?;
        Ok(self.spec.member(&a))
    }

    /// The assumed set as a list of assignments.
    fn generate(&self) -> Vec<Vec<u32>> {
        self.spec.generate().iter().map(|a| colors_out(a.colors())).collect()
    }

    /// Size of the assumed set.
    fn count(&self) -> usize {
        self.spec.generate().len()
    }

    /// Exhaustive evaluation report as JSON.
    #[pyo3(signature = (mode="strict"))]
    fn evaluate_json(&self, mode: &str) -> PyResult<String> {
        let report = evaluate(&self.spec, mode_from_str(mode)?).map_err(value_err)?;
        serde_json::to_string(&report).map_err(value_err)
    }

    /// Play one assignment; returns (guesses, win) where an abstain is 0.
    #[pyo3(signature = (assignment, mode="strict"))]
    fn play(&self, assignment: Vec<u32>, mode: &str) -> PyResult<(Vec<u32>, bool)> {
        let a = HatAssignment::new(colors_in(assignment)?, self.spec.space()).map_err(value_err)?;
        let set = self.spec.generate();
        let t = play(&a, &set, mode_from_str(mode)?).map_err(value_err)?;
        let guesses = t
            .guesses
            .iter()
            .map(|g| match g {
                Guess::Color(c) => *c as u32,
                Guess::Abstain => 0,
            })
            .collect();
        Ok((guesses, t.win))
    }

    /// Monte Carlo estimate as (mean, half_width), deterministic per seed.
    #[pyo3(signature = (samples, seed=0, mode="strict"))]
    fn monte_carlo(&self, samples: u64, seed: u64, mode: &str) -> PyResult<(f64, f64)> {
        let e = monte_carlo(&self.spec, samples, seed, mode_from_str(mode)?).map_err(value_err)?;
        Ok((e.mean, e.half_width))
    }

    fn __repr__(&self) -> String {
        format!(
            "Strategy({}, n={}, k={})",
            self.spec.spec_string(),
            self.spec.space().n,
            self.spec.space().k
        )
    }
}

/// Ids of the embedded datasets.
#[pyfunction]
fn dataset_ids() -> Vec<String> {
    hatlab::datasets::CATALOG.iter().map(|(id, _)| id.to_string()).collect()
}

/// Members of an embedded dataset (or expansion alias such as "n5k2").
#[pyfunction]
fn load_dataset(id: &str) -> PyResult<Vec<Vec<u32>>> {
    let set = hatlab::datasets::resolve_set(id)
        .ok_or_else(|| PyValueError::new_err(format!("no set-valued dataset '{id}'")))?;
    Ok(set.iter().map(|a| colors_out(a.colors())).collect())
}

#[pymodule]
fn hatlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Strategy>()?;
    m.add_function(wrap_pyfunction!(space_size, m)?)?;
    m.add_function(wrap_pyfunction!(perfect_size, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_space, m)?)?;
    m.add_function(wrap_pyfunction!(check_independent, m)?)?;
    m.add_function(wrap_pyfunction!(parity, m)?)?;
    m.add_function(wrap_pyfunction!(parse_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(group_order, m)?)?;
    m.add_function(wrap_pyfunction!(expand_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(teirlinck, m)?)?;
    m.add_function(wrap_pyfunction!(birthday, m)?)?;
    m.add_function(wrap_pyfunction!(search_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(export_ilp, m)?)?;
    m.add_function(wrap_pyfunction!(dataset_ids, m)?)?;
    m.add_function(wrap_pyfunction!(load_dataset, m)?)?;
    Ok(())
}
