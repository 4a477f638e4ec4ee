//! Command-line front end.
//!
//! Exit codes: 0 success/valid, 1 validation failed (with a machine-readable
//! violation), 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::datasets;
use crate::designs::{steiner_to_set, LatinSquare, OrderedDesignArray, SteinerSystem};
use crate::perm::{group_closure, orbit_expand, parse_generators, PermGroup};
use crate::rational::Rational;
use crate::search::{
    clique_upper_bound, export_ilp_to_path, max_independent_set, SearchConfig, SearchError,
    SearchMode,
};
use crate::simulate::{evaluate, play, EvalReport, GameTranscript, Guess, PlayMode};
use crate::space::{
    parse_assignment_text, AssignmentSet, HatAssignment, Independence, SpaceParams,
};
use crate::strategy::{best_residues, parse_spec, teirlinck_criterion, StrategySpec};

#[derive(Debug, Parser)]
#[command(
    name = "hatlab",
    version,
    about = "Hat-guessing strategies, arrangement-graph independent sets, and designs"
)]
pub struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "HATLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every hat assignment of a space in lexicographic order.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Check a set file (or embedded dataset id) for independence.
    VerifySet { source: String },
    /// Work with a strategy: count, emit, or evaluate its assumed set.
    Strategy {
        /// Strategy spec, e.g. parity_k1, mod_t:t=2,sigma=1, dataset:n5k2.
        spec: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Write the assumed set in the set file format.
        #[arg(long, conflicts_with = "evaluate")]
        emit: bool,
        /// Play every assignment and report exact probabilities.
        #[arg(long)]
        evaluate: bool,
        /// Residue override for modular_k2.
        #[arg(long)]
        residue: Option<u64>,
        /// Modulus override for mod_t.
        #[arg(long)]
        t: Option<u64>,
        /// Target residue override for mod_t.
        #[arg(long)]
        sigma: Option<u64>,
        /// For the appendix code: search all residue pairs and use the best.
        #[arg(long)]
        best_residues: bool,
        /// Guessing mode for --evaluate.
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Destination for --emit (defaults to stdout).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Play a single assignment against a strategy.
    Simulate {
        spec: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// The true assignment, e.g. "2 1" or compact "21".
        #[arg(long)]
        assignment: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// Print each guess, not just the outcome.
        #[arg(long)]
        trace: bool,
    },
    /// Search for a maximum independent set, or export the ILP model.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Exhaustive branch and bound (the default).
        #[arg(long)]
        exact: bool,
        /// Maximal set by greedy insertion.
        #[arg(long, conflicts_with = "exact")]
        greedy: bool,
        /// Write an LP-format model instead of searching.
        #[arg(long, value_name = "PATH")]
        export_ilp: Option<PathBuf>,
        /// Time limit in seconds for exact mode.
        #[arg(long, default_value_t = 60)]
        time_limit: u64,
        /// Largest vertex count accepted in exact mode.
        #[arg(long, default_value_t = 5040)]
        ceiling: u64,
        /// Restrict to sets invariant under these generators, e.g. "(1 2);(3 4)".
        #[arg(long)]
        symmetry: Option<String>,
        /// Seed the search with a known independent set file.
        #[arg(long)]
        seed_file: Option<PathBuf>,
        /// Write the best set found to this file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Expand seed assignments under a permutation group acting on positions.
    Orbit {
        /// Seed set: a file path or embedded dataset id.
        #[arg(long)]
        seeds: String,
        /// Generators in cycle notation, separated by semicolons.
        #[arg(long)]
        generators: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate an ordered design array (CSV rows; or a dataset id).
    ValidateOd { source: String },
    /// Validate a Steiner system (one block per line; or a dataset id).
    ValidateSteiner { source: String },
    /// Validate a Latin square (m rows of m entries; or a dataset id).
    ValidateLatin { source: String },
    /// Expand a Steiner system S(n-1, n, m) into its assignment set.
    ExpandSteiner {
        source: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the prime-factorization criterion for perfect strategies.
    Teirlinck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Reproduce the perfect-strategy table cells at desk scale.
    Table1 {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    GreedyFallback,
}

impl From<ModeArg> for PlayMode {
    fn from(m: ModeArg) -> PlayMode {
        match m {
            ModeArg::Strict => PlayMode::Strict,
            ModeArg::GreedyFallback => PlayMode::GreedyFallback,
        }
    }
}

enum CliError {
    /// Bad invocation or unreadable input: exit 2.
    Usage(String),
    /// Input data failed validation: exit 1. The report was already printed.
    Invalid,
}

impl From<crate::strategy::StrategyError> for CliError {
    fn from(e: crate::strategy::StrategyError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<crate::space::SpaceError> for CliError {
    fn from(e: crate::space::SpaceError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Usage(e.to_string())
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        // ignore failure: the global pool may already exist (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli.command, cli.format) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Invalid) => 1,
    }
}

fn run(command: Command, format: OutputFormat) -> Result<i32, CliError> {
    match command {
        Command::Enumerate { n, k } => cmd_enumerate(n, k, format),
        Command::VerifySet { source } => cmd_verify_set(&source, format),
        Command::Strategy {
            spec,
            n,
            k,
            emit,
            evaluate,
            residue,
            t,
            sigma,
            best_residues,
            mode,
            output,
        } => cmd_strategy(
            &spec, n, k, emit, evaluate, residue, t, sigma, best_residues, mode.into(), output,
            format,
        ),
        Command::Simulate { spec, n, k, assignment, mode, trace } => {
            cmd_simulate(&spec, n, k, &assignment, mode.into(), trace, format)
        }
        Command::Search {
            n,
            k,
            exact: _,
            greedy,
            export_ilp,
            time_limit,
            ceiling,
            symmetry,
            seed_file,
            output,
        } => cmd_search(
            n, k, greedy, export_ilp, time_limit, ceiling, symmetry, seed_file, output, format,
        ),
        Command::Orbit { seeds, generators, output } => {
            cmd_orbit(&seeds, &generators, output, format)
        }
        Command::ValidateOd { source } => cmd_validate_od(&source, format),
        Command::ValidateSteiner { source } => cmd_validate_steiner(&source, format),
        Command::ValidateLatin { source } => cmd_validate_latin(&source, format),
        Command::ExpandSteiner { source, output } => cmd_expand_steiner(&source, output, format),
        Command::Teirlinck { n, k } => cmd_teirlinck(n, k, format),
        Command::Table1 { max_n, max_k } => cmd_table1(max_n, max_k, format),
    }
}

fn space(n: usize, k: usize) -> Result<SpaceParams, CliError> {
    SpaceParams::new(n, k).map_err(|e| CliError::Usage(e.to_string()))
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

fn cmd_enumerate(n: usize, k: usize, format: OutputFormat) -> Result<i32, CliError> {
    let params = space(n, k)?;
    match format {
        OutputFormat::Json => {
            let all: Vec<Vec<u8>> = params.enumerate().map(|a| a.colors().to_vec()).collect();
            print_json(&all);
        }
        OutputFormat::Text | OutputFormat::Csv => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for a in params.enumerate() {
                let line = if format == OutputFormat::Csv {
                    a.colors().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                } else {
                    a.to_string()
                };
                writeln!(w, "{line}")?;
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify-set
// ---------------------------------------------------------------------------

/// How a source argument failed to load: unusable invocation (missing file,
/// unknown id) versus readable-but-invalid content.
enum LoadError {
    Usage(String),
    Content(String),
}

fn load_set_file(source: &str) -> Result<AssignmentSet, LoadError> {
    if let Some(set) = datasets::resolve_set(source) {
        return Ok(set);
    }
    if Path::new(source).exists() {
        return AssignmentSet::read_from_path(source).map_err(|e| match e {
            crate::space::SpaceError::Io(e) => LoadError::Usage(e.to_string()),
            other => LoadError::Content(other.to_string()),
        });
    }
    Err(LoadError::Usage(format!(
        "'{source}' is neither a file nor an embedded dataset (known ids: {})",
        datasets::CATALOG.iter().map(|(id, _)| *id).collect::<Vec<_>>().join(", ")
    )))
}

/// Strict loading for commands that consume a set (orbit seeds, search seeds):
/// any load failure is a usage error.
fn load_set_source(source: &str) -> Result<AssignmentSet, CliError> {
    load_set_file(source).map_err(|e| match e {
        LoadError::Usage(msg) | LoadError::Content(msg) => CliError::Usage(msg),
    })
}

#[derive(Serialize)]
struct VerifyReport {
    source: String,
    n: usize,
    k: usize,
    size: u64,
    independent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationReport>,
    perfect: bool,
    probability: Rational,
}

#[derive(Serialize)]
struct ViolationReport {
    kind: &'static str,
    a: String,
    b: String,
}

fn cmd_verify_set(source: &str, format: OutputFormat) -> Result<i32, CliError> {
    let set = match load_set_file(source) {
        Ok(set) => set,
        Err(LoadError::Usage(msg)) => return Err(CliError::Usage(msg)),
        Err(LoadError::Content(msg)) => {
            return print_validation(source, "assignment_set", Err(msg), format)
        }
    };
    let params = set.params();
    let space_size = params.space_size()?;
    let (independent, violation) = match set.check_independent() {
        Independence::Independent => (true, None),
        Independence::Violation(a, b) => (
            false,
            Some(ViolationReport { kind: "adjacent_pair", a: a.to_string(), b: b.to_string() }),
        ),
    };
    let report = VerifyReport {
        source: source.to_string(),
        n: params.n,
        k: params.k,
        size: set.len() as u64,
        independent,
        violation,
        perfect: set.is_perfect()?,
        probability: Rational::new(set.len() as u64, space_size),
    };
    match format {
        OutputFormat::Json => print_json(&report),
        OutputFormat::Csv => {
            println!("source,n,k,size,independent,perfect,probability");
            println!(
                "{},{},{},{},{},{},{}",
                report.source,
                report.n,
                report.k,
                report.size,
                report.independent,
                report.perfect,
                report.probability
            );
        }
        OutputFormat::Text => {
            println!("source: {}", report.source);
            println!("space: n={} k={}", report.n, report.k);
            println!("size: {}", report.size);
            println!("independent: {}", report.independent);
            if let Some(v) = &report.violation {
                println!(
                    "violation: {}",
                    serde_json::to_string(v).expect("violation serializes")
                );
            }
            println!("perfect: {}", report.perfect);
            println!("probability: {}", report.probability);
        }
    }
    if report.independent {
        Ok(0)
    } else {
        Err(CliError::Invalid)
    }
}

// ---------------------------------------------------------------------------
// strategy
// ---------------------------------------------------------------------------

fn merge_spec_params(spec: &str, extras: &[(&str, Option<String>)]) -> Result<String, CliError> {
    let mut merged = spec.to_string();
    for (key, value) in extras {
        let Some(value) = value else { continue };
        if merged.contains(&format!("{key}=")) {
            return Err(CliError::Usage(format!(
                "parameter '{key}' given both in the spec string and as a flag"
            )));
        }
        if merged.contains(':') {
            merged.push(',');
        } else {
            merged.push(':');
        }
        merged.push_str(&format!("{key}={value}"));
    }
    Ok(merged)
}

#[allow(clippy::too_many_arguments)]
fn cmd_strategy(
    spec_text: &str,
    n: Option<usize>,
    k: Option<usize>,
    emit: bool,
    do_evaluate: bool,
    residue: Option<u64>,
    t: Option<u64>,
    sigma: Option<u64>,
    use_best_residues: bool,
    mode: PlayMode,
    output: Option<PathBuf>,
    format: OutputFormat,
) -> Result<i32, CliError> {
    let merged = merge_spec_params(
        spec_text,
        &[
            ("r", residue.map(|v| v.to_string())),
            ("t", t.map(|v| v.to_string())),
            ("sigma", sigma.map(|v| v.to_string())),
        ],
    )?;
    let mut spec = parse_spec(&merged, n, k)?;
    if use_best_residues {
        let base = spec_base_name(&merged);
        if base != "appendix" && base != "appendix_code" {
            return Err(CliError::Usage("--best-residues only applies to appendix".into()));
        }
        let params = spec.space();
        let window = match spec.kind() {
            crate::strategy::StrategyKind::AppendixCode(p) => p.window,
            _ => unreachable!("appendix spec"),
        };
        let (rs, rp, _) = best_residues(params.n, params.k, window)?;
        spec = StrategySpec::appendix(params.n, params.k, Some(window), rs, rp)?;
    }
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }

    if emit {
        let set = spec.generate();
        match output {
            Some(path) => set.write_to_path(path)?,
            None => set.write_to(std::io::stdout().lock())?,
        }
        return Ok(0);
    }
    if do_evaluate {
        let report = evaluate(&spec, mode).map_err(sim_error)?;
        print_eval_report(&report, format);
        return Ok(0);
    }
    let set = spec.generate();
    let summary = serde_json::json!({
        "spec": spec.spec_string(),
        "n": spec.space().n,
        "k": spec.space().k,
        "members": set.len(),
        "space": spec.space().space_size()?,
        "independent": set.check_independent().is_independent(),
    });
    match format {
        OutputFormat::Json => print_json(&summary),
        _ => {
            println!("spec: {}", spec.spec_string());
            println!("space: {}", spec.space());
            println!("members: {}", set.len());
            println!("independent: {}", summary["independent"]);
        }
    }
    Ok(0)
}

fn spec_base_name(spec: &str) -> &str {
    spec.split(':').next().unwrap_or(spec).trim()
}

fn sim_error(e: crate::simulate::SimError) -> CliError {
    eprintln!("error: {e}");
    CliError::Invalid
}

fn print_eval_report(report: &EvalReport, format: OutputFormat) {
    match format {
        OutputFormat::Json => print_json(report),
        OutputFormat::Csv => {
            println!("{}", EvalReport::csv_header());
            println!("{}", report.csv_row());
        }
        OutputFormat::Text => {
            println!("spec: {}", report.spec);
            println!("members: {}", report.member_count);
            println!("space: {}", report.space);
            println!("wins: {}", report.win_count);
            println!("probability: {}", report.probability);
            println!("ceiling: {}", report.ceiling);
            for check in &report.bound_checks {
                println!("bound {}: {}", check.name, if check.satisfied { "ok" } else { "violated" });
            }
        }
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(
    spec_text: &str,
    n: Option<usize>,
    k: Option<usize>,
    assignment: &str,
    mode: PlayMode,
    trace: bool,
    format: OutputFormat,
) -> Result<i32, CliError> {
    let spec = parse_spec(spec_text, n, k)?;
    let params = spec.space();
    let colors = parse_assignment_text(assignment, params, 0)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let a = HatAssignment::new(colors, params).map_err(|e| CliError::Usage(e.to_string()))?;
    let set = spec.generate();
    if let Independence::Violation(x, y) = set.check_independent() {
        eprintln!("error: assumed set is not independent: {x} | {y}");
        return Err(CliError::Invalid);
    }
    let transcript = play(&a, &set, mode).map_err(sim_error)?;
    print_transcript(&transcript, trace, format);
    Ok(0)
}

fn guess_text(g: &Guess) -> String {
    match g {
        Guess::Color(c) => c.to_string(),
        Guess::Abstain => "abstain".into(),
    }
}

fn print_transcript(t: &GameTranscript, trace: bool, format: OutputFormat) {
    match format {
        OutputFormat::Json => {
            let guesses: Vec<String> = t.guesses.iter().map(guess_text).collect();
            print_json(&serde_json::json!({
                "assignment": t.assignment.to_string(),
                "guesses": guesses,
                "win": t.win,
            }));
        }
        _ => {
            println!("assignment: {}", t.assignment);
            if trace {
                for (i, g) in t.guesses.iter().enumerate() {
                    println!("prisoner {}: {}", i + 1, guess_text(g));
                }
            }
            println!("win: {}", t.win);
        }
    }
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: usize,
    k: usize,
    greedy: bool,
    export: Option<PathBuf>,
    time_limit: u64,
    ceiling: u64,
    symmetry: Option<String>,
    seed_file: Option<PathBuf>,
    output: Option<PathBuf>,
    format: OutputFormat,
) -> Result<i32, CliError> {
    let params = space(n, k)?;
    let symmetry_group: Option<PermGroup> = match &symmetry {
        Some(text) => {
            let gens = parse_generators(text, n).map_err(|e| CliError::Usage(e.to_string()))?;
            Some(group_closure(n, &gens).map_err(|e| CliError::Usage(e.to_string()))?)
        }
        None => None,
    };

    if let Some(path) = export {
        let stats = export_ilp_to_path(params, &path, symmetry_group.as_ref())
            .map_err(search_error)?;
        match format {
            OutputFormat::Json => print_json(&serde_json::json!({
                "path": path.display().to_string(),
                "variables": stats.variables,
                "constraints": stats.constraints,
            })),
            _ => {
                println!("wrote {}", path.display());
                println!("variables: {}", stats.variables);
                println!("constraints: {}", stats.constraints);
            }
        }
        return Ok(0);
    }

    if time_limit == 0 {
        return Err(CliError::Usage("--time-limit must be positive".into()));
    }
    let seed_set = match seed_file {
        Some(path) => {
            Some(AssignmentSet::read_from_path(path).map_err(|e| CliError::Usage(e.to_string()))?)
        }
        None => None,
    };
    let cfg = SearchConfig {
        mode: if greedy { SearchMode::Greedy } else { SearchMode::ExactBacktracking },
        time_limit: Duration::from_secs(time_limit),
        symmetry_group,
        seed_set,
        lower_bound_hint: None,
        ceiling,
    };
    let result = max_independent_set(params, &cfg).map_err(search_error)?;
    if let Some(path) = output {
        result.best_set.write_to_path(path)?;
    }
    match format {
        OutputFormat::Json => print_json(&serde_json::json!({
            "n": n,
            "k": k,
            "size": result.best_set.len(),
            "optimal": result.optimal,
            "upper_bound": clique_upper_bound(params)?,
            "nodes": result.nodes_explored,
            "timed_out": result.timed_out,
            "wall_time_ms": result.wall_time.as_millis() as u64,
        })),
        _ => {
            println!("space: {params}");
            println!("size: {}", result.best_set.len());
            println!("optimal: {}", result.optimal);
            println!("upper bound: {}", clique_upper_bound(params)?);
            println!("nodes: {}", result.nodes_explored);
            println!("timed out: {}", result.timed_out);
            println!("wall time: {:.3}s", result.wall_time.as_secs_f64());
        }
    }
    Ok(0)
}

fn search_error(e: SearchError) -> CliError {
    match e {
        SearchError::TooLarge { .. } => CliError::Usage(e.to_string()),
        SearchError::SeedNotIndependent | SearchError::SeedParamMismatch => {
            eprintln!("error: {e}");
            CliError::Invalid
        }
        other => CliError::Usage(other.to_string()),
    }
}

// ---------------------------------------------------------------------------
// orbit
// ---------------------------------------------------------------------------

fn cmd_orbit(
    seeds: &str,
    generators: &str,
    output: Option<PathBuf>,
    format: OutputFormat,
) -> Result<i32, CliError> {
    let seed_set = load_set_source(seeds)?;
    let n = seed_set.params().n;
    let gens = parse_generators(generators, n).map_err(|e| CliError::Usage(e.to_string()))?;
    let group = group_closure(n, &gens).map_err(|e| CliError::Usage(e.to_string()))?;
    let orbit = orbit_expand(&seed_set, &group).map_err(|e| {
        eprintln!("error: {e}");
        CliError::Invalid
    })?;
    eprintln!(
        "expanded {} seeds under a group of order {} into {} assignments",
        seed_set.len(),
        group.order(),
        orbit.len()
    );
    if format == OutputFormat::Json {
        print_json(&serde_json::json!({
            "seeds": seed_set.len(),
            "group_order": group.order(),
            "size": orbit.len(),
            "independent": orbit.check_independent().is_independent(),
        }));
        if let Some(path) = output {
            orbit.write_to_path(path)?;
        }
        return Ok(0);
    }
    match output {
        Some(path) => orbit.write_to_path(path)?,
        None => orbit.write_to(std::io::stdout().lock())?,
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// validators
// ---------------------------------------------------------------------------

fn print_validation(
    source: &str,
    kind: &str,
    result: Result<serde_json::Value, String>,
    format: OutputFormat,
) -> Result<i32, CliError> {
    let (valid, detail) = match &result {
        Ok(flags) => (true, flags.clone()),
        Err(msg) => (false, serde_json::json!({ "violation": msg })),
    };
    let report = serde_json::json!({
        "source": source,
        "kind": kind,
        "valid": valid,
        "detail": detail,
    });
    match format {
        OutputFormat::Json => print_json(&report),
        _ => {
            println!("source: {source}");
            println!("kind: {kind}");
            println!("valid: {valid}");
            if !valid {
                println!(
                    "violation: {}",
                    serde_json::to_string(&detail).expect("detail serializes")
                );
            } else if detail != serde_json::json!({}) {
                println!("detail: {}", serde_json::to_string(&detail).expect("serializes"));
            }
        }
    }
    if valid {
        Ok(0)
    } else {
        Err(CliError::Invalid)
    }
}

fn design_load_error(e: crate::designs::DesignError) -> LoadError {
    match e {
        crate::designs::DesignError::Io(e) => LoadError::Usage(e.to_string()),
        other => LoadError::Content(other.to_string()),
    }
}

fn load_od_source(source: &str) -> Result<OrderedDesignArray, LoadError> {
    if source == "od_2_3_5" {
        return Ok(datasets::od_2_3_5());
    }
    if Path::new(source).exists() {
        return OrderedDesignArray::read_from_path(source).map_err(design_load_error);
    }
    Err(LoadError::Usage(format!("'{source}' is neither a file nor the od_2_3_5 dataset")))
}

fn cmd_validate_od(source: &str, format: OutputFormat) -> Result<i32, CliError> {
    let od = match load_od_source(source) {
        Ok(od) => od,
        Err(LoadError::Usage(msg)) => return Err(CliError::Usage(msg)),
        Err(LoadError::Content(msg)) => {
            return print_validation(source, "ordered_design", Err(msg), format)
        }
    };
    let result = od
        .validate()
        .map(|()| serde_json::json!({ "t": od.t, "n": od.n, "v": od.v, "columns": od.columns().len() }))
        .map_err(|v| v.to_string());
    print_validation(source, "ordered_design", result, format)
}

fn load_steiner_source(source: &str) -> Result<SteinerSystem, LoadError> {
    if source == "fano" {
        return Ok(datasets::fano());
    }
    if Path::new(source).exists() {
        return SteinerSystem::read_from_path(source).map_err(design_load_error);
    }
    Err(LoadError::Usage(format!("'{source}' is neither a file nor the fano dataset")))
}

fn cmd_validate_steiner(source: &str, format: OutputFormat) -> Result<i32, CliError> {
    let sys = match load_steiner_source(source) {
        Ok(sys) => sys,
        Err(LoadError::Usage(msg)) => return Err(CliError::Usage(msg)),
        Err(LoadError::Content(msg)) => {
            return print_validation(source, "steiner_system", Err(msg), format)
        }
    };
    let result = sys
        .validate()
        .map(|()| {
            serde_json::json!({ "t": sys.t, "n": sys.n, "m": sys.m, "blocks": sys.blocks().len() })
        })
        .map_err(|v| v.to_string());
    print_validation(source, "steiner_system", result, format)
}

fn load_latin_source(source: &str) -> Result<LatinSquare, LoadError> {
    match source {
        "latin6_n3k3" => return Ok(datasets::latin6_n3k3()),
        "latin6_n4k2" => return Ok(datasets::latin6_n4k2()),
        _ => {}
    }
    if Path::new(source).exists() {
        return LatinSquare::read_from_path(source).map_err(design_load_error);
    }
    Err(LoadError::Usage(format!(
        "'{source}' is neither a file nor an embedded square (latin6_n3k3, latin6_n4k2)"
    )))
}

fn cmd_validate_latin(source: &str, format: OutputFormat) -> Result<i32, CliError> {
    let sq = match load_latin_source(source) {
        Ok(sq) => sq,
        Err(LoadError::Usage(msg)) => return Err(CliError::Usage(msg)),
        Err(LoadError::Content(msg)) => {
            return print_validation(source, "latin_square", Err(msg), format)
        }
    };
    let result = sq
        .validate()
        .map(|flags| {
            serde_json::json!({
                "order": sq.order(),
                "idempotent": flags.idempotent,
                "symmetric": flags.symmetric,
                "constant_diagonal": flags.constant_diagonal,
            })
        })
        .map_err(|v| v.to_string());
    print_validation(source, "latin_square", result, format)
}

fn cmd_expand_steiner(
    source: &str,
    output: Option<PathBuf>,
    format: OutputFormat,
) -> Result<i32, CliError> {
    let sys = match load_steiner_source(source) {
        Ok(sys) => sys,
        Err(LoadError::Usage(msg)) => return Err(CliError::Usage(msg)),
        Err(LoadError::Content(msg)) => {
            eprintln!("error: {msg}");
            return Err(CliError::Invalid);
        }
    };
    let set = steiner_to_set(&sys).map_err(|e| {
        eprintln!("error: {e}");
        CliError::Invalid
    })?;
    eprintln!(
        "expanded {} blocks into {} assignments for {}",
        sys.blocks().len(),
        set.len(),
        set.params()
    );
    if format == OutputFormat::Json {
        print_json(&serde_json::json!({
            "blocks": sys.blocks().len(),
            "n": set.params().n,
            "k": set.params().k,
            "size": set.len(),
            "perfect": set.is_perfect()?,
            "independent": set.check_independent().is_independent(),
        }));
        if let Some(path) = output {
            set.write_to_path(path)?;
        }
        return Ok(0);
    }
    match output {
        Some(path) => set.write_to_path(path)?,
        None => set.write_to(std::io::stdout().lock())?,
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// teirlinck
// ---------------------------------------------------------------------------

fn cmd_teirlinck(n: usize, k: usize, format: OutputFormat) -> Result<i32, CliError> {
    let holds = teirlinck_criterion(n, k);
    match format {
        OutputFormat::Json => {
            print_json(&serde_json::json!({ "n": n, "k": k, "perfect_strategy_exists": holds }))
        }
        _ => println!(
            "n={n} k={k}: criterion {}",
            if holds { "holds (a perfect strategy exists)" } else { "does not apply" }
        ),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

const DESK_SCALE_LIMIT: u64 = 200_000;

#[derive(Serialize)]
struct CellReport {
    n: usize,
    k: usize,
    expected: u64,
    construction: Option<String>,
    size: Option<u64>,
    independent: Option<bool>,
    status: String,
}

/// Table cells with known exact independence numbers `(n+k)!/(k+1)!`.
fn is_perfect_cell(n: usize, k: usize) -> bool {
    match k {
        1 => n <= 7,
        2 => n <= 6,
        3 => n <= 3,
        4 => n <= 5,
        5 => n <= 4,
        6 => n <= 6,
        _ => false,
    }
}

fn cell_construction(n: usize, k: usize) -> Option<(String, AssignmentSet)> {
    let build = |spec: Result<StrategySpec, crate::strategy::StrategyError>| {
        spec.ok().map(|s| (s.spec_string(), s.generate()))
    };
    match (n, k) {
        (1, _) => {
            let params = SpaceParams::new(1, k).ok()?;
            let set = AssignmentSet::from_color_rows(params, vec![vec![1]], "singleton".into()).ok()?;
            Some(("singleton".into(), set))
        }
        (_, 1) => build(StrategySpec::parity_k1(n)),
        (2, _) => build(StrategySpec::cyclic_n2(k)),
        (3, _) if k % 2 == 0 => build(StrategySpec::n3_even_k(k)),
        (3, _) => build(StrategySpec::n3_odd_k(k)),
        (4, _) if k % 2 == 0 => build(StrategySpec::n4_even_k(k)),
        (5, 2) => datasets::resolve_set("n5k2").map(|s| ("dataset:n5k2".into(), s)),
        (6, 2) => datasets::resolve_set("n6k2").map(|s| ("dataset:n6k2".into(), s)),
        (5, 4) => datasets::resolve_set("n5k4").map(|s| ("dataset:n5k4".into(), s)),
        _ => None,
    }
}

fn cmd_table1(max_n: usize, max_k: usize, format: OutputFormat) -> Result<i32, CliError> {
    if max_n > 7 || max_k > 6 {
        return Err(CliError::Usage("table covers n ≤ 7 and k ≤ 6".into()));
    }
    let mut cells = Vec::new();
    let mut failures = 0usize;
    for k in 1..=max_k {
        for n in 1..=max_n {
            if !is_perfect_cell(n, k) {
                continue;
            }
            let params = space(n, k)?;
            let expected = params.perfect_size()?;
            let space_size = params.space_size()?;
            let cell = if space_size > DESK_SCALE_LIMIT {
                CellReport {
                    n,
                    k,
                    expected,
                    construction: None,
                    size: None,
                    independent: None,
                    status: "out of desk scale".into(),
                }
            } else {
                match cell_construction(n, k) {
                    None => CellReport {
                        n,
                        k,
                        expected,
                        construction: None,
                        size: None,
                        independent: None,
                        status: "no embedded construction".into(),
                    },
                    Some((name, set)) => {
                        let independent = set.check_independent().is_independent();
                        let pass = independent && set.len() as u64 == expected;
                        if !pass {
                            failures += 1;
                        }
                        CellReport {
                            n,
                            k,
                            expected,
                            construction: Some(name),
                            size: Some(set.len() as u64),
                            independent: Some(independent),
                            status: if pass { "PASS".into() } else { "FAIL".into() },
                        }
                    }
                }
            };
            cells.push(cell);
        }
    }
    match format {
        OutputFormat::Json => print_json(&cells),
        OutputFormat::Csv => {
            println!("n,k,expected,construction,size,independent,status");
            for c in &cells {
                println!(
                    "{},{},{},{},{},{},{}",
                    c.n,
                    c.k,
                    c.expected,
                    c.construction.as_deref().unwrap_or("-"),
                    c.size.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                    c.independent.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
                    c.status
                );
            }
        }
        OutputFormat::Text => {
            for c in &cells {
                println!(
                    "n={} k={} expected={} construction={} size={} {}",
                    c.n,
                    c.k,
                    c.expected,
                    c.construction.as_deref().unwrap_or("-"),
                    c.size.map(|s| s.to_string()).unwrap_or_else(|| "-".into()),
                    c.status
                );
            }
            let checked = cells.iter().filter(|c| c.construction.is_some()).count();
            println!("checked {checked} cells, {failures} failures");
        }
    }
    if failures == 0 {
        Ok(0)
    } else {
        Err(CliError::Invalid)
    }
}
