//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `cargo test --test acceptance -- --nocapture`). Every check
//! runs by exhaustive enumeration unless stated otherwise.

use hatlab::datasets;
use hatlab::designs::{set_to_od, steiner_to_set, symmetric_latin_n4};
use hatlab::rational::Rational;
use hatlab::search::{export_ilp_to_path, max_independent_set, parse_lp, SearchConfig, SearchError};
use hatlab::simulate::{evaluate, PlayMode};
use hatlab::space::{AssignmentSet, SpaceParams};
use hatlab::strategy::{
    best_residues, default_window, teirlinck_criterion, StrategySpec,
};

fn pass(criterion: u32, detail: &str) {
    println!("ACCEPTANCE {criterion} PASS: {detail}");
}

/// The perfect cells checked by criterion 1, with the construction behind
/// each: `(label, set, expected size)`.
fn perfect_cells() -> Vec<(String, AssignmentSet, u64)> {
    let mut cells: Vec<(String, AssignmentSet, u64)> = Vec::new();
    let mut push = |label: String, set: AssignmentSet, expected: u64| {
        cells.push((label, set, expected));
    };

    // k=1 row via parity
    let parity_row = [1u64, 3, 12, 60, 360, 2520, 20160];
    for (n, &expected) in (1..=7).zip(&parity_row) {
        let spec = StrategySpec::parity_k1(n).unwrap();
        push(format!("parity_k1 n={n}"), spec.generate(), expected);
    }
    // k=2 row
    push("modular_k2 n=1".into(), StrategySpec::modular_k2(1, None).unwrap().generate(), 1);
    push("cyclic_n2 k=2".into(), StrategySpec::cyclic_n2(2).unwrap().generate(), 4);
    push("affine_n3_k2".into(), StrategySpec::affine_n3_k2().unwrap().generate(), 20);
    push("n4_even_k k=2".into(), StrategySpec::n4_even_k(2).unwrap().generate(), 120);
    push("dataset n5k2".into(), datasets::resolve_set("n5k2").unwrap(), 840);
    push("dataset n6k2".into(), datasets::resolve_set("n6k2").unwrap(), 6720);
    // n=2 column
    for k in 1..=6usize {
        let spec = StrategySpec::cyclic_n2(k).unwrap();
        push(format!("cyclic_n2 k={k}"), spec.generate(), k as u64 + 2);
    }
    // n=3 column: odd k via the idempotent square, even k via the affine rule
    let n3_sizes = [12u64, 20, 30, 42, 56, 72];
    for (k, &expected) in (1..=6usize).zip(&n3_sizes) {
        let spec = if k % 2 == 1 {
            StrategySpec::n3_odd_k(k).unwrap()
        } else {
            StrategySpec::n3_even_k(k).unwrap()
        };
        push(format!("n3 k={k}"), spec.generate(), expected);
    }
    // k=4 n=3 also via Fano expansion
    push("fano expansion".into(), steiner_to_set(&datasets::fano()).unwrap(), 42);
    // n=4 even k
    push("n4_even_k k=4".into(), StrategySpec::n4_even_k(4).unwrap().generate(), 336);
    // (5,4)
    push("dataset n5k4".into(), datasets::resolve_set("n5k4").unwrap(), 3024);
    cells
}

#[test]
fn criterion_1_table_perfect_cells() {
    for (label, set, expected) in perfect_cells() {
        let params = set.params();
        assert_eq!(set.len() as u64, expected, "{label}: size");
        assert_eq!(expected, params.perfect_size().unwrap(), "{label}: perfect size");
        assert!(set.check_independent().is_independent(), "{label}: independence");
    }
    pass(1, "all table cells match (n+k)!/(k+1)! and are independent");
}

#[test]
fn criterion_2_strategy_probabilities() {
    for n in 2..=6usize {
        let report =
            evaluate(&StrategySpec::modular_k2(n, None).unwrap(), PlayMode::Strict).unwrap();
        let expected = Rational::new(1, 2 * n.div_ceil(2) as u64 + 1);
        assert_eq!(report.probability, expected, "modular_k2 n={n}");
    }
    for n in 2..=7usize {
        let report =
            evaluate(&StrategySpec::double_parity(n).unwrap(), PlayMode::Strict).unwrap();
        // 1/4 + 1/(4c) = (c+1)/(4c) with c = n+1 (even n) or n+2 (odd n)
        let c = if n % 2 == 0 { n as u64 + 1 } else { n as u64 + 2 };
        let expected = Rational::new(c + 1, 4 * c);
        assert_eq!(report.probability, expected, "double_parity n={n}");
        if n == 7 {
            assert_eq!(report.member_count, 50400, "double_parity n=7 member count");
        }
        if n == 3 {
            assert_eq!(report.probability, Rational::new(18, 60));
        }
    }
    pass(2, "modular and double-parity rates match the exact formulas for n=2..7");
}

/// Every strategy variant in the desk-scale matrix with n+k ≤ 8.
fn equivalence_matrix() -> Vec<StrategySpec> {
    let mut specs = Vec::new();
    for n in 1..=7 {
        specs.push(StrategySpec::parity_k1(n).unwrap());
    }
    for n in 2..=6 {
        specs.push(StrategySpec::modular_k2(n, None).unwrap());
        specs.push(StrategySpec::double_parity(n).unwrap());
    }
    for k in 1..=6 {
        specs.push(StrategySpec::cyclic_n2(k).unwrap());
    }
    specs.push(StrategySpec::affine_n3_k2().unwrap());
    specs.push(StrategySpec::n3_even_k(2).unwrap());
    specs.push(StrategySpec::n3_even_k(4).unwrap());
    specs.push(StrategySpec::n3_odd_k(1).unwrap());
    specs.push(StrategySpec::n3_odd_k(3).unwrap());
    specs.push(StrategySpec::n3_odd_k(5).unwrap());
    specs.push(StrategySpec::n4_even_k(2).unwrap());
    specs.push(StrategySpec::n4_even_k(4).unwrap());
    specs.push(StrategySpec::mod_t(3, 3, 3, 0).unwrap());
    specs.push(StrategySpec::mod_t(4, 3, 3, 0).unwrap());
    specs.push(StrategySpec::mod_t(3, 4, 8, 0).unwrap());
    specs.push(StrategySpec::mod_t(4, 4, 8, 0).unwrap());
    specs.push(StrategySpec::mod_t(3, 5, 12, 0).unwrap());
    for (n, k) in [(3usize, 2usize), (4, 2), (5, 2), (4, 3), (5, 3)] {
        let window = default_window(k);
        let (rs, rp, _) = best_residues(n, k, window).unwrap();
        specs.push(StrategySpec::appendix(n, k, Some(window), rs, rp).unwrap());
    }
    for id in ["dp18_n3k2", "app96_n4k2", "od_2_3_5", "fano", "n5k2", "n6k2"] {
        specs.push(StrategySpec::dataset(id, datasets::resolve_set(id).unwrap()));
    }
    specs.retain(|s| s.space().n + s.space().k <= 8);
    specs
}

#[test]
fn criterion_3_strict_play_equivalence() {
    let specs = equivalence_matrix();
    let mut checked = 0;
    for spec in &specs {
        // strict evaluation internally asserts win <=> membership on every
        // assignment and errors out on any mismatch
        let report = evaluate(spec, PlayMode::Strict)
            .unwrap_or_else(|e| panic!("{}: {e}", spec.spec_string()));
        assert_eq!(
            report.win_count, report.member_count,
            "{} wins exactly on members",
            spec.spec_string()
        );
        checked += 1;
    }
    pass(3, &format!("strict play wins exactly on members for {checked} strategy instances"));
}

#[test]
fn criterion_4_design_equivalences() {
    let od = datasets::od_2_3_5();
    od.validate().unwrap();
    assert_eq!((od.t, od.n, od.v), (2, 3, 5));
    let od_set = od.to_set().unwrap();
    let affine = StrategySpec::affine_n3_k2().unwrap().generate();
    assert!(od_set.same_members(&affine), "OD columns equal the affine set");

    for (label, set, _) in perfect_cells() {
        let params = set.params();
        let od = set_to_od(&set).unwrap_or_else(|e| panic!("{label}: {e}"));
        assert_eq!(od.t, params.n - 1, "{label}");
        assert_eq!(od.v, params.n + params.k, "{label}");
        od.validate().unwrap_or_else(|e| panic!("{label}: {e}"));
    }
    pass(4, "every perfect set round-trips through a valid ordered design");
}

#[test]
fn criterion_5_exact_search() {
    let cases = [((2usize, 2usize), 4usize), ((3, 2), 20), ((2, 4), 6)];
    for ((n, k), alpha) in cases {
        let params = SpaceParams::new(n, k).unwrap();
        let result = max_independent_set(params, &SearchConfig::default()).unwrap();
        assert!(result.optimal, "({n},{k}) optimal");
        assert_eq!(result.best_set.len(), alpha, "({n},{k}) alpha");
        assert!(result.wall_time.as_secs() < 60, "({n},{k}) under a minute");
    }
    pass(5, "exact search proves alpha = 4, 20, 6 for (2,2), (3,2), (2,4)");
}

#[test]
fn criterion_6_deletion_code_strategy() {
    for (n, k) in [(3usize, 2usize), (4, 2), (5, 2), (4, 3), (5, 3)] {
        let window = default_window(k);
        let (rs, rp, count) = best_residues(n, k, window).unwrap();
        let space = SpaceParams::new(n, k).unwrap().space_size().unwrap();
        // count >= space/(4(k+1)B), compared without rounding
        assert!(
            count * 4 * (k as u64 + 1) * window as u64 >= space,
            "(n,k)=({n},{k}): best ({rs},{rp}) count {count} below the density bound"
        );
        let direct =
            StrategySpec::appendix(n, k, Some(window), rs, rp).unwrap().generate().len() as u64;
        assert_eq!(direct, count, "(n,k)=({n},{k}): argmax count is reproducible");
    }
    let listing = datasets::app96_n4k2();
    assert_eq!(listing.len(), 96);
    assert!(listing.check_independent().is_independent());
    pass(6, "best-residue counts meet 1/(4(k+1)B) and the 96-element listing is independent");
}

#[test]
fn criterion_7_teirlinck_criterion() {
    for k in [6usize, 10, 12, 16, 18, 22, 24, 26, 28, 30, 31, 36] {
        assert!(teirlinck_criterion(5, k), "n=5 k={k}");
    }
    fn is_prime(x: usize) -> bool {
        x >= 2 && (2..x).take_while(|d| d * d <= x).all(|d| x % d != 0)
    }
    for n in 1..=10 {
        for k in n..=60 {
            if is_prime(k + 1) {
                assert!(teirlinck_criterion(n, k), "n={n} k={k} with k+1 prime");
            }
        }
    }
    assert!(!teirlinck_criterion(4, 3));
    pass(7, "criterion holds on the n=5 list and prime k+1 >= n+1, fails at (4,3)");
}

#[test]
fn criterion_8_latin_square_validators() {
    let flags = datasets::latin6_n3k3().validate().unwrap();
    assert!(flags.idempotent);
    let flags = datasets::latin6_n4k2().validate().unwrap();
    assert!(flags.symmetric);
    assert_eq!(flags.constant_diagonal, Some(6));
    // pinned relabeling: original 0-based entries shift up by one in place
    assert_eq!(symmetric_latin_n4(2).unwrap(), datasets::latin6_n4k2());
    pass(8, "both embedded squares validate and the k=2 construction matches the embedded one");
}

#[test]
fn criterion_9_out_of_scope_boundaries() {
    let params = SpaceParams::new(7, 2).unwrap();
    // the exact search refuses the (7,2) space instead of running for days
    let refused = max_independent_set(params, &SearchConfig::default());
    assert!(matches!(refused, Err(SearchError::TooLarge { .. })));

    // ...but the ILP model must still export and be syntactically valid
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a_9_7.lp");
    let stats = export_ilp_to_path(params, &path, None).unwrap();
    assert_eq!(stats.variables, 181_440);
    assert_eq!(stats.constraints, 7 * 60_480);
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = parse_lp(&text).unwrap();
    assert_eq!(parsed.objective.len(), 181_440);
    assert_eq!(parsed.constraints.len(), 423_360);
    assert!(parsed.constraints.iter().all(|c| c.terms.len() == 3 && c.rhs == 1));
    pass(9, "(7,2) exact mode refused; its 181440-variable LP exports and parses cleanly");
}
