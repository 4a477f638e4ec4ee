//! Built-in data: known independent sets, orbit seeds with their symmetry
//! groups, design arrays, and the two 6×6 Latin squares. Everything here is
//! embedded in the binary and revalidated by the test suite.

use crate::designs::{LatinSquare, OrderedDesignArray, SteinerSystem};
use crate::perm::{group_closure, parse_generators, PermGroup};
use crate::space::{AssignmentSet, Color, SpaceParams};

/// The 18 double-parity triples for three prisoners and two extra hats.
const DP18_N3K2: &str = "
123 134 145 152 215 231 253 312 325
341 354 413 435 451 514 521 532 543
";

/// A 3×20 ordered design OD_1(2,3,5), stored one array row per line.
const OD_2_3_5: &str = "
1 1 1 1 2 2 2 2 3 3 3 3 4 4 4 4 5 5 5 5
2 3 4 5 1 3 4 5 1 2 4 5 1 2 3 5 1 2 3 4
4 2 5 3 4 5 3 1 2 5 1 4 5 3 1 2 3 1 4 2
";

/// 42 seed assignments for (n=5, k=2); their orbit under the order-20 group
/// generated by (2 4)(3 5) and (1 5 3 2) is a perfect independent set of 840.
const SEEDS42_N5K2: &str = "
12563 12643 12354 12534 13654 23564 12465 12635 13645 12346 12456 23546 41327 42317
51247 51427 52137 52347 53127 53417 54237 54317 61237 61347 61457 61527 62147 62357
62417 62537 63157 63217 63427 63547 64137 64257 64327 64517 65127 65247 65317 65437
";

const SEEDS42_GENERATORS: &str = "(2 4)(3 5); (1 5 3 2)";

/// 56 seed assignments for (n=6, k=2); their orbit under the order-120 group
/// generated by (1 2)(4 5) and (2 6 3 5) is a perfect independent set of 6720.
const SEEDS56_N6K2: &str = "
123456 123468 123475 123487 123548 123567 123574 123586
123645 123657 123678 123684 123746 123758 123764 123785
123847 123854 123865 123876 124568 124576 124658 124687
124765 124786 124857 124875 125768 125867 134578 134587
134657 134685 134756 134768 134865 134876 135678 135786
145687 145876 234567 234586 234678 234687 234758 234765
234856 234875 235867 235876 245768 245786 345678 345867
";

const SEEDS56_GENERATORS: &str = "(1 2)(4 5); (2 6 3 5)";

/// 126 seed assignments for (n=5, k=4); permuting the first four positions in
/// all 24 ways yields a perfect independent set of 3024.
const SEEDS126_N5K4: &str = "
12349 12356 12367 12378 12384 12395 12458 12463 12475 12487 12496 12564 12573 12589
12597 12679 12685 12698 12786 12794 12893 13457 13465 13472 13486 13498 13568 13579
13582 13594 13674 13689 13692 13785 13796 13897 14569 14576 14583 14592 14678 14682
14697 14789 14793 14895 15672 15687 15693 15784 15798 15896 16783 16795 16894 17892
23451 23468 23476 23485 23497 23569 23574 23587 23598 23675 23681 23694 23789 23791
23896 24567 24579 24586 24593 24671 24689 24695 24783 24798 24891 25678 25683 25691
25781 25796 25894 26784 26793 26897 27895 34562 34578 34589 34596 34679 34687 34691
34781 34795 34892 35671 35684 35697 35786 35792 35891 36782 36798 36895 37894 45673
45681 45698 45782 45791 45897 46785 46792 46893 47896 56789 56794 56892 57893 67891
";

const SEEDS126_GENERATORS: &str = "(1 2); (1 2 3 4)";

/// A 96-element independent set for (n=4, k=2), stored as full 6-digit
/// augmented permutations and truncated to 4-prefixes on load.
const APP96_N4K2: &str = "
125346 132546 153246 213546 235146 251346 315246 321546 352146 512346 523146 531246
123645 136245 162345 216345 231645 263145 312645 326145 361245 613245 621345 632145
124536 145236 152436 215436 241536 254136 412536 425136 451236 514236 521436 542136
126435 142635 164235 214635 246135 261435 416235 421635 462135 612435 624135 641235
135426 143526 154326 314526 345126 351426 415326 431526 453126 513426 534126 541326
134625 146325 163425 316425 341625 364125 413625 436125 461325 614325 631425 643125
234516 245316 253416 325416 342516 354216 423516 435216 452316 524316 532416 543216
236415 243615 264315 324615 346215 362415 426315 432615 463215 623415 634215 642315
";

/// Idempotent 6×6 Latin square for the (n=3, odd-k) strategy at k=3.
const LATIN6_N3K3: &str = "
1 6 2 5 3 4
4 2 6 3 1 5
2 5 3 6 4 1
5 3 1 4 6 2
6 1 4 2 5 3
3 4 5 1 2 6
";

/// Symmetric constant-diagonal 6×6 Latin square for the (n=4, k=2) strategy,
/// stored with its original 0-based labels; normalized to 1..=6 on load.
const LATIN6_N4K2: &str = "
5 3 1 4 2 0
3 5 4 2 0 1
1 4 5 0 3 2
4 2 0 5 1 3
2 0 3 1 5 4
0 1 2 3 4 5
";

/// The Fano plane as S(2, 3, 7), one block per line.
const FANO: &str = "
1 2 3
1 4 5
1 6 7
2 4 6
2 5 7
3 4 7
3 5 6
";

/// Ids of all embedded datasets, with one-line descriptions.
pub const CATALOG: &[(&str, &str)] = &[
    ("dp18_n3k2", "18 double-parity triples, n=3 k=2"),
    ("od_2_3_5", "3×20 ordered design OD_1(2,3,5)"),
    ("seeds42_n5k2", "42 orbit seeds, n=5 k=2 (order-20 group)"),
    ("seeds56_n6k2", "56 orbit seeds, n=6 k=2 (order-120 group)"),
    ("seeds126_n5k4", "126 orbit seeds, n=5 k=4 (first-four-positions group)"),
    ("app96_n4k2", "96-element independent set, n=4 k=2"),
    ("latin6_n3k3", "idempotent 6×6 Latin square"),
    ("latin6_n4k2", "symmetric constant-diagonal 6×6 Latin square"),
    ("fano", "Fano plane S(2,3,7)"),
];

/// Parses whitespace-separated compact digit tokens into a set for the given
/// space, keeping only the first `params.n` digits of each token.
fn compact_set(text: &str, params: SpaceParams, id: &str) -> AssignmentSet {
    let rows: Vec<Vec<Color>> = text
        .split_whitespace()
        .map(|token| {
            token
                .chars()
                .take(params.n)
                .map(|c| c.to_digit(10).expect("digit") as Color)
                .collect()
        })
        .collect();
    AssignmentSet::from_color_rows(params, rows, format!("embedded:{id}"))
        .expect("embedded dataset is valid")
}

pub fn dp18_n3k2() -> AssignmentSet {
    compact_set(DP18_N3K2, SpaceParams::new(3, 2).unwrap(), "dp18_n3k2")
}

pub fn seeds42_n5k2() -> AssignmentSet {
    compact_set(SEEDS42_N5K2, SpaceParams::new(5, 2).unwrap(), "seeds42_n5k2")
}

pub fn seeds56_n6k2() -> AssignmentSet {
    compact_set(SEEDS56_N6K2, SpaceParams::new(6, 2).unwrap(), "seeds56_n6k2")
}

pub fn seeds126_n5k4() -> AssignmentSet {
    compact_set(SEEDS126_N5K4, SpaceParams::new(5, 4).unwrap(), "seeds126_n5k4")
}

/// The 96-element set, truncated from 6-digit augmented permutations to their
/// 4-color prefixes.
pub fn app96_n4k2() -> AssignmentSet {
    compact_set(APP96_N4K2, SpaceParams::new(4, 2).unwrap(), "app96_n4k2")
}

pub fn seeds42_group() -> PermGroup {
    group_closure(5, &parse_generators(SEEDS42_GENERATORS, 5).unwrap()).unwrap()
}

pub fn seeds56_group() -> PermGroup {
    group_closure(6, &parse_generators(SEEDS56_GENERATORS, 6).unwrap()).unwrap()
}

pub fn seeds126_group() -> PermGroup {
    group_closure(5, &parse_generators(SEEDS126_GENERATORS, 5).unwrap()).unwrap()
}

pub fn od_2_3_5() -> OrderedDesignArray {
    OrderedDesignArray::read_from(OD_2_3_5.trim().as_bytes()).expect("embedded OD parses")
}

pub fn latin6_n3k3() -> LatinSquare {
    LatinSquare::read_from(LATIN6_N3K3.trim().as_bytes()).expect("embedded square parses")
}

pub fn latin6_n4k2() -> LatinSquare {
    let rows: Vec<Vec<Color>> = LATIN6_N4K2
        .trim()
        .lines()
        .map(|line| {
            line.split_whitespace()
                .map(|s| s.parse::<Color>().expect("digit") + 1)
                .collect()
        })
        .collect();
    LatinSquare::from_rows(rows).expect("embedded square parses")
}

pub fn fano() -> SteinerSystem {
    SteinerSystem::read_from(FANO.trim().as_bytes()).expect("embedded system parses")
}

/// Resolves a dataset id (or expansion alias) to an assignment set.
///
/// Raw ids return the stored members; the aliases `n5k2`, `n6k2`, and `n5k4`
/// return the seeds expanded by their symmetry group, `od_2_3_5` the design's
/// column set, and `fano` the 42-element Steiner expansion.
pub fn resolve_set(id: &str) -> Option<AssignmentSet> {
    use crate::perm::orbit_expand;
    let set = match id {
        "dp18_n3k2" => dp18_n3k2(),
        "seeds42_n5k2" => seeds42_n5k2(),
        "seeds56_n6k2" => seeds56_n6k2(),
        "seeds126_n5k4" => seeds126_n5k4(),
        "app96_n4k2" => app96_n4k2(),
        "n5k2" => orbit_expand(&seeds42_n5k2(), &seeds42_group()).expect("embedded orbit"),
        "n6k2" => orbit_expand(&seeds56_n6k2(), &seeds56_group()).expect("embedded orbit"),
        "n5k4" => orbit_expand(&seeds126_n5k4(), &seeds126_group()).expect("embedded orbit"),
        "od_2_3_5" => od_2_3_5().to_set().expect("embedded OD converts"),
        "fano" => crate::designs::steiner_to_set(&fano()).expect("embedded system expands"),
        _ => return None,
    };
    Some(set)
}
