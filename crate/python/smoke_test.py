#!/usr/bin/env python3
"""Smoke test for the hatlab_py extension module.

Build the extension first, then run this script:

    cargo build -p hatlab-python --release
    python3 python/smoke_test.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def import_extension():
    suffixes = [".so", ".dylib"]
    candidates = [
        REPO_ROOT / "target" / profile / f"libhatlab_py{suffix}"
        for profile in ("release", "debug")
        for suffix in suffixes
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension not built; run: cargo build -p hatlab-python --release"
        )
    stage = Path(tempfile.mkdtemp(prefix="hatlab_py_"))
    shutil.copy(built, stage / "hatlab_py.so")
    sys.path.insert(0, str(stage))
    import hatlab_py

    return hatlab_py


def main():
    hl = import_extension()
    print(f"hatlab_py {hl.__version__}")

    # space sizes
    assert hl.space_size(2, 2) == 12
    assert hl.space_size(5, 2) == 2520
    assert hl.perfect_size(7, 2) == 60480
    assert len(hl.enumerate_space(2, 1)) == 6

    # permutations and groups
    assert hl.parity([2, 3, 4, 5, 1]) == "even"
    assert hl.parse_cycles("(2 4)(3 5)", 5) == [1, 4, 5, 2, 3]
    assert hl.group_order("(2 4)(3 5); (1 5 3 2)", 5) == 20
    assert hl.group_order("(1 2)(4 5); (2 6 3 5)", 6) == 120

    # strategies
    dp = hl.Strategy("double_parity", n=3)
    assert dp.count() == 18
    assert dp.member([1, 2, 3])
    assert not dp.member([1, 2, 4])
    report = json.loads(dp.evaluate_json())
    assert report["probability"] == "3/10"
    assert report["win_count"] == 18

    cyclic = hl.Strategy("cyclic_n2", k=2)
    guesses, win = cyclic.play([1, 2])
    assert win and guesses == [1, 2]
    guesses, win = cyclic.play([2, 1])
    assert not win and guesses[0] == 4

    parity8 = hl.Strategy("parity_k1", n=8)
    mean, half_width = parity8.monte_carlo(20000, seed=7)
    assert abs(mean - 0.5) <= max(half_width, 0.02), (mean, half_width)

    # independence checking and orbit expansion
    assert hl.check_independent(3, 2, dp.generate()) is None
    violation = hl.check_independent(3, 2, [[1, 2, 4], [1, 3, 4]])
    assert violation is not None

    seeds = hl.load_dataset("seeds42_n5k2")
    orbit = hl.expand_orbit(5, 2, seeds, "(2 4)(3 5); (1 5 3 2)")
    assert len(orbit) == 840
    assert hl.check_independent(5, 2, orbit) is None

    # search and model export
    result = json.loads(hl.search_alpha(2, 2))
    assert result["size"] == 4 and result["optimal"]
    with tempfile.TemporaryDirectory() as tmp:
        variables, constraints = hl.export_ilp(2, 2, f"{tmp}/a_4_2.lp")
        assert (variables, constraints) == (12, 8)

    # number-theoretic helpers
    assert hl.teirlinck(5, 6)
    assert not hl.teirlinck(4, 3)
    assert hl.birthday(2, 2) == "1/2"

    assert "dp18_n3k2" in hl.dataset_ids()
    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
