import csv
import io
import json
import math

import pytest

from kneserlab.constructions import large_r_pair, pair_partition_masks
from kneserlab.errors import BudgetError, DomainError
from kneserlab.extremal import (
    CSV_COLUMNS,
    cut_size_bruteforce,
    equality_characterization,
    equality_splits,
    exact_max_sum,
    exact_max_sum_bruteforce,
    scan,
    scan_csv,
    scan_json,
    theorem_bound,
    verify_pair,
    write_witnesses,
)
from kneserlab.setfam import Family, all_rsets, make_params, read_family


@pytest.mark.parametrize("n,r,bound", [(5, 2, 9), (8, 3, 54), (4, 2, 6), (6, 3, 20), (6, 2, 13), (7, 2, 18)])
def test_theorem_bound(n, r, bound):
    assert theorem_bound(make_params(n, r)) == bound


@pytest.mark.parametrize(
    "n,r,exact",
    [(4, 2, 6), (5, 2, 7), (6, 2, 9), (7, 2, 11), (6, 3, 20), (8, 2, 13), (7, 3, 31)],
)
def test_exact_max(n, r, exact):
    params = make_params(n, r)
    rep = exact_max_sum(params)
    assert rep.exact_max == exact
    assert rep.exact_max == math.comb(n, r) - rep.cut_size
    assert rep.strict_gap == rep.bound - exact
    v = verify_pair(params, rep.witness.a, rep.witness.b)
    assert v.passed and v.sum == exact


@pytest.mark.parametrize("n,r", [(4, 2), (5, 2), (6, 2), (7, 2), (6, 3)])
def test_exact_max_matches_pair_search(n, r):
    params = make_params(n, r)
    assert exact_max_sum(params).exact_max == exact_max_sum_bruteforce(params)


@pytest.mark.parametrize("n,r", [(5, 2), (6, 2), (7, 3)])
def test_cut_size_matches_brute_force(n, r):
    params = make_params(n, r)
    assert exact_max_sum(params).cut_size == cut_size_bruteforce(params)


def test_exact_max_4_2_witness_is_pair_partition():
    params = make_params(4, 2)
    rep = exact_max_sum(params)
    index = {s.bits: i for i, s in enumerate(all_rsets(params))}
    side_a = sum(1 << index[m] for m in rep.witness.a.masks)
    assert side_a in pair_partition_masks(2)
    assert "1,2" in [str(s) for s in rep.witness.a]


def test_exact_max_r1_has_no_pair():
    rep = exact_max_sum(make_params(5, 1))
    assert rep.exact_max is None and rep.witness is None and rep.strict_gap is None
    assert exact_max_sum_bruteforce(make_params(5, 1)) is None


def test_budget_errors():
    with pytest.raises(BudgetError):
        exact_max_sum(make_params(12, 4))
    with pytest.raises(BudgetError):
        exact_max_sum_bruteforce(make_params(8, 2))


def test_verify_pair_examples():
    params = make_params(8, 3)
    pair = large_r_pair(params)
    d = verify_pair(params, pair.a, pair.b).as_dict()
    assert (d["disjoint"], d["cross_intersecting"], d["sum"], d["bound"], d["within_bound"]) == (
        True, True, 22, 54, True,
    )
    assert d["min_size"] == 10 and d["schema"] == 1

    p5 = make_params(5, 2)
    v = verify_pair(p5, all_rsets(p5), Family(5, 2))
    assert v.vacuous and v.within_bound is None and not v.passed

    v = verify_pair(p5, Family.from_sets(5, 2, [(1, 2)]), Family.from_sets(5, 2, [(3, 4)]))
    assert not v.cross_intersecting and not v.passed
    with pytest.raises(DomainError):
        verify_pair(p5, Family(6, 2), Family(5, 2))


def test_equality_characterization():
    got = equality_characterization(2)
    assert got["match"] and got["valid_splits"] == 6 and got["sum"] == 6
    assert len(equality_splits(2)) == 6


def test_scan_examples():
    reps = scan([(4, 2), (5, 2), (6, 2)], exact=False)
    assert [r.bound for r in reps] == [6, 9, 13]
    assert all(r.exact_max is None for r in reps)
    (six,) = scan([(6, 3)])
    assert (six.bound, six.exact_max) == (20, 20)
    assert scan([]) == []


def test_scan_error_rows_do_not_abort():
    reps = scan([(3, 2), (5, 2), (20, 5)])
    assert reps[0].error.startswith("DomainError")
    assert reps[1].exact_max == 7
    assert reps[2].error.startswith("BudgetError") and reps[2].bound == theorem_bound(make_params(20, 5))


def test_scan_parallel_preserves_order():
    grid = [(8, 2), (4, 2), (7, 3), (5, 2), (6, 2)]
    serial = scan_json(scan(grid))
    assert scan_json(scan(grid, workers=4)) == serial
    rows = json.loads(serial)["rows"]
    assert [(r["n"], r["r"]) for r in rows] == grid


def test_scan_csv_and_witness_files(tmp_path):
    reps = scan([(5, 2), (5, 1)])
    files = write_witnesses(reps, tmp_path)
    assert files[1] == ""
    rows = list(csv.DictReader(io.StringIO(scan_csv(reps, files))))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["exact_max"] == "7" and rows[0]["witness_file"].endswith("witness-n5-r2-A.fam")
    assert rows[1]["exact_max"] == ""
    a = read_family(files[0])
    b = read_family(files[0].replace("-A.fam", "-B.fam"))
    assert len(a) + len(b) == 7
    assert scan_csv([]) == ",".join(CSV_COLUMNS) + "\n"


@pytest.mark.parametrize("r", [2, 3, 4])
def test_bound_nondecreasing_in_n(r):
    bounds = [theorem_bound(make_params(n, r)) for n in range(2 * r + 1, 2 * r + 12)]
    assert bounds == sorted(bounds)
