import itertools
import json
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from kneserlab import chain as ch
from kneserlab.errors import DomainError, ExhaustionError
from kneserlab.kneser import components_avoiding
from kneserlab.setfam import Family, RSet, all_rsets, make_params, mask_of

from conftest import fam


def R(n, *elems):
    return RSet.of(elems, n)


def test_disjoint_endpoints():
    params = make_params(6, 3)
    c = ch.build_chain(params, None, R(6, 1, 2, 3), R(6, 4, 5, 6))
    assert [str(s) for s in c.sets] == ["1,2,3", "4,5,6"]
    assert c.trace.case_taken == ch.DISJOINT and c.f == 1


def test_case1_empty_forbidden():
    params = make_params(8, 2)
    c = ch.build_chain(params, None, R(8, 1, 2), R(8, 1, 3))
    assert [str(s) for s in c.sets] == ["1,2", "4,5", "1,3"]
    assert c.trace.case_taken == ch.CASE1
    assert c.format() == "S0: 1,2\nS1: 4,5\nS2: 1,3\n"


def test_case1_skips_forbidden_middle():
    params = make_params(8, 2)
    forbidden = fam(8, 2, (4, 5), (4, 6), (5, 6))
    c = ch.build_chain(params, forbidden, R(8, 1, 2), R(8, 1, 3))
    assert str(c.sets[1]) == "4,7"
    assert ch.verify_chain(params, forbidden, R(8, 1, 2), R(8, 1, 3), c)


def test_case2_worked_example():
    # t = 1 shared element, p = 1, so m = 1 and q = 0
    params = make_params(7, 3)
    a, b = R(7, 1, 2, 3), R(7, 1, 4, 5)
    c = ch.build_chain(params, None, a, b)
    assert (c.trace.t, c.trace.m, c.trace.q) == (1, 1, 0)
    assert c.f == 5 == 2 * c.trace.m + 3
    assert [str(s) for s in c.sets] == ["1,2,3", "4,5,6", "1,2,3", "4,5,6", "2,3,7", "1,4,5"]
    d = json.loads(c.trace.to_json())
    assert d["case_taken"] == ch.CASE2_2
    assert d["blocks_a"] == [[1], [2]] and d["blocks_b"] == [[1], [4]]
    assert d["skeletons"] == [[5], [2, 3], [4, 5], [3], [1, 4, 5]]


def test_greedy_dead_end_recovered_by_backtracking():
    params = make_params(7, 3)
    forbidden = fam(7, 3, (2, 3, 7))
    a, b = R(7, 1, 2, 3), R(7, 1, 4, 5)
    with pytest.raises(ExhaustionError) as info:
        ch.build_chain(params, forbidden, a, b, backtrack=False)
    assert "S4" in str(info.value) and info.value.pool_size == 1
    assert info.value.trace.case_taken == ch.CASE2_2
    c = ch.build_chain(params, forbidden, a, b)
    assert [str(s) for s in c.sets] == ["1,2,3", "4,5,6", "1,2,3", "4,5,7", "2,3,6", "1,4,5"]
    assert c.trace.backtracks == 1
    assert ch.verify_chain(params, forbidden, a, b, c)


def test_oracle_fallback_is_logged_in_trace():
    params = make_params(7, 3)
    forbidden = fam(7, 3, (2, 3, 7))
    a, b = R(7, 1, 2, 3), R(7, 1, 4, 5)
    c = ch.build_chain(params, forbidden, a, b, backtrack=False, oracle_fallback=True)
    assert c.trace.case_taken == ch.ORACLE and c.trace.notes
    assert ch.verify_chain(params, forbidden, a, b, c)


def test_oversize_forbidden():
    params = make_params(7, 3)
    forbidden = fam(7, 3, (2, 3, 7), (4, 5, 6))
    a, b = R(7, 1, 2, 3), R(7, 1, 4, 5)
    with pytest.raises(DomainError, match="C\\(1,1\\)"):
        ch.build_chain(params, forbidden, a, b)
    c = ch.build_chain(params, forbidden, a, b, oracle_fallback=True)
    assert c.trace.case_taken == ch.ORACLE


@pytest.mark.parametrize(
    "a,b,forbidden,msg",
    [
        ((1, 2, 3), (1, 2, 3), (), "differ"),
        ((1, 2, 3), (1, 4, 5), ((1, 2, 3),), "forbidden"),
        ((1, 2), (1, 4, 5), (), "3-subset"),
    ],
)
def test_bad_inputs(a, b, forbidden, msg):
    params = make_params(7, 3)
    with pytest.raises(DomainError, match=msg):
        ch.build_chain(params, fam(7, 3, *forbidden), RSet.of(a, 7), RSet.of(b, 7))


def test_l0_intersecting_endpoints_rejected():
    with pytest.raises(DomainError, match="n = 2r"):
        ch.build_chain(make_params(6, 3), None, R(6, 1, 2, 3), R(6, 1, 4, 5))


def test_pick_avoiding():
    forbidden = fam(6, 3, (1, 2, 3), (1, 2, 4))
    pool = mask_of([3, 4, 5])
    assert str(ch.pick_avoiding(pool, 1, forbidden, mask_of([1, 2]))) == "1,2,5"
    with pytest.raises(ExhaustionError) as info:
        ch.pick_avoiding(mask_of([3, 4]), 1, forbidden, mask_of([1, 2]))
    assert info.value.pool_size == 2 and info.value.forbidden == 2


def test_verify_chain_rejects():
    params = make_params(7, 3)
    a, b = R(7, 1, 2, 3), R(7, 4, 5, 6)
    assert ch.verify_chain(params, None, a, b, [a, b])
    assert not ch.verify_chain(params, None, a, b, [a])
    assert not ch.verify_chain(params, None, a, b, [a, R(7, 3, 4, 5), b])
    assert not ch.verify_chain(params, fam(7, 3, (4, 5, 6)), a, b, [a, b])
    assert not ch.verify_chain(params, None, a, b, [b, a])


def _check_skeleton(c):
    sk = c.trace.skeletons
    assert all(not x & y for x, y in zip(sk, sk[1:]))
    if c.trace.case_taken.startswith("case2"):
        assert c.f <= 2 * (c.trace.m + 1) + 1
    elif c.trace.case_taken == ch.CASE1:
        assert c.f <= 2


@st.composite
def instances(draw):
    r = draw(st.integers(2, 4))
    l = draw(st.integers(1, 5))
    n = 2 * r + l
    params = make_params(n, r)
    universe = list(itertools.combinations(range(1, n + 1), r))
    size = draw(st.integers(0, params.forbidden_cap))
    forbidden = draw(st.lists(st.sampled_from(universe), min_size=size, max_size=size, unique=True))
    free = [s for s in universe if s not in set(forbidden)]
    a = draw(st.sampled_from(free))
    b = draw(st.sampled_from(free))
    assume(a != b)
    return params, fam(n, r, *forbidden), RSet.of(a, n), RSet.of(b, n)


@given(instances())
def test_chain_soundness_property(inst):
    params, forbidden, a, b = inst
    c = ch.build_chain(params, forbidden, a, b)
    assert ch.verify_chain(params, forbidden, a, b, c)
    _check_skeleton(c)
    lab = components_avoiding(params, forbidden)
    assert lab.label_of(a) == lab.label_of(b)


@pytest.mark.parametrize("n,r", [(5, 2), (7, 3), (6, 2)])
def test_exhaustive_small(n, r):
    """Every forbidden family up to the cap and every ordered endpoint pair."""
    params = make_params(n, r)
    sets = list(all_rsets(params))
    count = 0
    cap = params.forbidden_cap
    for size in range(cap + 1):
        for forb in itertools.combinations(sets, size):
            forbidden = Family(n, r, forb)
            free = [s for s in sets if s not in forbidden]
            for a, b in itertools.permutations(free, 2):
                c = ch.build_chain(params, forbidden, a, b)
                assert ch.verify_chain(params, forbidden, a, b, c)
                _check_skeleton(c)
                count += 1
    assert count > 0


def test_sweep_small_grid_point():
    stats = ch.sweep(make_params(7, 3), seed=3, pairs_per_family=3)
    assert stats.ok
    assert stats.cases == 3 * stats.families
    assert stats.as_dict()["exhaustions"] == 0


def test_sweep_l0_uses_complement_pairs():
    stats = ch.sweep(make_params(6, 3), seed=1)
    assert stats.ok and set(stats.by_case) == {ch.DISJOINT}


def test_sweep_without_backtracking_reports_dead_ends():
    stats = ch.sweep(make_params(7, 3), seed=0, pairs_per_family=20, backtrack=False)
    assert stats.exhaustions > 0
    assert not stats.ok


def test_sweep_is_deterministic():
    a = ch.sweep(make_params(8, 3), seed=9, samples=50).as_dict()
    b = ch.sweep(make_params(8, 3), seed=9, samples=50).as_dict()
    assert a == b


def test_forbidden_families_sampling():
    params = make_params(10, 3)  # C(4,2) = 6, C(120, 6) is far too many to list
    rng = random.Random(0)
    fams = list(ch.forbidden_families(params, rng, samples=10, exhaustive_cap=1000))
    sizes = [len(f) for f in fams]
    assert sizes.count(0) == 1 and sizes.count(1) == 120
    assert sizes.count(6) == 10


def test_case2_single_forbidden_set():
    params = make_params(7, 3)
    forbidden = fam(7, 3, (3, 4, 5))
    a, b = R(7, 1, 2, 3), R(7, 1, 4, 5)
    c = ch.build_chain(params, forbidden, a, b)
    assert (c.trace.t, c.trace.m, c.trace.q, c.f) == (1, 1, 0, 5)
    assert ch.verify_chain(params, forbidden, a, b, c)
    assert all(str(s) != "3,4,5" for s in c.sets)


def test_pick_avoiding_counting_example():
    pool = [mask_of(s) for s in itertools.combinations(range(4, 9), 2)]
    forbidden = Family(8, 2, pool[:6])
    got = ch.pick_avoiding(mask_of(range(4, 9)), 2, forbidden)
    remaining = [m for m in pool if m not in forbidden]
    assert len(remaining) == 4
    assert got.bits == min(remaining)
    assert str(got) == "6,7"
    assert ch.pick_avoiding(mask_of(range(4, 9)), 2, Family(8, 2)).elements == (4, 5)
    with pytest.raises(ExhaustionError):
        ch.pick_avoiding(mask_of([4, 5, 6]), 2, fam(8, 2, (4, 5), (4, 6), (5, 6)))
