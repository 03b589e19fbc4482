import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kneserlab.errors import BudgetError, DomainError, ParseError
from kneserlab.setfam import (
    CompressionOp,
    Family,
    RSet,
    all_rsets,
    are_cross_intersecting,
    are_disjoint,
    check_budget,
    complement,
    compress_family,
    compress_set,
    compression_failure_scenario,
    elements_of,
    enumerate_rsets,
    enumeration_budget,
    format_family,
    is_intersecting,
    make_params,
    mask_of,
    parse_family,
    parse_set,
    rank,
    read_family,
    subsets_in_order,
    write_family,
)

from conftest import fam, naive_cross, naive_intersecting


# -- params -------------------------------------------------------------------


@pytest.mark.parametrize(
    "n,r,l,p",
    [(4, 2, 0, 0), (5, 2, 1, 1), (8, 3, 2, 1), (9, 3, 3, 2), (12, 3, 6, 3), (20, 2, 16, 2)],
)
def test_make_params(n, r, l, p):
    params = make_params(n, r)
    assert (params.l, params.p) == (l, p)
    assert params.forbidden_cap == math.comb(l, p)


@pytest.mark.parametrize(
    "n,r,msg",
    [(3, 2, "requires 2r ≤ n"), (5, 0, "requires 1 ≤ r"), (63, 2, "n ≤ 62")],
)
def test_make_params_rejects(n, r, msg):
    with pytest.raises(DomainError, match=msg):
        make_params(n, r)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("KNESERLAB_BUDGET", "5")
    assert enumeration_budget() == 5
    assert enumeration_budget(7) == 7
    with pytest.raises(BudgetError):
        check_budget(make_params(5, 2))
    monkeypatch.setenv("KNESERLAB_BUDGET", "lots")
    with pytest.raises(DomainError):
        enumeration_budget()


# -- enumeration ----------------------------------------------------------------


def test_enumeration_order_4_2():
    got = [s.elements for s in enumerate_rsets(make_params(4, 2))]
    assert got == [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]


@pytest.mark.parametrize("n,r", [(2, 1), (5, 2), (7, 3), (9, 4), (10, 2)])
def test_enumeration_matches_sorted_combinations(n, r):
    expected = sorted(mask_of(c) for c in itertools.combinations(range(1, n + 1), r))
    got = [s.bits for s in enumerate_rsets(make_params(n, r))]
    assert got == expected
    assert [rank(m) for m in got] == list(range(len(got)))


def test_enumeration_respects_budget():
    with pytest.raises(BudgetError):
        list(enumerate_rsets(make_params(30, 10), budget=1000))


@given(st.integers(0, (1 << 12) - 1), st.integers(0, 6))
def test_subsets_in_order_is_sorted_combinations(pool, k):
    elems = elements_of(pool)
    expected = sorted(mask_of(c) for c in itertools.combinations(elems, k))
    assert list(subsets_in_order(pool, k)) == expected


# -- RSet and complement ----------------------------------------------------------


def test_rset_basics():
    s = RSet.of([5, 1, 6], 8)
    assert s.elements == (1, 5, 6)
    assert str(s) == "1,5,6"
    assert 5 in s and 2 not in s
    assert len(s) == 3
    with pytest.raises(DomainError):
        RSet.of([9], 8)


@given(st.integers(1, 10).flatmap(lambda m: st.tuples(st.just(m), st.sets(st.integers(1, m)))))
def test_complement_involution(arg):
    m, elems = arg
    s = RSet.of(elems, m)
    c = complement(s, m)
    assert len(c) == m - len(s)
    assert c.isdisjoint(s)
    assert complement(c, m) == s


def test_complement_examples():
    assert complement(RSet.of([1, 2], 4), 4).elements == (3, 4)
    assert complement(RSet.of([1, 3, 5], 6), 6).elements == (2, 4, 6)
    with pytest.raises(DomainError):
        complement(RSet.of([1, 5], 5), 4)


# -- predicates -------------------------------------------------------------------


def test_predicate_examples():
    star = fam(5, 2, (1, 2), (1, 3), (1, 4))
    assert is_intersecting(star)
    assert not is_intersecting(fam(5, 2, (1, 2), (3, 4)))
    assert is_intersecting(Family(5, 2))
    assert are_cross_intersecting(star, fam(5, 2, (1, 5)), 1)
    assert not are_cross_intersecting(fam(5, 2, (1, 2)), fam(5, 2, (3, 4)), 1)
    assert are_cross_intersecting(fam(5, 3, (1, 2, 3)), fam(5, 3, (1, 2, 4)), 2)
    assert not are_cross_intersecting(fam(5, 3, (1, 2, 3)), fam(5, 3, (1, 4, 5)), 2)
    assert are_cross_intersecting(star, Family(5, 2))
    assert are_disjoint(star, fam(5, 2, (2, 3)))
    assert not are_disjoint(star, fam(5, 2, (1, 3)))


def test_predicates_reject_mismatched_universe():
    with pytest.raises(DomainError):
        are_disjoint(fam(5, 2, (1, 2)), fam(6, 2, (1, 2)))
    with pytest.raises(DomainError):
        are_cross_intersecting(fam(5, 2, (1, 2)), fam(5, 2, (1, 3)), 0)


@st.composite
def family_pairs(draw, max_n=8):
    n = draw(st.integers(2, max_n))
    r = draw(st.integers(1, n // 2))
    universe = list(itertools.combinations(range(1, n + 1), r))
    f = draw(st.lists(st.sampled_from(universe), max_size=12))
    g = draw(st.lists(st.sampled_from(universe), max_size=12))
    return n, r, sorted(set(f)), sorted(set(g))


@given(family_pairs())
def test_predicates_agree_with_naive(arg):
    n, r, f, g = arg
    F, G = fam(n, r, *f), fam(n, r, *g)
    assert is_intersecting(F) == naive_intersecting(f)
    for t in (1, 2):
        assert are_cross_intersecting(F, G, t) == naive_cross(f, g, t)
    assert are_disjoint(F, G) == (not set(f) & set(g))


def test_family_algebra_and_order():
    a = fam(5, 2, (1, 2), (1, 3))
    b = fam(5, 2, (1, 3), (4, 5))
    assert (a | b).masks == tuple(sorted({0b11, 0b101, 0b11000}))
    assert (a - b).masks == (0b11,)
    assert (a & b).masks == (0b101,)
    assert fam(5, 2, (1, 3), (1, 2)) == a
    assert hash(fam(5, 2, (1, 3), (1, 2))) == hash(a)
    with pytest.raises(DomainError):
        fam(5, 2, (1, 2, 3))


# -- compression ------------------------------------------------------------------


def test_compress_set():
    op = CompressionOp(1, 2)
    assert compress_set(op, RSet.of([2, 5], 6)).elements == (1, 5)
    assert compress_set(op, RSet.of([1, 2], 6)).elements == (1, 2)
    assert compress_set(op, RSet.of([3, 4], 6)).elements == (3, 4)
    with pytest.raises(DomainError):
        CompressionOp(2, 2)


def test_compress_family_keeps_blocked_sets():
    f = fam(5, 2, (1, 3), (2, 3), (2, 4))
    got = compress_family(CompressionOp(1, 2), f)
    assert got == fam(5, 2, (1, 3), (2, 3), (1, 4))


@given(family_pairs(max_n=7), st.integers(1, 7), st.integers(1, 7))
def test_compression_preserves_sizes(arg, i, j):
    n, r, f, _ = arg
    if i == j or max(i, j) > n:
        return
    op = CompressionOp(i, j)
    F = fam(n, r, *f)
    for s in F:
        assert len(compress_set(op, s)) == r
    assert len(compress_family(op, F)) == len(F)


@pytest.mark.parametrize("r", range(2, 7))
def test_failure_scenario_all_r(r):
    rep = compression_failure_scenario(r)
    assert rep.disjointness_violated and rep.cross_intersection_violated
    assert are_disjoint(rep.family_a, rep.family_b)
    assert are_cross_intersecting(rep.family_a, rep.family_b)


def test_failure_scenario_r3_witness():
    rep = compression_failure_scenario(3)
    assert [str(x) for x in (rep.a, rep.b, rep.c, rep.shifted_c)] == ["1,5,6", "2,5,6", "2,3,4", "1,3,4"]
    assert [str(s) for s in rep.collision] == ["1,5,6"]


def test_failure_scenario_r2_and_r4():
    rep2 = compression_failure_scenario(2)
    assert [str(x) for x in (rep2.a, rep2.b, rep2.c)] == ["1,4", "2,4", "2,3"]
    rep4 = compression_failure_scenario(4)
    assert [str(x) for x in (rep4.a, rep4.b, rep4.c)] == ["1,6,7,8", "2,6,7,8", "2,3,4,5"]
    with pytest.raises(DomainError):
        compression_failure_scenario(1)


# -- text format ------------------------------------------------------------------


def test_family_text_round_trip(tmp_path):
    f = fam(7, 3, (1, 5, 6), (2, 3, 4), (1, 2, 3))
    text = format_family(f, "construction: demo")
    assert text.splitlines()[:3] == ["# construction: demo", "n=7 r=3", "1,2,3"]
    assert parse_family(text) == f
    path = tmp_path / "f.fam"
    write_family(path, f)
    assert read_family(path) == f


def test_parse_ignores_comments_and_blanks():
    f = parse_family("# hi\n\nn=5 r=2\n1,2  # trailing\n\n3,4\n")
    assert f == fam(5, 2, (1, 2), (3, 4))


@pytest.mark.parametrize(
    "text,line,msg",
    [
        ("n=5 r=2\n1,,3\n", 2, "malformed"),
        ("n=5 r=2\n1,2\n2,1\n", 3, "ascending"),
        ("n=5 r=2\n1,2\n\n1,2\n", 4, "duplicate"),
        ("n=5 r=2\n1,2,3\n", 2, "does not have 2"),
        ("n=5 r=2\n1,6\n", 2, "not inside"),
        ("r=2\n1,2\n", 1, "header"),
        ("n=5 r=2\n0,1\n", 2, "positive"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, msg):
    with pytest.raises(ParseError, match=msg) as info:
        parse_family(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_parse_set():
    assert parse_set(" 1, 5,6 ") == (1, 5, 6)
    with pytest.raises(ParseError):
        parse_set("")


def test_all_rsets_is_complete():
    f = all_rsets(make_params(6, 3))
    assert len(f) == 20
    assert all(len(s) == 3 for s in f)


def test_random_families_membership():
    rng = random.Random(3)
    params = make_params(9, 3)
    universe = list(all_rsets(params))
    for _ in range(50):
        chosen = rng.sample(universe, 20)
        f = Family(9, 3, chosen)
        for s in universe:
            assert (s in f) == (s in chosen)
