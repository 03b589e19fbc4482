"""Constructive chains through the disjointness graph avoiding a forbidden family.

Given ``forbidden`` with at most C(l, p) members and endpoints ``a``, ``b``
outside it, :func:`build_chain` produces ``S_0 = a, ..., S_f = b`` with
consecutive sets disjoint and no set forbidden. The construction splits on

* disjoint endpoints: ``[a, b]``;
* ``ceil(l/2) >= r``: one middle set drawn from outside ``a | b``;
* otherwise: the shared part of ``a`` and ``b`` is cut into blocks of ``p``
  elements, which fixes a ladder of skeleton sets ``C_1 .. C_{2m+3}``
  (consecutive ones disjoint); each ``S_k`` is ``C_k`` topped up to size r
  from elements avoiding ``S_{k-1}``, ``C_k`` and ``C_{k+1}``.

Top-ups are chosen in canonical order. At a dead end the search backtracks
to the most recent step with another candidate; ``backtrack=False`` keeps
only the first candidate at each step and reports the dead end instead.
"""

from __future__ import annotations

import json
import logging
import math
import random
from collections import Counter
from itertools import combinations
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import kneser
from .errors import DomainError, ExhaustionError
from .setfam import (
    Family,
    RSet,
    UniverseParams,
    complement,
    elements_of,
    format_mask,
    full_mask,
    mask_of,
    rset_array,
    subsets_in_order,
)

log = logging.getLogger(__name__)

DISJOINT = "disjoint_endpoints"
CASE1 = "case1"
CASE2_1 = "case2_1"
CASE2_2 = "case2_2"
CASE2_2_SWAP = "case2_2_swap"
ORACLE = "oracle_fallback"

NODE_LIMIT = 200_000


@dataclass
class ChainTrace:
    case_taken: str
    t: int = 0
    m: int = 0
    q: int = 0
    blocks_a: tuple[int, ...] = ()
    blocks_b: tuple[int, ...] = ()
    skeletons: tuple[int, ...] = ()
    backtracks: int = 0
    swap: tuple[int, int] | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        sets = lambda ms: [list(elements_of(x)) for x in ms]  # noqa: E731
        out = {
            "case_taken": self.case_taken,
            "t": self.t,
            "m": self.m,
            "q": self.q,
            "blocks_a": sets(self.blocks_a),
            "blocks_b": sets(self.blocks_b),
            "skeletons": sets(self.skeletons),
            "backtracks": self.backtracks,
        }
        if self.swap is not None:
            out["swap"] = {"w1": self.swap[0], "a1": self.swap[1]}
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


@dataclass(frozen=True)
class Chain:
    sets: tuple[RSet, ...]
    trace: ChainTrace

    @property
    def f(self) -> int:
        return len(self.sets) - 1

    def format(self) -> str:
        return "\n".join(f"S{k}: {s}" for k, s in enumerate(self.sets)) + "\n"


# -- candidate pools ----------------------------------------------------------


def candidates(pool: int, size: int, forbidden: Family, completion: int = 0) -> Iterator[int]:
    """Sets ``completion | R`` for ``size``-subsets R of ``pool``, canonical order, skipping forbidden ones."""
    for fill in subsets_in_order(pool, size):
        s = completion | fill
        if s not in forbidden:
            yield s


def pick_avoiding(pool: int, size: int, forbidden: Family, completion: int = 0) -> RSet:
    """Canonically first ``completion | R`` not in ``forbidden``.

    Raises :class:`ExhaustionError` when every candidate is forbidden.
    """
    for s in candidates(pool, size, forbidden, completion):
        return RSet(s, forbidden.n)
    total = math.comb(pool.bit_count(), size)
    raise ExhaustionError(
        f"no {size}-subset of {{{format_mask(pool)}}} completes {{{format_mask(completion)}}} "
        "outside the forbidden family",
        pool_size=total,
        forbidden=len(forbidden),
    )


# -- validation ---------------------------------------------------------------


def verify_chain(
    params: UniverseParams,
    forbidden: Family | None,
    a: RSet,
    b: RSet,
    chain: Chain | Sequence[RSet],
) -> bool:
    sets = chain.sets if isinstance(chain, Chain) else tuple(chain)
    if len(sets) < 2 or sets[0].bits != a.bits or sets[-1].bits != b.bits:
        return False
    top = full_mask(params.n)
    for s in sets:
        if s.bits & ~top or s.bits.bit_count() != params.r:
            return False
        if forbidden is not None and s in forbidden:
            return False
    return all(not (x.bits & y.bits) for x, y in zip(sets, sets[1:]))


# -- construction -------------------------------------------------------------


@dataclass
class _Plan:
    """Block decomposition and skeleton ladder for intersecting endpoints."""

    t: int
    m: int
    q: int
    short: bool  # r - t < p - q
    blocks_a: list[int]
    blocks_b: list[int]
    skel: list[int]  # skel[k] = C_k for k = 1 .. 2m+3; skel[0] unused


def _plan(params: UniverseParams, a: int, b: int) -> _Plan:
    r, p = params.r, params.p
    x = elements_of(a & b)
    z = elements_of(a & ~b)  # private to a
    y = elements_of(b & ~a)  # private to b
    t = len(x)
    m, q = divmod(t, p)
    short = r - t < p - q
    take = r - t if short else p - q

    blocks_a = [mask_of(x[(i - 1) * p:i * p]) for i in range(1, m + 1)]
    blocks_a.append(mask_of(x[m * p:t]) | mask_of(z[:take]))
    blocks_b = [mask_of(x[(m - i) * p + q:(m - i + 1) * p + q]) for i in range(1, m + 1)]
    blocks_b.append(mask_of(x[:q]) | mask_of(y[:take]))

    skel = [0] * (2 * m + 4)
    used = 0
    for i in range(1, m + 2):
        used |= blocks_a[i - 1]
        skel[2 * i] = a & ~used
    for i in range(0, m + 1):
        drop = 0
        for j in range(m - i + 1):
            drop |= blocks_b[j]
        skel[2 * i + 1] = b & ~drop
    skel[2 * m + 3] = b
    return _Plan(t, m, q, short, blocks_a, blocks_b, skel)


class _Search:
    def __init__(self, params: UniverseParams, forbidden: Family, a: int, b: int, plan: _Plan, backtrack: bool):
        self.params = params
        self.forbidden = forbidden
        self.a = a
        self.b = b
        self.plan = plan
        self.backtrack = backtrack
        self.top = full_mask(params.n)
        self.last = 2 * plan.m + 3
        self.sets = [0] * (self.last + 1)
        self.sets[0] = a
        self.sets[self.last] = b
        self.backtracks = 0
        self.nodes = 0
        self.swap: tuple[int, int] | None = None
        self.dead_end: tuple[int, int, int] | None = None

    def pool(self, k: int, prev: int) -> tuple[int, int]:
        skel = self.plan.skel
        pool = self.top & ~(prev | skel[k] | skel[k + 1])
        return pool, self.params.r - skel[k].bit_count()

    def step_options(self, k: int, prev: int) -> Iterator[tuple[int, int]]:
        """Yield ``(S_{k-1}, S_k)`` pairs; only step 2 can rewrite ``S_{k-1}``."""
        pool, size = self.pool(k, prev)
        any_plain = False
        for s in candidates(pool, size, self.forbidden, self.plan.skel[k]):
            any_plain = True
            yield prev, s
        if k == 2 and not self.plan.short and not any_plain:
            yield from self.swaps(prev, pool)
        elif not any_plain and self.dead_end is None:
            self.dead_end = (k, pool, size)

    def swaps(self, s1: int, pool: int) -> Iterator[tuple[int, int]]:
        """Exchange one top-up element of S_1 with one of S_2's pool.

        All p-subsets of ``pool`` topping up C_2 are forbidden here. Pick
        ``w1`` in the pool but outside ``a``'s first block and ``a1`` among
        S_1's top-up elements but outside C_3; then ``S_2 = {a1, w2..wp} | C_2``
        and ``S_1`` trades ``a1`` for ``w1``.
        """
        p = self.params.p
        skel = self.plan.skel
        first_block = self.a & ~skel[2]
        topup = s1 & ~skel[1]
        for w1 in elements_of(pool & ~first_block):
            bw1 = 1 << (w1 - 1)
            for a1 in elements_of(topup & ~skel[3]):
                ba1 = 1 << (a1 - 1)
                for rest in subsets_in_order(pool & ~bw1, p - 1):
                    new_s2 = skel[2] | ba1 | rest
                    new_s1 = (s1 & ~ba1) | bw1
                    if new_s1 in self.forbidden or new_s2 in self.forbidden:
                        continue
                    self.swap = (w1, a1)
                    yield new_s1, new_s2
        self.swap = None
        if self.dead_end is None:
            self.dead_end = (2, pool, p)

    def run(self) -> bool:
        return self._extend(1)

    def _extend(self, k: int) -> bool:
        if k == self.last:
            return True
        prev = self.sets[k - 1]
        for new_prev, s in self.step_options(k, prev):
            self.nodes += 1
            if self.nodes > NODE_LIMIT:
                raise ExhaustionError(
                    "chain search exceeded its node limit",
                    pool_size=self.nodes,
                    forbidden=len(self.forbidden),
                )
            self.sets[k - 1] = new_prev
            self.sets[k] = s
            if self._extend(k + 1):
                return True
            self.backtracks += 1
            if not self.backtrack:
                break
        self.sets[k - 1] = prev
        return False


def _check_inputs(params: UniverseParams, forbidden: Family, a: RSet, b: RSet) -> None:
    if (forbidden.n, forbidden.r) != (params.n, params.r):
        raise DomainError("forbidden family lives in a different universe")
    for name, s in (("a", a), ("b", b)):
        if s.bits >> params.n or s.bits.bit_count() != params.r:
            raise DomainError(f"endpoint {name}={{{s}}} is not an {params.r}-subset of [{params.n}]")
        if s in forbidden:
            raise DomainError(f"endpoint {name}={{{s}}} lies in the forbidden family")
    if a.bits == b.bits:
        raise DomainError("endpoints must differ")


def _oracle_chain(params, forbidden, a, b, reason: str) -> Chain:
    log.warning("chain %s -> %s: falling back to BFS oracle (%s)", a, b, reason)
    path = kneser.bfs_path_avoiding(params, forbidden, a, b)
    if path is None:
        raise DomainError(f"no chain from {{{a}}} to {{{b}}} avoids the forbidden family")
    trace = ChainTrace(ORACLE, t=(a.bits & b.bits).bit_count(), notes=[reason])
    return Chain(tuple(path), trace)


def build_chain(
    params: UniverseParams,
    forbidden: Family | None,
    a: RSet,
    b: RSet,
    *,
    backtrack: bool = True,
    oracle_fallback: bool = False,
) -> Chain:
    """Chain from ``a`` to ``b`` with consecutive sets disjoint, avoiding ``forbidden``.

    Requires ``|forbidden| <= C(l, p)``. With ``oracle_fallback`` the size
    check and any dead end are answered by BFS instead, and the trace says so.
    """
    if forbidden is None:
        forbidden = Family(params.n, params.r)
    _check_inputs(params, forbidden, a, b)
    n, r, l, p = params.n, params.r, params.l, params.p
    cap = params.forbidden_cap
    if len(forbidden) > cap:
        if oracle_fallback:
            return _oracle_chain(params, forbidden, a, b, f"|forbidden|={len(forbidden)} > C(l,p)={cap}")
        raise DomainError(f"requires |forbidden| ≤ C({l},{p}) = {cap}, got {len(forbidden)}")

    t = (a.bits & b.bits).bit_count()
    if t == 0:
        return Chain((a, b), ChainTrace(DISJOINT))
    if l == 0:
        raise DomainError(
            "intersecting endpoints with n = 2r lie in different components; "
            "use the complement-pair structure instead"
        )

    if (l + 1) // 2 >= r:
        m, q = divmod(t, p)
        trace = ChainTrace(CASE1, t=t, m=m, q=q)
        pool = full_mask(n) & ~(a.bits | b.bits)
        try:
            mid = pick_avoiding(pool, r, forbidden)
        except ExhaustionError as exc:
            exc.trace = trace
            if oracle_fallback:
                return _oracle_chain(params, forbidden, a, b, str(exc))
            raise
        return Chain((a, mid, b), trace)

    plan = _plan(params, a.bits, b.bits)
    search = _Search(params, forbidden, a.bits, b.bits, plan, backtrack)
    ok = search.run()
    case = CASE2_1 if plan.short else CASE2_2
    if search.swap is not None:
        case = CASE2_2_SWAP
    trace = ChainTrace(
        case,
        t=plan.t,
        m=plan.m,
        q=plan.q,
        blocks_a=tuple(plan.blocks_a),
        blocks_b=tuple(plan.blocks_b),
        skeletons=tuple(plan.skel[1:]),
        backtracks=search.backtracks,
        swap=search.swap,
    )
    if not ok:
        k, pool, size = search.dead_end or (0, 0, 0)
        exc = ExhaustionError(
            f"step S{k}: every top-up of C{k} from {{{format_mask(pool)}}} is forbidden",
            pool_size=math.comb(pool.bit_count(), size),
            forbidden=len(forbidden),
            trace=trace,
        )
        if oracle_fallback:
            return _oracle_chain(params, forbidden, a, b, str(exc))
        raise exc
    if search.backtracks:
        trace.notes.append(f"backtracked {search.backtracks} time(s)")
    return Chain(tuple(RSet(s, n) for s in search.sets), trace)


# -- certification sweep ------------------------------------------------------


@dataclass
class SweepStats:
    params: UniverseParams
    families: int = 0
    cases: int = 0
    verified: int = 0
    exhaustions: int = 0
    oracle_agree: int = 0
    backtracked: int = 0
    longest: int = 0
    by_case: Counter = field(default_factory=Counter)
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verified == self.cases == self.oracle_agree and self.exhaustions == 0

    def as_dict(self) -> dict:
        return {
            **self.params.as_dict(),
            "families": self.families,
            "cases": self.cases,
            "verified": self.verified,
            "exhaustions": self.exhaustions,
            "oracle_agree": self.oracle_agree,
            "backtracked": self.backtracked,
            "longest": self.longest,
            "by_case": dict(sorted(self.by_case.items())),
            "failures": self.failures[:10],
        }


def forbidden_families(
    params: UniverseParams, rng: random.Random, samples: int = 1000, exhaustive_cap: int = 100_000
) -> Iterator[tuple[int, ...]]:
    """Vertex-id tuples of every size 0..C(l, p): all of them when few enough, else a sample."""
    V = params.vertex_count
    for size in range(0, min(params.forbidden_cap, V) + 1):
        if math.comb(V, size) <= exhaustive_cap:
            yield from combinations(range(V), size)
        else:
            for _ in range(samples):
                yield tuple(sorted(rng.sample(range(V), size)))


def sweep(
    params: UniverseParams,
    *,
    samples: int = 1000,
    pairs_per_family: int = 1,
    exhaustive_cap: int = 100_000,
    seed: int = 0,
    backtrack: bool = True,
) -> SweepStats:
    """Build and check chains for many forbidden families and endpoint pairs.

    Each case is checked by :func:`verify_chain` and against BFS component
    labels. With ``l = 0`` the graph is a perfect matching, so endpoints are
    drawn as complement pairs only.
    """
    rng = random.Random(seed)
    masks = rset_array(params, budget=params.vertex_count)
    V = len(masks)
    n, r = params.n, params.r
    stats = SweepStats(params)
    for ids in forbidden_families(params, rng, samples, exhaustive_cap):
        forbidden = Family._trusted(n, r, [int(masks[i]) for i in ids])
        free = sorted(set(range(V)) - set(ids))
        labels = kneser.components_avoiding(params, forbidden, budget=V)
        stats.families += 1
        for _ in range(pairs_per_family):
            if params.l == 0:
                ia = rng.choice(free)
                a = RSet(int(masks[ia]), n)
                b = complement(a, n)
                if b in forbidden:
                    continue
            else:
                if len(free) < 2:
                    continue
                ia, ib = rng.sample(free, 2)
                a, b = RSet(int(masks[ia]), n), RSet(int(masks[ib]), n)
            stats.cases += 1
            try:
                ch = build_chain(params, forbidden, a, b, backtrack=backtrack)
            except ExhaustionError as exc:
                stats.exhaustions += 1
                stats.failures.append({"a": str(a), "b": str(b), "forbidden": [str(s) for s in forbidden], "error": str(exc)})
                continue
            stats.by_case[ch.trace.case_taken] += 1
            stats.longest = max(stats.longest, ch.f)
            if ch.trace.backtracks:
                stats.backtracked += 1
            if verify_chain(params, forbidden, a, b, ch):
                stats.verified += 1
            if labels.label_of(a) == labels.label_of(b):
                stats.oracle_agree += 1
    return stats
