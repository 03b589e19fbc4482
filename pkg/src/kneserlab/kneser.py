"""The disjointness (Kneser) graph on r-sets, kept implicit.

Vertices are the r-subsets of ``[n]`` indexed by canonical rank; edges join
disjoint sets. Neighbor lists are generated from complements and cached per
``(n, r)``. This is the complement of the intersection graph, so two families
are cross-intersecting exactly when no edge runs between them.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache
import numpy as np

from . import kernels
from .errors import BudgetError, DomainError
from .setfam import (
    Family,
    RSet,
    UniverseParams,
    check_budget,
    complement,
    format_mask,
    full_mask,
    make_params,
    rank,
    rset_array,
    subsets_in_order,
)

# Flow-based cut search cost grows roughly with V^3; keep it to desk scale.
DEFAULT_CUT_BUDGET = 400
# Subsets tried by the brute-force cut oracle before giving up.
DEFAULT_ORACLE_BUDGET = 3_000_000


def are_adjacent(a: RSet, b: RSet) -> bool:
    """True iff ``a`` and ``b`` are disjoint."""
    return not a.bits & b.bits


@lru_cache(maxsize=32)
def _neighbors(n: int, r: int) -> np.ndarray:
    masks = rset_array(make_params(n, r), budget=math.comb(n, r))
    table = kernels.neighbor_table(masks, n, r, kernels.binom_table())
    table.setflags(write=False)
    return table


def neighbor_table(params: UniverseParams, budget: int | None = None) -> np.ndarray:
    """``(C(n,r), C(n-r,r))`` array of neighbor ids, rows ascending."""
    check_budget(params, budget)
    return _neighbors(params.n, params.r)


def _blocked(params: UniverseParams, forbidden: Family | None) -> np.ndarray:
    blocked = np.zeros(params.vertex_count, dtype=np.bool_)
    if forbidden is not None and len(forbidden):
        if (forbidden.n, forbidden.r) != (params.n, params.r):
            raise DomainError("forbidden family lives in a different universe")
        blocked[[rank(m) for m in forbidden.masks]] = True
    return blocked


@dataclass(frozen=True)
class ComponentLabeling:
    """Components of the disjointness graph after deleting ``forbidden``.

    ``labels[v]`` is the component of vertex ``v`` (canonical rank), or -1 if
    ``v`` is forbidden. Component ids follow the first canonical vertex.
    """

    params: UniverseParams
    forbidden: Family
    labels: np.ndarray
    component_count: int

    def label_of(self, s: RSet | int) -> int:
        bits = s.bits if isinstance(s, RSet) else s
        return int(self.labels[rank(bits)])

    def components(self) -> list[Family]:
        masks = rset_array(self.params, budget=self.params.vertex_count)
        p = self.params
        return [
            Family._trusted(p.n, p.r, masks[self.labels == c]) for c in range(self.component_count)
        ]

    def sizes(self) -> list[int]:
        counts = np.bincount(self.labels[self.labels >= 0], minlength=self.component_count)
        return [int(c) for c in counts]

    def to_csv(self) -> str:
        masks = rset_array(self.params, budget=self.params.vertex_count)
        out = io.StringIO()
        out.write("set,component_id\n")
        for m, lab in zip(masks, self.labels):
            if lab >= 0:
                out.write(f'"{format_mask(int(m))}",{int(lab)}\n')
        return out.getvalue()


def components_avoiding(
    params: UniverseParams, forbidden: Family | None = None, budget: int | None = None
) -> ComponentLabeling:
    nbr = neighbor_table(params, budget)
    blocked = _blocked(params, forbidden)
    labels, count = kernels.bfs_labels(nbr, blocked)
    if forbidden is None:
        forbidden = Family(params.n, params.r)
    return ComponentLabeling(params, forbidden, labels, int(count))


def is_connected_avoiding(
    params: UniverseParams, forbidden: Family | None = None, budget: int | None = None
) -> bool:
    return components_avoiding(params, forbidden, budget).component_count <= 1


def bfs_path_avoiding(
    params: UniverseParams,
    forbidden: Family | None,
    a: RSet,
    b: RSet,
    budget: int | None = None,
) -> list[RSet] | None:
    """Shortest chain of pairwise-consecutive-disjoint r-sets from ``a`` to ``b``.

    Neighbors are expanded in canonical order, so ties resolve to the
    canonically earliest path. Returns None when ``b`` is unreachable.
    """
    if a.bits == b.bits:
        raise DomainError("endpoints must differ")
    if forbidden is not None and (a in forbidden or b in forbidden):
        raise DomainError("endpoint lies in the forbidden family")
    nbr = neighbor_table(params, budget)
    blocked = _blocked(params, forbidden)
    src, dst = rank(a.bits), rank(b.bits)
    parent = kernels.bfs_parents(nbr, blocked, src, dst)
    if parent[dst] < 0:
        return None
    masks = rset_array(params, budget=params.vertex_count)
    path = [dst]
    while path[-1] != src:
        path.append(int(parent[path[-1]]))
    return [RSet(int(masks[v]), params.n) for v in reversed(path)]


# -- minimum disconnecting sets ----------------------------------------------


@dataclass(frozen=True)
class CutWitness:
    """A vertex cut and the two sides it leaves.

    ``side_b`` is the component with the second-smallest first vertex;
    ``side_a`` gathers every other remaining component.
    """

    size: int
    cut: Family
    side_a: Family
    side_b: Family

    def as_dict(self) -> dict:
        fam = lambda f: [format_mask(m) for m in f.masks]  # noqa: E731
        return {
            "size": self.size,
            "cut": fam(self.cut),
            "side_a": fam(self.side_a),
            "side_b": fam(self.side_b),
        }


def _check_cut_budget(params: UniverseParams, budget: int | None) -> None:
    cap = DEFAULT_CUT_BUDGET if budget is None else budget
    if params.vertex_count > cap:
        raise BudgetError(
            f"exact cut search needs C({params.n},{params.r}) = {params.vertex_count} ≤ {cap}"
        )


def split_witness(params: UniverseParams, cut: Family) -> CutWitness:
    """Sides left by removing ``cut``; raises if the remainder is connected."""
    lab = components_avoiding(params, cut, budget=params.vertex_count)
    if lab.component_count < 2:
        raise DomainError("removing the cut leaves the graph connected")
    comps = lab.components()
    side_b = comps[1]
    side_a = Family._trusted(
        params.n, params.r, sorted(m for i, c in enumerate(comps) if i != 1 for m in c.masks)
    )
    return CutWitness(len(cut), cut, side_a, side_b)


def vertex_connectivity(params: UniverseParams, max_size: int | None = None, budget: int | None = None) -> int | None:
    """Size of a smallest disconnecting vertex set, by vertex-split max-flow.

    None if every set of at most ``max_size`` vertices leaves the graph
    connected (including graphs, like complete ones, that no cut disconnects).
    """
    _check_cut_budget(params, budget)
    V = params.vertex_count
    limit = V if max_size is None else max_size
    if limit < 0:
        raise DomainError(f"max_size must be ≥ 0, got {max_size}")
    nbr = neighbor_table(params, budget=V)
    masks = rset_array(params, budget=V)
    alive = np.ones(V, dtype=np.bool_)
    uncut = np.zeros(V, dtype=np.bool_)
    c = int(kernels.min_vertex_cut(nbr, masks, alive, uncut, limit, -1))
    return None if c > limit else c


def min_disconnecting_set(
    params: UniverseParams, max_size: int | None = None, budget: int | None = None
) -> CutWitness | None:
    """Lexicographically smallest minimum vertex cut of the disjointness graph.

    The minimum size comes from max-flow. The cut itself is grown one vertex
    at a time: the next member is the smallest vertex ``v`` such that some
    minimum cut contains the members chosen so far plus ``v`` and none of the
    skipped vertices below ``v``. That feasibility question is again a
    constrained max-flow (skipped vertices get infinite capacity).
    """
    c = vertex_connectivity(params, max_size, budget)
    if c is None:
        return None
    V = params.vertex_count
    nbr = neighbor_table(params, budget=V)
    masks = rset_array(params, budget=V)
    removed = np.zeros(V, dtype=np.bool_)
    chosen: list[int] = []
    last = -1
    for _ in range(c):
        for v in range(last + 1, V):
            removed[v] = True
            uncut = np.zeros(V, dtype=np.bool_)
            uncut[:v] = True
            uncut[removed] = False
            need = c - len(chosen) - 1
            alive = ~removed
            if kernels.min_vertex_cut(nbr, masks, alive, uncut, need, need) <= need:
                chosen.append(v)
                last = v
                break
            removed[v] = False
        else:  # pragma: no cover - a minimum cut exists by construction
            raise AssertionError("greedy cut extension found no feasible vertex")
    cut = Family._trusted(params.n, params.r, masks[chosen])
    return split_witness(params, cut)


def brute_force_min_cut(
    params: UniverseParams, max_size: int | None = None, budget: int = DEFAULT_ORACLE_BUDGET
) -> CutWitness | None:
    """Same answer as :func:`min_disconnecting_set`, by trying subsets in lex order."""
    V = params.vertex_count
    limit = V if max_size is None else max_size
    nbr = neighbor_table(params, budget=max(V, 1))
    masks = rset_array(params, budget=V)
    tried = 0
    for size in range(0, min(limit, V - 2) + 1):
        tried += math.comb(V, size)
        if tried > budget:
            raise BudgetError(f"brute-force cut search would try more than {budget} subsets")
        if size == 0:
            _, count = kernels.bfs_labels(nbr, np.zeros(V, dtype=np.bool_))
            if count >= 2:
                return split_witness(params, Family(params.n, params.r))
            continue
        idx = kernels.first_disconnecting_subset(nbr, size)
        if idx.shape[0]:
            return split_witness(params, Family._trusted(params.n, params.r, masks[idx]))
    return None


# -- complete multipartite structure at n = 2r --------------------------------


@dataclass(frozen=True)
class KPartiteReport:
    r: int
    k: int
    parts: tuple[tuple[RSet, RSet], ...]

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "n": 2 * self.r,
            "k": self.k,
            "parts": [[str(x), str(y)] for x, y in self.parts],
        }


def complement_pairs(r: int) -> list[tuple[RSet, RSet]]:
    """``(X, [2r] \\ X)`` for each r-subset X of ``[2r-1]``, in canonical order of X."""
    n = 2 * r
    return [
        (RSet(x, n), complement(RSet(x, n), n))
        for x in subsets_in_order(full_mask(2 * r - 1), r)
    ]


def check_complete_kpartite(r: int, budget: int | None = None) -> KPartiteReport:
    """Confirm the intersection graph on ``C([2r], r)`` is complete multipartite.

    Parts are complement pairs. Every pair of vertices is checked directly:
    inside a part the two sets must be disjoint, across parts they must meet.
    """
    params = make_params(2 * r, r)
    masks = rset_array(params, budget)
    parts = complement_pairs(r)
    k = math.comb(2 * r - 1, r)
    if len(parts) != k:
        raise AssertionError(f"expected {k} parts, built {len(parts)}")
    part_of = np.full(len(masks), -1, dtype=np.int64)
    for i, (x, y) in enumerate(parts):
        for s in (x, y):
            v = rank(s.bits)
            if part_of[v] != -1:
                raise AssertionError(f"vertex {s} assigned to two parts")
            part_of[v] = i
    if (part_of < 0).any():
        raise AssertionError("parts do not cover every r-set")
    meets = (masks[:, None] & masks[None, :]) != 0
    same = part_of[:, None] == part_of[None, :]
    np.fill_diagonal(same, False)
    cross = part_of[:, None] != part_of[None, :]
    if (meets & same).any():
        raise AssertionError("an edge joins two members of the same part")
    if (~meets & cross).any():
        raise AssertionError("two vertices in different parts are not adjacent")
    return KPartiteReport(r, k, tuple(parts))
