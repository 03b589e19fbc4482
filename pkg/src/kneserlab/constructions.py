"""Explicit disjoint cross-intersecting pairs.

* ``star_partition``: split the sets through a fixed element into two sides.
* ``large_r_pair``: sets in ``[2r]`` holding exactly one of 1, 2 against sets
  in ``[2r]`` holding neither plus sets in ``[n]`` holding both.
* ``pair_partition``: at ``n = 2r``, unions of complement pairs on each side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import DomainError
from .kneser import complement_pairs
from .setfam import (
    Family,
    RSet,
    UniverseParams,
    are_cross_intersecting,
    are_disjoint,
    format_family,
    full_mask,
    make_params,
    rset_array,
    subsets_in_order,
)

CONSTRUCTIONS = ("star_partition", "large_r_pair", "pair_partition")
SPLIT_RULES = ("first-half", "alternating", "singleton-vs-rest")


@dataclass(frozen=True)
class FamilyPair:
    a: Family
    b: Family
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def name(self) -> str:
        return self.meta.get("construction", "")

    def validate(self) -> None:
        """Raise unless the sides are nonempty, disjoint and cross-intersecting."""
        if not len(self.a) or not len(self.b):
            raise DomainError(f"{self.name}: both families must be nonempty")
        if not are_disjoint(self.a, self.b):
            raise DomainError(f"{self.name}: families share a set")
        if not are_cross_intersecting(self.a, self.b, 1):
            raise DomainError(f"{self.name}: some cross pair is disjoint")

    def header(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.meta.items() if k != "construction")
        return f"construction: {self.name} params: {params}"

    def texts(self) -> tuple[str, str]:
        h = self.header()
        return format_family(self.a, h + " side: A"), format_family(self.b, h + " side: B")


def _rule(split_rule: str | Callable[[RSet, int], bool], size: int) -> Callable[[RSet, int], bool]:
    if callable(split_rule):
        return split_rule
    if split_rule == "first-half":
        half = (size + 1) // 2
        return lambda s, i: i < half
    if split_rule == "alternating":
        return lambda s, i: i % 2 == 0
    if split_rule == "singleton-vs-rest":
        return lambda s, i: i == 0
    raise DomainError(f"unknown split rule {split_rule!r}; choose from {', '.join(SPLIT_RULES)}")


def star(params: UniverseParams, center: int) -> Family:
    if not 1 <= center <= params.n:
        raise DomainError(f"center must be in 1..{params.n}, got {center}")
    bit = 1 << (center - 1)
    rest = full_mask(params.n) & ~bit
    return Family._trusted(params.n, params.r, [bit | s for s in subsets_in_order(rest, params.r - 1)])


def star_partition(
    params: UniverseParams, center: int, split_rule: str | Callable[[RSet, int], bool] = "first-half"
) -> FamilyPair:
    """Split the star at ``center``. A rule maps ``(set, canonical index)`` to True for side A."""
    members = star(params, center).members
    choose = _rule(split_rule, len(members))
    a = [s for i, s in enumerate(members) if choose(s, i)]
    b = [s for i, s in enumerate(members) if not choose(s, i)]
    if not a or not b:
        raise DomainError("split rule leaves one side of the star empty")
    rule_name = split_rule if isinstance(split_rule, str) else getattr(split_rule, "__name__", "custom")
    meta = {"construction": "star_partition", "n": params.n, "r": params.r, "center": center, "rule": rule_name}
    return FamilyPair(Family(params.n, params.r, a), Family(params.n, params.r, b), meta)


def large_r_pair(params: UniverseParams) -> FamilyPair:
    n, r = params.n, params.r
    if r < 2:
        raise DomainError(f"requires r ≥ 2, got r={r}")
    inner = full_mask(2 * r)
    one, two = 1, 2
    # 1 in A, 2 not in A, A inside [2r]
    xs = [one | s for s in subsets_in_order(inner & ~(one | two), r - 1)]
    xcs = [inner ^ x for x in xs]
    b1 = list(subsets_in_order(inner & ~(one | two), r))
    b2 = [one | two | s for s in subsets_in_order(full_mask(n) & ~(one | two), r - 2)]
    meta = {"construction": "large_r_pair", "n": n, "r": r}
    return FamilyPair(Family(n, r, xs + xcs), Family(n, r, b1 + b2), meta)


def pair_partition(r: int, selected_parts: Iterable[int]) -> FamilyPair:
    """Side A takes the chosen complement pairs (1-based), side B the rest."""
    parts = complement_pairs(r)
    k = len(parts)
    chosen = sorted(set(selected_parts))
    if not chosen or len(chosen) == k:
        raise DomainError(f"select a nonempty proper subset of parts 1..{k}")
    if chosen[0] < 1 or chosen[-1] > k:
        raise DomainError(f"part indices must lie in 1..{k}")
    pick = set(chosen)
    a, b = [], []
    for i, (x, y) in enumerate(parts, start=1):
        (a if i in pick else b).extend((x, y))
    n = 2 * r
    meta = {"construction": "pair_partition", "n": n, "r": r, "parts": ",".join(map(str, chosen))}
    return FamilyPair(Family(n, r, a), Family(n, r, b), meta)


def expected_sizes(params: UniverseParams, construction: str) -> dict:
    """Closed-form sizes for each construction."""
    n, r, l = params.n, params.r, params.l
    C = math.comb
    if construction == "star_partition":
        return {"total": C(n - 1, r - 1)}
    if construction == "large_r_pair":
        return {
            "a": 2 * C(2 * r - 2, r - 1),
            "b": C(2 * r - 2, r) + C(n - 2, r - 2),
            "total": C(n - l - 1, r) + C(n - l - 2, r - 1) + C(n - 2, r - 2),
        }
    if construction == "pair_partition":
        return {"total": C(2 * r, r)}
    raise DomainError(f"unknown construction {construction!r}; choose from {', '.join(CONSTRUCTIONS)}")


def pair_partition_masks(r: int) -> set[int]:
    """Every pair_partition output as a bitmask over vertex ids of side A."""
    params = make_params(2 * r, r)
    index = {int(m): i for i, m in enumerate(rset_array(params))}
    parts = complement_pairs(r)
    k = len(parts)
    part_bits = [(1 << index[x.bits]) | (1 << index[y.bits]) for x, y in parts]
    out = set()
    for sel in range(1, (1 << k) - 1):
        m = 0
        for i in range(k):
            if sel >> i & 1:
                m |= part_bits[i]
        out.add(m)
    return out
