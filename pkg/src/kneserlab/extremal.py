"""Upper bound for |A| + |B| and exact maxima at desk scale.

For disjoint, nonempty, cross-intersecting A and B, the sets outside
``A | B`` form a vertex cut of the disjointness graph (no edge may join A to
B). Conversely any cut yields such a pair, one component per side. So the
exact maximum is ``C(n, r) - c*`` with ``c*`` the vertex connectivity,
computed by max-flow and cross-checked by brute force.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .constructions import FamilyPair, pair_partition_masks
from .errors import BudgetError, DomainError, KneserLabError
from .kneser import brute_force_min_cut, min_disconnecting_set
from .setfam import (
    Family,
    UniverseParams,
    are_cross_intersecting,
    are_disjoint,
    format_family,
    make_params,
    rset_array,
)

SCHEMA = 1
CSV_COLUMNS = (
    "n", "r", "l", "p", "binom_n_r", "binom_l_p", "bound",
    "exact_max", "strict_gap", "witness_file", "error",
)
# 2^N subsets of one side; beyond this the brute-force oracle is skipped.
NAIVE_MAX_VERTICES = 24


def theorem_bound(params: UniverseParams) -> int:
    """``C(n,r) - C(l,p)`` for l >= 1; ``C(2r, r)`` when n = 2r."""
    if params.l == 0:
        return math.comb(params.n, params.r)
    return math.comb(params.n, params.r) - math.comb(params.l, params.p)


@dataclass(frozen=True)
class BoundReport:
    params: UniverseParams
    bound: int
    exact_max: int | None = None
    witness: FamilyPair | None = None
    cut_size: int | None = None
    error: str | None = None

    @property
    def strict_gap(self) -> int | None:
        return None if self.exact_max is None else self.bound - self.exact_max

    def row(self, witness_file: str = "") -> dict:
        p = self.params
        valid = p.l >= 0  # l < 0 marks a grid point that failed validation
        return {
            "n": p.n,
            "r": p.r,
            "l": p.l if valid else None,
            "p": p.p if valid else None,
            "binom_n_r": math.comb(p.n, p.r) if valid else None,
            "binom_l_p": math.comb(p.l, p.p) if valid else None,
            "bound": self.bound if valid else None,
            "exact_max": self.exact_max,
            "strict_gap": self.strict_gap,
            "witness_file": witness_file,
            "error": self.error,
        }


def exact_max_sum(params: UniverseParams, budget: int | None = None) -> BoundReport:
    """Exact maximum of ``|A| + |B|`` with its witness pair.

    ``exact_max`` is None when no valid pair exists at all (r = 1: every two
    distinct singletons are disjoint).
    """
    bound = theorem_bound(params)
    cut = min_disconnecting_set(params, budget=budget)
    if cut is None:
        return BoundReport(params, bound)
    meta = {"construction": "min_cut", "n": params.n, "r": params.r, "cut_size": cut.size}
    pair = FamilyPair(cut.side_a, cut.side_b, meta)
    return BoundReport(params, bound, params.vertex_count - cut.size, pair, cut.size)


def exact_max_sum_bruteforce(params: UniverseParams) -> int | None:
    """Same maximum, by trying every nonempty side A with the largest compatible B."""
    V = params.vertex_count
    if V > NAIVE_MAX_VERTICES:
        raise BudgetError(f"brute-force maximizer needs C(n,r) ≤ {NAIVE_MAX_VERTICES}, got {V}")
    masks = rset_array(params)
    bits = np.zeros(V, dtype=np.int64)
    for i in range(V):
        for j in range(V):
            if i != j and not (int(masks[i]) & int(masks[j])):
                bits[i] |= 1 << j
    best, _ = kernels.best_pair_sum(bits, V)
    return None if best < 0 else best


def cut_size_bruteforce(params: UniverseParams, max_size: int | None = None) -> int | None:
    w = brute_force_min_cut(params, max_size)
    return None if w is None else w.size


@dataclass(frozen=True)
class PairVerification:
    params: UniverseParams
    disjoint: bool
    cross_intersecting: bool
    vacuous: bool
    size_a: int
    size_b: int
    bound: int

    @property
    def sum(self) -> int:
        return self.size_a + self.size_b

    @property
    def within_bound(self) -> bool | None:
        """Only meaningful for nonempty sides; None otherwise."""
        if self.vacuous:
            return None
        return self.sum <= self.bound

    @property
    def passed(self) -> bool:
        return not self.vacuous and self.disjoint and self.cross_intersecting and bool(self.within_bound)

    def as_dict(self) -> dict:
        p = self.params
        return {
            "schema": SCHEMA,
            **p.as_dict(),
            "binom_n_r": math.comb(p.n, p.r),
            "binom_l_p": math.comb(p.l, p.p),
            "disjoint": self.disjoint,
            "cross_intersecting": self.cross_intersecting,
            "vacuous": self.vacuous,
            "size_a": self.size_a,
            "size_b": self.size_b,
            "sum": self.sum,
            "bound": self.bound,
            "within_bound": self.within_bound,
            "min_size": min(self.size_a, self.size_b),
        }


def verify_pair(params: UniverseParams, a: Family, b: Family) -> PairVerification:
    for f in (a, b):
        if (f.n, f.r) != (params.n, params.r):
            raise DomainError(f"family (n={f.n}, r={f.r}) does not match (n={params.n}, r={params.r})")
    return PairVerification(
        params,
        disjoint=are_disjoint(a, b),
        cross_intersecting=are_cross_intersecting(a, b, 1),
        vacuous=not len(a) or not len(b),
        size_a=len(a),
        size_b=len(b),
        bound=theorem_bound(params),
    )


def equality_splits(r: int) -> np.ndarray:
    """All splits of ``C([2r], r)`` into two nonempty cross-intersecting families.

    Brute force over ``2^C(2r,r)`` assignments; the disjoint pairs are found
    by checking every pair of vertices, not from the complement structure.
    """
    params = make_params(2 * r, r)
    masks = rset_array(params)
    V = len(masks)
    if V > 30:
        raise BudgetError(f"2^{V} assignments is beyond exhaustive reach")
    ii, jj = np.nonzero(np.triu((masks[:, None] & masks[None, :]) == 0, k=1))
    return kernels.valid_bipartitions(ii.astype(np.int64), jj.astype(np.int64), V)


def equality_characterization(r: int) -> dict:
    """Compare brute-force equality splits with the pair-partition family."""
    found = {int(m) for m in equality_splits(r)}
    expected = pair_partition_masks(r)
    return {
        "r": r,
        "assignments": 2 ** math.comb(2 * r, r),
        "valid_splits": len(found),
        "pair_partitions": len(expected),
        "match": found == expected,
        "sum": math.comb(2 * r, r),
    }


# -- scans --------------------------------------------------------------------


def _scan_point(nr: tuple[int, int], exact: bool, budget: int | None) -> BoundReport:
    n, r = nr
    try:
        params = make_params(n, r)
    except KneserLabError as exc:
        return BoundReport(UniverseParams(n, r, -1, 0), 0, error=f"{type(exc).__name__}: {exc}")
    bound = theorem_bound(params)
    if not exact:
        return BoundReport(params, bound)
    try:
        return exact_max_sum(params, budget)
    except KneserLabError as exc:
        return BoundReport(params, bound, error=f"{type(exc).__name__}: {exc}")


def scan(
    grid: Sequence[tuple[int, int]],
    *,
    exact: bool = True,
    budget: int | None = None,
    workers: int = 1,
) -> list[BoundReport]:
    """One report per grid point, in grid order. Per-point errors land in ``error``."""
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda nr: _scan_point(nr, exact, budget), grid))
    return [_scan_point(nr, exact, budget) for nr in grid]


def write_witnesses(reports: Sequence[BoundReport], outdir) -> list[str]:
    """Write each witness pair as ``witness-n<n>-r<r>-{A,B}.fam``; returns the A paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for rep in reports:
        if rep.witness is None:
            paths.append("")
            continue
        stem = outdir / f"witness-n{rep.params.n}-r{rep.params.r}"
        head = f"witness: exact maximizer n={rep.params.n} r={rep.params.r} sum={rep.exact_max}"
        Path(f"{stem}-A.fam").write_text(format_family(rep.witness.a, head + " side: A"))
        Path(f"{stem}-B.fam").write_text(format_family(rep.witness.b, head + " side: B"))
        paths.append(f"{stem}-A.fam")
    return paths


def scan_csv(reports: Sequence[BoundReport], witness_files: Sequence[str] | None = None) -> str:
    files = witness_files or [""] * len(reports)
    out = io.StringIO()
    w = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for rep, wf in zip(reports, files):
        w.writerow({k: ("" if v is None else v) for k, v in rep.row(wf).items()})
    return out.getvalue()


def scan_json(reports: Sequence[BoundReport], witness_files: Sequence[str] | None = None) -> str:
    files = witness_files or [""] * len(reports)
    rows = [rep.row(wf) for rep, wf in zip(reports, files)]
    return json.dumps({"schema": SCHEMA, "rows": rows}, indent=2, sort_keys=True) + "\n"
