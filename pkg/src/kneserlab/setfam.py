"""r-sets, families of r-sets, and the compression calculus.

Elements are 1-based. An r-set is stored as a bitmask where bit ``k-1``
encodes element ``k``; families are kept sorted by bitmask value, which is
the canonical order used for every tie-break in the package.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from . import kernels
from .errors import BudgetError, DomainError, ParseError

MAX_N = kernels.MAX_N
DEFAULT_BUDGET = 5_000_000


def enumeration_budget(budget: int | None = None) -> int:
    """Cap on C(n, r) for anything that materializes all r-sets.

    An explicit argument wins, then ``KNESERLAB_BUDGET``, then the default.
    """
    if budget is not None:
        return int(budget)
    env = os.environ.get("KNESERLAB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"KNESERLAB_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


# -- bit helpers --------------------------------------------------------------


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    k = 1
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def subsets_in_order(pool: int, k: int) -> Iterator[int]:
    """All k-subsets of the bitmask ``pool``, ascending by numeric value."""
    positions = elements_of(pool)
    size = len(positions)
    if k < 0 or k > size:
        return
    if k == 0:
        yield 0
        return
    x = (1 << k) - 1
    limit = 1 << size
    while x < limit:
        m = 0
        y, i = x, 0
        while y:
            if y & 1:
                m |= 1 << (positions[i] - 1)
            y >>= 1
            i += 1
        yield m
        c = x & -x
        z = x + c
        x = (((z ^ x) >> 2) // c) | z


def format_mask(mask: int) -> str:
    return ",".join(map(str, elements_of(mask)))


def parse_set(text: str, line: int | None = None) -> tuple[int, ...]:
    """Parse ``"1,5,6"`` into a strictly increasing tuple of positive ints."""
    parts = [p.strip() for p in text.strip().split(",")]
    if not parts or any(p == "" for p in parts):
        raise ParseError(f"malformed set {text.strip()!r}", line)
    try:
        elems = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"malformed set {text.strip()!r}", line) from None
    if any(e < 1 for e in elems):
        raise ParseError(f"elements must be positive in {text.strip()!r}", line)
    if any(a >= b for a, b in zip(elems, elems[1:])):
        raise ParseError(f"elements must be strictly ascending in {text.strip()!r}", line)
    return elems


# -- core types ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class RSet:
    """A subset of ``[n]`` as a bitmask. Ordering is by bitmask value."""

    bits: int
    n: int = field(compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise DomainError(f"universe size must be in 1..{MAX_N}, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise DomainError(f"set {elements_of(self.bits)} does not fit in [{self.n}]")

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> "RSet":
        elems = tuple(elements)
        if any(not 1 <= e <= n for e in elems):
            raise DomainError(f"elements {elems} outside [{n}]")
        return cls(mask_of(elems), n)

    @property
    def elements(self) -> tuple[int, ...]:
        return elements_of(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, element: int) -> bool:
        return element >= 1 and bool(self.bits >> (element - 1) & 1)

    def isdisjoint(self, other: "RSet") -> bool:
        return not self.bits & other.bits

    def __str__(self) -> str:
        return format_mask(self.bits)

    def __repr__(self) -> str:
        return "{" + str(self) + "}"


@dataclass(frozen=True)
class UniverseParams:
    """``n = 2r + l`` and ``p = min(r, ceil(l / 2))``."""

    n: int
    r: int
    l: int
    p: int

    @property
    def vertex_count(self) -> int:
        return math.comb(self.n, self.r)

    @property
    def forbidden_cap(self) -> int:
        """C(l, p): the largest forbidden family the chain construction accepts."""
        return math.comb(self.l, self.p)

    def as_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "l": self.l, "p": self.p}


def make_params(n: int, r: int) -> UniverseParams:
    if r < 1:
        raise DomainError(f"requires 1 ≤ r, got r={r}")
    if n < 2 * r:
        raise DomainError(f"requires 2r ≤ n, got n={n}, r={r}")
    if n > MAX_N:
        raise DomainError(f"requires n ≤ {MAX_N}, got n={n}")
    l = n - 2 * r
    return UniverseParams(n, r, l, min(r, (l + 1) // 2))


class Family:
    """Immutable, duplicate-free family of r-subsets of ``[n]``, sorted canonically.

    Members may be given as :class:`RSet` or raw bitmasks. Membership tests are
    exact hash lookups.
    """

    __slots__ = ("n", "r", "masks", "_index")

    def __init__(self, n: int, r: int, members: Iterable[RSet | int] = ()):
        if not 1 <= n <= MAX_N:
            raise DomainError(f"universe size must be in 1..{MAX_N}, got {n}")
        masks = set()
        for m in members:
            bits = m.bits if isinstance(m, RSet) else int(m)
            if bits < 0 or bits >> n:
                raise DomainError(f"set {elements_of(bits)} does not fit in [{n}]")
            if bits.bit_count() != r:
                raise DomainError(f"set {elements_of(bits)} does not have {r} elements")
            masks.add(bits)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "masks", tuple(sorted(masks)))
        object.__setattr__(self, "_index", frozenset(masks))

    def __setattr__(self, name, value):
        raise AttributeError("Family is immutable")

    @classmethod
    def from_sets(cls, n: int, r: int, sets: Iterable[Iterable[int]]) -> "Family":
        return cls(n, r, (RSet.of(s, n) for s in sets))

    @classmethod
    def _trusted(cls, n: int, r: int, sorted_masks) -> "Family":
        f = cls.__new__(cls)
        masks = tuple(int(m) for m in sorted_masks)
        object.__setattr__(f, "n", n)
        object.__setattr__(f, "r", r)
        object.__setattr__(f, "masks", masks)
        object.__setattr__(f, "_index", frozenset(masks))
        return f

    @property
    def members(self) -> tuple[RSet, ...]:
        return tuple(RSet(m, self.n) for m in self.masks)

    def array(self) -> np.ndarray:
        return np.array(self.masks, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[RSet]:
        return (RSet(m, self.n) for m in self.masks)

    def __contains__(self, item) -> bool:
        bits = item.bits if isinstance(item, RSet) else item
        return bits in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return (self.n, self.r, self.masks) == (other.n, other.r, other.masks)

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.masks))

    def __lt__(self, other: "Family") -> bool:
        return (len(self), self.masks) < (len(other), other.masks)

    def __or__(self, other: "Family") -> "Family":
        _same_universe(self, other)
        return Family(self.n, self.r, self._index | other._index)

    def __sub__(self, other: "Family") -> "Family":
        _same_universe(self, other)
        return Family._trusted(self.n, self.r, [m for m in self.masks if m not in other._index])

    def __and__(self, other: "Family") -> "Family":
        _same_universe(self, other)
        return Family._trusted(self.n, self.r, [m for m in self.masks if m in other._index])

    def __repr__(self) -> str:
        body = ", ".join("{" + format_mask(m) + "}" for m in self.masks[:8])
        more = ", ..." if len(self.masks) > 8 else ""
        return f"Family(n={self.n}, r={self.r}, [{body}{more}])"


def _same_universe(f: Family, g: Family) -> None:
    if f.n != g.n or f.r != g.r:
        raise DomainError(f"mismatched universes: (n={f.n}, r={f.r}) vs (n={g.n}, r={g.r})")


# -- enumeration --------------------------------------------------------------


def check_budget(params: UniverseParams, budget: int | None = None) -> None:
    cap = enumeration_budget(budget)
    if params.vertex_count > cap:
        raise BudgetError(
            f"C({params.n},{params.r}) = {params.vertex_count} exceeds enumeration budget {cap}"
        )


@lru_cache(maxsize=64)
def _rset_array(n: int, r: int) -> np.ndarray:
    out = np.empty(math.comb(n, r), dtype=np.int64)
    kernels.gosper_fill(n, r, out)
    out.setflags(write=False)
    return out


def rset_array(params: UniverseParams, budget: int | None = None) -> np.ndarray:
    """Bitmasks of all r-subsets of ``[n]`` in canonical order (read-only, cached)."""
    check_budget(params, budget)
    return _rset_array(params.n, params.r)


def enumerate_rsets(params: UniverseParams, budget: int | None = None) -> Iterator[RSet]:
    check_budget(params, budget)
    n = params.n
    for m in subsets_in_order(full_mask(n), params.r):
        yield RSet(m, n)


def all_rsets(params: UniverseParams, budget: int | None = None) -> Family:
    return Family._trusted(params.n, params.r, rset_array(params, budget))


def rank(mask: int) -> int:
    """Index of ``mask`` in the canonical enumeration of its size class."""
    return int(kernels.colex_rank(mask, kernels.binom_table()))


def complement(s: RSet, m: int) -> RSet:
    """``[m] \\ s``."""
    if m < 1 or m > MAX_N:
        raise DomainError(f"complement universe must be in 1..{MAX_N}, got {m}")
    if s.bits >> m:
        raise DomainError(f"set {s} has elements outside [{m}]")
    return RSet(full_mask(m) ^ s.bits, max(m, s.n))


# -- predicates ---------------------------------------------------------------


def is_intersecting(f: Family) -> bool:
    if len(f) < 2:
        return True
    return not kernels.has_disjoint_pair(f.array())


def are_cross_intersecting(f: Family, g: Family, t: int = 1) -> bool:
    """``|A & B| >= t`` for every ``A`` in f and ``B`` in g (vacuously true if either is empty)."""
    if t < 1:
        raise DomainError(f"requires t ≥ 1, got t={t}")
    _same_universe(f, g)
    if not len(f) or not len(g):
        return True
    return kernels.min_cross_intersection(f.array(), g.array()) >= t


def are_disjoint(f: Family, g: Family) -> bool:
    _same_universe(f, g)
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    return not any(m in big for m in small.masks)


# -- compression --------------------------------------------------------------


@dataclass(frozen=True)
class CompressionOp:
    """The shift replacing element ``j`` by element ``i``."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise DomainError(f"compression needs i ≠ j, got i=j={self.i}")
        if not (1 <= self.i <= MAX_N and 1 <= self.j <= MAX_N):
            raise DomainError(f"compression indices must be in 1..{MAX_N}")

    def apply(self, bits: int) -> int:
        bi = 1 << (self.i - 1)
        bj = 1 << (self.j - 1)
        if bits & bj and not bits & bi:
            return (bits ^ bj) | bi
        return bits


def compress_set(op: CompressionOp, a: RSet) -> RSet:
    if op.i > a.n or op.j > a.n:
        raise DomainError(f"compression ({op.i},{op.j}) outside [{a.n}]")
    return RSet(op.apply(a.bits), a.n)


def _compress_against(op: CompressionOp, f: Family, reference) -> Family:
    out = set()
    for m in f.masks:
        shifted = op.apply(m)
        out.add(m if shifted in reference else shifted)
    return Family(f.n, f.r, out)


def compress_family(op: CompressionOp, f: Family) -> Family:
    """Keep A when its shift is already in ``f``, otherwise replace A by its shift."""
    if op.i > f.n or op.j > f.n:
        raise DomainError(f"compression ({op.i},{op.j}) outside [{f.n}]")
    return _compress_against(op, f, f)


@dataclass(frozen=True)
class ScenarioReport:
    r: int
    n: int
    a: RSet
    b: RSet
    c: RSet
    shifted_c: RSet
    family_a: Family
    family_b: Family
    standard_a: Family
    standard_b: Family
    modified_a: Family
    modified_b: Family
    collision: tuple[RSet, ...]
    disjointness_violated: bool
    cross_intersection_violated: bool

    @property
    def both_failures(self) -> bool:
        return self.disjointness_violated and self.cross_intersection_violated

    def as_dict(self) -> dict:
        fam = lambda f: [format_mask(m) for m in f.masks]  # noqa: E731
        return {
            "r": self.r,
            "n": self.n,
            "A": str(self.a),
            "B": str(self.b),
            "C": str(self.c),
            "shifted_C": str(self.shifted_c),
            "family_A": fam(self.family_a),
            "family_B": fam(self.family_b),
            "standard_A": fam(self.standard_a),
            "standard_B": fam(self.standard_b),
            "modified_A": fam(self.modified_a),
            "modified_B": fam(self.modified_b),
            "collision": [str(s) for s in self.collision],
            "disjointness_violated": self.disjointness_violated,
            "cross_intersection_violated": self.cross_intersection_violated,
        }


def compression_failure_scenario(r: int) -> ScenarioReport:
    """Disjoint cross-intersecting families on which shifting 2 -> 1 breaks.

    With ``A = {1, r+2..2r}``, ``B = {2, r+2..2r}``, ``C = {2..r+1}``, families
    ``{A, C}`` and ``{B}`` are disjoint and cross-intersecting. The usual shift
    sends B onto A, so both images contain A. Testing membership against the
    union of both families instead keeps them disjoint but moves C to
    ``{1, 3..r+1}``, which misses B entirely.
    """
    if r < 2:
        raise DomainError(f"requires r ≥ 2, got r={r}")
    n = 2 * r
    tail = range(r + 2, 2 * r + 1)
    a = RSet.of([1, *tail], n)
    b = RSet.of([2, *tail], n)
    c = RSet.of(range(2, r + 2), n)
    fa = Family(n, r, [a, c])
    fb = Family(n, r, [b])
    op = CompressionOp(1, 2)
    shifted_c = compress_set(op, c)

    std_a = compress_family(op, fa)
    std_b = compress_family(op, fb)
    union = fa | fb
    mod_a = _compress_against(op, fa, union)
    mod_b = _compress_against(op, fb, union)

    collision = (std_a & std_b).members
    broken = (
        shifted_c not in union
        and shifted_c in mod_a
        and b in mod_b
        and shifted_c.isdisjoint(b)
    )
    return ScenarioReport(
        r=r,
        n=n,
        a=a,
        b=b,
        c=c,
        shifted_c=shifted_c,
        family_a=fa,
        family_b=fb,
        standard_a=std_a,
        standard_b=std_b,
        modified_a=mod_a,
        modified_b=mod_b,
        collision=collision,
        disjointness_violated=not are_disjoint(std_a, std_b),
        cross_intersection_violated=broken and not are_cross_intersecting(mod_a, mod_b),
    )


# -- text format --------------------------------------------------------------


def format_family(f: Family, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.append(f"n={f.n} r={f.r}")
    lines.extend(format_mask(m) for m in f.masks)
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> Family:
    """Read the ``n=<n> r=<r>`` header followed by one comma-separated set per line."""
    n = r = None
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            fields = dict(tok.split("=", 1) for tok in line.split() if "=" in tok)
            try:
                n, r = int(fields["n"]), int(fields["r"])
            except (KeyError, ValueError):
                raise ParseError(f"expected header 'n=<n> r=<r>', got {line!r}", lineno) from None
            if not 1 <= n <= MAX_N or not 0 <= r <= n:
                raise ParseError(f"invalid header values n={n} r={r}", lineno)
            continue
        elems = parse_set(line, lineno)
        if len(elems) != r:
            raise ParseError(f"set {line!r} does not have {r} elements", lineno)
        if elems[-1] > n:
            raise ParseError(f"set {line!r} is not inside [{n}]", lineno)
        m = mask_of(elems)
        if m in seen:
            raise ParseError(f"duplicate set {line!r} (first on line {seen[m]})", lineno)
        seen[m] = lineno
    if n is None:
        raise ParseError("missing 'n=<n> r=<r>' header")
    return Family._trusted(n, r, sorted(seen))


def read_family(path) -> Family:
    with open(path, encoding="utf-8") as fh:
        return parse_family(fh.read())


def write_family(path, f: Family, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_family(f, header))
