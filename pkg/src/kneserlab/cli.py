"""Command-line front end.

Every command builds a JSON-ready payload and renders it as text, JSON or
CSV. Exit codes: 0 success, 1 property violation, 2 domain or parse error,
3 budget exceeded, 4 chain construction dead end.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import chain as chainmod
from . import constructions, extremal, kneser
from ._jit import backend
from .errors import BudgetError, DomainError, KneserLabError
from .setfam import (
    Family,
    RSet,
    UniverseParams,
    compression_failure_scenario,
    enumeration_budget,
    format_mask,
    make_params,
    parse_set,
    read_family,
    write_family,
)

SCHEMA = 1
DEFAULT_SEED = 20240611
FORMATS = ("text", "json", "csv")


@dataclass(frozen=True)
class RunConfig:
    enumeration_budget: int
    seed: int = DEFAULT_SEED
    output_format: str = "text"
    output_path: Path | None = None

    def __post_init__(self):
        if self.enumeration_budget < 1:
            raise DomainError(f"budget must be ≥ 1, got {self.enumeration_budget}")
        if self.output_format not in FORMATS:
            raise DomainError(f"unknown format {self.output_format!r}")


@dataclass
class Result:
    """What a command hands back for rendering."""

    payload: dict
    text: str
    exit_code: int = 0
    rows: list[dict] | None = None
    raw_csv: str | None = None


def _universe(params: UniverseParams) -> dict:
    return {
        **params.as_dict(),
        "binom_n_r": math.comb(params.n, params.r),
        "binom_l_p": math.comb(params.l, params.p),
    }


def _fam(f: Family) -> list[str]:
    return [format_mask(m) for m in f.masks]


def _rset(text: str, n: int, r: int, what: str) -> RSet:
    s = RSet.of(parse_set(text), n)
    if len(s) != r:
        raise DomainError(f"--{what} must have {r} elements, got {text!r}")
    return s


def _load(path: str, params: UniverseParams) -> Family:
    f = read_family(path)
    if (f.n, f.r) != (params.n, params.r):
        raise DomainError(f"{path}: header n={f.n} r={f.r} does not match n={params.n} r={params.r}")
    return f


# -- commands -----------------------------------------------------------------


def cmd_bound(args, cfg: RunConfig) -> Result:
    params = make_params(args.n, args.r)
    if args.exact:
        rep = extremal.exact_max_sum(params, args.cut_budget)
    else:
        rep = extremal.BoundReport(params, extremal.theorem_bound(params))
    row = rep.row()
    payload = {"schema": SCHEMA, "command": "bound", **row}
    if rep.witness is not None:
        payload["witness"] = {"a": _fam(rep.witness.a), "b": _fam(rep.witness.b)}
    lines = [
        f"n={params.n} r={params.r} l={params.l} p={params.p} "
        f"C(n,r)={row['binom_n_r']} C(l,p)={row['binom_l_p']}",
        f"bound {rep.bound}",
    ]
    if args.exact:
        if rep.exact_max is None:
            lines.append("exact none (no disjoint cross-intersecting pair exists)")
        else:
            lines.append(f"exact {rep.exact_max} (cut size {rep.cut_size}, gap {rep.strict_gap})")
    code = 0
    if rep.exact_max is not None and rep.exact_max > rep.bound:
        code = 1
    return Result(payload, "\n".join(lines) + "\n", code, rows=[row])


def cmd_verify(args, cfg: RunConfig) -> Result:
    a, b = read_family(args.file_a), read_family(args.file_b)
    if (a.n, a.r) != (b.n, b.r):
        raise DomainError(f"headers differ: n={a.n} r={a.r} vs n={b.n} r={b.r}")
    params = make_params(a.n, a.r)
    rep = extremal.verify_pair(params, a, b)
    d = rep.as_dict()
    payload = {"command": "verify", **d, **_universe(params)}
    within = "not asserted" if rep.within_bound is None else str(rep.within_bound).lower()
    text = (
        f"n={params.n} r={params.r} l={params.l} p={params.p}\n"
        f"disjoint {str(rep.disjoint).lower()}\n"
        f"cross {str(rep.cross_intersecting).lower()}\n"
        f"vacuous {str(rep.vacuous).lower()}\n"
        f"sizes {rep.size_a} + {rep.size_b} = {rep.sum}\n"
        f"bound {rep.bound}\n"
        f"within {within}\n"
    )
    return Result(payload, text, 0 if rep.passed else 1)


def cmd_chain(args, cfg: RunConfig) -> Result:
    params = make_params(args.n, args.r)
    a = _rset(args.a, params.n, params.r, "a")
    b = _rset(args.b, params.n, params.r, "b")
    forbidden = _load(args.c, params) if args.c else Family(params.n, params.r)
    ch = chainmod.build_chain(
        params, forbidden, a, b, backtrack=not args.no_backtrack, oracle_fallback=args.oracle
    )
    ok = chainmod.verify_chain(params, forbidden, a, b, ch)
    payload = {
        "schema": SCHEMA,
        "command": "chain",
        **_universe(params),
        "forbidden": _fam(forbidden),
        "chain": [str(s) for s in ch.sets],
        "f": ch.f,
        "trace": ch.trace.as_dict(),
        "verified": ok,
    }
    text = ch.format() + f"trace {ch.trace.to_json()}\nverified {str(ok).lower()}\n"
    return Result(payload, text, 0 if ok else 1)


def cmd_sweep(args, cfg: RunConfig) -> Result:
    params = make_params(args.n, args.r)
    if params.vertex_count > cfg.enumeration_budget:
        raise BudgetError(f"C({params.n},{params.r}) exceeds budget {cfg.enumeration_budget}")
    stats = chainmod.sweep(
        params,
        samples=args.samples,
        pairs_per_family=args.pairs,
        seed=cfg.seed,
        backtrack=not args.no_backtrack,
    )
    d = stats.as_dict()
    payload = {"schema": SCHEMA, "command": "sweep", **_universe(params), "seed": cfg.seed, **d}
    text = (
        f"n={params.n} r={params.r} l={params.l} p={params.p} seed={cfg.seed}\n"
        f"families {stats.families} cases {stats.cases}\n"
        f"verified {stats.verified} oracle_agree {stats.oracle_agree} exhaustions {stats.exhaustions}\n"
        f"by_case {json.dumps(d['by_case'], sort_keys=True)}\n"
    )
    code = 0 if stats.ok else (4 if stats.exhaustions else 1)
    return Result(payload, text, code)


def cmd_construct(args, cfg: RunConfig) -> Result:
    name = args.name
    if name == "pair_partition":
        if args.r is None:
            raise DomainError("pair_partition needs --r")
        if args.n is not None and args.n != 2 * args.r:
            raise DomainError(f"pair_partition lives at n = 2r = {2 * args.r}, got n={args.n}")
        if not args.parts:
            raise DomainError("pair_partition needs --parts, e.g. --parts 1,3")
        params = make_params(2 * args.r, args.r)
        pair = constructions.pair_partition(args.r, parse_set(args.parts))
    else:
        if args.n is None or args.r is None:
            raise DomainError(f"{name} needs --n and --r")
        params = make_params(args.n, args.r)
        if name == "star_partition":
            pair = constructions.star_partition(params, args.center, args.rule)
        else:
            pair = constructions.large_r_pair(params)
    expected = constructions.expected_sizes(params, name)
    got = {"a": len(pair.a), "b": len(pair.b), "total": len(pair.a) + len(pair.b)}
    match = all(got[k] == v for k, v in expected.items())
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path_a, path_b = outdir / f"{name}-A.fam", outdir / f"{name}-B.fam"
    head = pair.header()
    write_family(path_a, pair.a, head + " side: A")
    write_family(path_b, pair.b, head + " side: B")
    pair.validate()
    payload = {
        "schema": SCHEMA,
        "command": "construct",
        "construction": name,
        **_universe(params),
        "sizes": got,
        "expected": expected,
        "match": match,
        "files": [str(path_a), str(path_b)],
    }
    exp = " ".join(f"{k}={v}" for k, v in expected.items())
    text = (
        f"{name} n={params.n} r={params.r} l={params.l} p={params.p}\n"
        f"sizes {got['a']} {got['b']} total {got['total']}\n"
        f"expected {exp} {'ok' if match else 'MISMATCH'}\n"
        f"wrote {path_a}\nwrote {path_b}\n"
    )
    return Result(payload, text, 0 if match else 1)


def cmd_kneser(args, cfg: RunConfig) -> Result:
    params = make_params(args.n, args.r)
    base = {"schema": SCHEMA, "command": f"kneser {args.action}", **_universe(params)}
    if args.action == "kpartite":
        if params.l != 0:
            raise DomainError(f"kpartite requires n = 2r, got n={params.n}, r={params.r}")
        rep = kneser.check_complete_kpartite(params.r, cfg.enumeration_budget)
        d = rep.as_dict()
        lines = [f"k={rep.k} (C({2 * params.r - 1},{params.r}) = {math.comb(2 * params.r - 1, params.r)})"]
        lines += [f"part {i}: {x} | {y}" for i, (x, y) in enumerate(rep.parts, start=1)]
        return Result({**base, **d}, "\n".join(lines) + "\n")
    if args.action == "mincut":
        w = kneser.min_disconnecting_set(params, args.max_size, args.cut_budget)
        if w is None:
            text = "no disconnecting set" + (f" of size ≤ {args.max_size}" if args.max_size is not None else "") + "\n"
            return Result({**base, "size": None}, text)
        d = w.as_dict()
        text = (
            f"size {w.size}\n"
            f"cut {' '.join('{' + s + '}' for s in d['cut'])}\n"
            f"side_a {len(w.side_a)} side_b {len(w.side_b)}\n"
        )
        return Result({**base, **d}, text)
    forbidden = _load(args.c, params) if args.c else Family(params.n, params.r)
    lab = kneser.components_avoiding(params, forbidden, cfg.enumeration_budget)
    comps = lab.components()
    d = {**base, "forbidden": _fam(forbidden), "components": len(comps), "sizes": lab.sizes(),
         "members": [_fam(c) for c in comps]}
    lines = [f"components {len(comps)}"]
    lines += [f"component {i}: size {len(c)} first {{{c.members[0]}}}" for i, c in enumerate(comps)]
    return Result(d, "\n".join(lines) + "\n", raw_csv=lab.to_csv())


def cmd_counterexample(args, cfg: RunConfig) -> Result:
    rep = compression_failure_scenario(args.r)
    d = rep.as_dict()
    text = (
        f"r={rep.r} n={rep.n}\n"
        f"A={{{rep.a}}} B={{{rep.b}}} C={{{rep.c}}}\n"
        f"families {{A, C}} and {{B}}; shift 2 -> 1\n"
        f"standard: {d['standard_A']} vs {d['standard_B']} share {[str(s) for s in rep.collision]}\n"
        f"modified: C -> {{{rep.shifted_c}}}, disjoint from B\n"
        f"disjointness_violated {str(rep.disjointness_violated).lower()}\n"
        f"cross_intersection_violated {str(rep.cross_intersection_violated).lower()}\n"
    )
    return Result({"schema": SCHEMA, "command": "counterexample", **d}, text, 0 if rep.both_failures else 1)


def _grid_point(text: str) -> tuple[int, int]:
    try:
        n, r = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid point must look like N,R, got {text!r}") from None
    return n, r


def cmd_scan(args, cfg: RunConfig) -> Result:
    reports = extremal.scan(args.points, exact=not args.no_exact, budget=args.cut_budget, workers=args.workers)
    files = extremal.write_witnesses(reports, args.witness_dir) if args.witness_dir else None
    rows = [rep.row(wf) for rep, wf in zip(reports, files or [""] * len(reports))]
    lines = [" ".join(f"{k}={'' if v is None else v}" for k, v in row.items() if k != "witness_file") for row in rows]
    code = 1 if any(r["exact_max"] is not None and r["exact_max"] > r["bound"] for r in rows) else 0
    return Result(
        {"schema": SCHEMA, "command": "scan", "rows": rows},
        "\n".join(lines) + ("\n" if lines else ""),
        code,
        rows=rows,
    )


# -- rendering ----------------------------------------------------------------


def _flat_csv(payload: dict) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in payload.items():
        w.writerow([k, json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v])
    return out.getvalue()


def render(result: Result, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if fmt == "csv":
        if result.raw_csv is not None:
            return result.raw_csv
        if result.rows is not None:
            out = io.StringIO()
            w = csv.DictWriter(out, fieldnames=extremal.CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
            w.writeheader()
            for row in result.rows:
                w.writerow({k: ("" if v is None else v) for k, v in row.items()})
            return out.getvalue()
        return _flat_csv(result.payload)
    return result.text


# -- argument parsing -----------------------------------------------------------


def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--budget", type=int, default=d(None), help="cap on C(n,r) for enumeration")
    parser.add_argument("--seed", type=int, default=d(DEFAULT_SEED))
    parser.add_argument("--format", choices=FORMATS, default=d("text"))
    parser.add_argument("--output", "-o", default=d(None), help="write here instead of stdout")


def _nr(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--n", type=int, required=required)
    p.add_argument("--r", type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kneserlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s ({backend()} kernels)")
    _globals(parser, suppress=False)
    shared = argparse.ArgumentParser(add_help=False)
    _globals(shared, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[shared], help=help)
        p.set_defaults(func=fn)
        return p

    p = add("bound", cmd_bound, "upper bound on |A|+|B|, optionally the exact maximum")
    _nr(p)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--cut-budget", type=int, default=None, help="max C(n,r) for the exact cut search")

    p = add("verify", cmd_verify, "check a pair of family files")
    p.add_argument("file_a")
    p.add_argument("file_b")

    p = add("chain", cmd_chain, "build and certify a chain between two sets")
    _nr(p)
    p.add_argument("--a", required=True, help="first endpoint, e.g. 1,2,3")
    p.add_argument("--b", required=True)
    p.add_argument("--c", help="forbidden family file")
    p.add_argument("--oracle", action="store_true", help="fall back to BFS on dead ends or oversize --c")
    p.add_argument("--no-backtrack", action="store_true", help="first candidate only at every step")

    p = add("sweep", cmd_sweep, "randomized chain certification at one (n, r)")
    _nr(p)
    p.add_argument("--samples", type=int, default=1000, help="forbidden families per size when sampling")
    p.add_argument("--pairs", type=int, default=1, help="endpoint pairs per forbidden family")
    p.add_argument("--no-backtrack", action="store_true")

    p = add("construct", cmd_construct, "write a named family pair to disk")
    p.add_argument("name", choices=constructions.CONSTRUCTIONS)
    _nr(p, required=False)
    p.add_argument("--center", type=int, default=1)
    p.add_argument("--rule", choices=constructions.SPLIT_RULES, default="first-half")
    p.add_argument("--parts", help="pair_partition parts for side A, e.g. 1,3")
    p.add_argument("--outdir", default=".")

    p = add("kneser", cmd_kneser, "disjointness graph analyses")
    _nr(p)
    ks = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    kc = ks.add_parser("components", parents=[shared], help="components after deleting --c")
    kc.add_argument("--c", help="forbidden family file")
    km = ks.add_parser("mincut", parents=[shared], help="lexicographically smallest minimum vertex cut")
    km.add_argument("--max-size", type=int, default=None)
    km.add_argument("--cut-budget", type=int, default=None)
    ks.add_parser("kpartite", parents=[shared], help="complete multipartite check at n = 2r")

    p = add("counterexample", cmd_counterexample, "shifting breaks disjoint cross-intersecting pairs")
    p.add_argument("--r", type=int, required=True)

    p = add("scan", cmd_scan, "bound table over a grid of (n, r)")
    p.add_argument("points", nargs="*", type=_grid_point, metavar="N,R")
    p.add_argument("--no-exact", action="store_true", help="bounds only")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--witness-dir", help="write each exact witness pair here")
    p.add_argument("--cut-budget", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            enumeration_budget=enumeration_budget(args.budget),
            seed=args.seed,
            output_format=args.format,
            output_path=Path(args.output) if args.output else None,
        )
        result = args.func(args, cfg)
    except KneserLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = render(result, cfg.output_format)
    if cfg.output_path is not None:
        cfg.output_path.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
