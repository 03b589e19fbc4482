"""Time the hot kernels with numba on and off.

Each backend runs in its own interpreter because the switch is read at
import time. Example::

    python benchmarks/bench_kernels.py --repeat 3
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from kneserlab import kernels
from kneserlab._jit import backend
from kneserlab.kneser import components_avoiding, vertex_connectivity, _blocked
from kneserlab.extremal import equality_splits, exact_max_sum_bruteforce
from kneserlab.setfam import make_params, rset_array

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)

def bfs():
    p = make_params(12, 4)
    components_avoiding(p, None)

def flow():
    vertex_connectivity(make_params(7, 3))

def bipartitions():
    equality_splits(3)

def pair_search():
    exact_max_sum_bruteforce(make_params(6, 3))

def cross():
    pool = rset_array(make_params(14, 5))
    fa = rng.choice(pool, 1500)
    fb = rng.choice(pool, 1500)
    kernels.min_cross_intersection(fa, fb)

out = {"backend": backend()}
for name, fn in [("bfs_labels C(12,4)", bfs), ("vertex_cut (7,3)", flow),
                 ("bipartitions 2^20", bipartitions), ("pair_search 2^20", pair_search),
                 ("cross_min 1500x1500", cross)]:
    fn()  # warm-up, includes compilation
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run(flag: str, repeat: int) -> dict:
    env = dict(os.environ, KNESERLAB_JIT=flag)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    jit = run("1", args.repeat)
    fallback = run("0", args.repeat)
    print(f"{'kernel':<24}{jit['backend']:>12}{fallback['backend']:>12}{'speedup':>10}")
    for key in jit:
        if key == "backend":
            continue
        a, b = jit[key], fallback[key]
        print(f"{key:<24}{a:>11.5f}s{b:>11.5f}s{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
