"""Hot loops over bitmask-encoded r-sets.

Everything here works on ``int64`` numpy arrays whose entries are bitmasks
(bit ``k-1`` is element ``k``). Vertex ids are positions in the canonical
enumeration, which is ascending numeric order and therefore colex order, so
``colex_rank`` is an exact index.

Kernels go through :func:`kneserlab._jit.njit`. The ``*_np`` functions are
vectorized twins used when the JIT is switched off.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._jit import USE_JIT, njit

MAX_N = 62


@lru_cache(maxsize=None)
def binom_table(nmax: int = MAX_N) -> np.ndarray:
    """Pascal triangle as an ``(nmax+1, nmax+1)`` int64 array."""
    t = np.zeros((nmax + 1, nmax + 1), dtype=np.int64)
    for a in range(nmax + 1):
        t[a, 0] = 1
        for b in range(1, a + 1):
            t[a, b] = t[a - 1, b - 1] + t[a - 1, b]
    t.setflags(write=False)
    return t


@njit
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit
def colex_rank(mask, binom):
    rank = 0
    i = 1
    pos = 0
    while mask:
        if mask & 1:
            rank += binom[pos, i]
            i += 1
        mask >>= 1
        pos += 1
    return rank


@njit
def gosper_fill(n, r, out):
    """Write every r-subset of an n-bit universe into ``out`` in ascending order."""
    x = (1 << r) - 1
    limit = 1 << n
    i = 0
    while x < limit:
        out[i] = x
        i += 1
        c = x & -x
        y = x + c
        x = (((y ^ x) >> 2) // c) | y
    return i


@njit
def neighbor_table(masks, n, r, binom):
    """Row ``v`` lists, ascending, the ids of all r-sets disjoint from vertex ``v``.

    Neighbors are generated as r-subsets of the complement (Gosper over the
    free positions, then deposited), never by scanning all vertex pairs.
    """
    V = masks.shape[0]
    free = n - r
    D = binom[free, r]
    full = (1 << n) - 1
    out = np.empty((V, D), np.int32)
    pos = np.empty(free, np.int64)
    lim = 1 << free
    for v in range(V):
        comp = full ^ masks[v]
        k = 0
        b = 0
        while comp:
            if comp & 1:
                pos[k] = b
                k += 1
            comp >>= 1
            b += 1
        x = (1 << r) - 1
        j = 0
        while x < lim:
            m = 0
            y = x
            idx = 0
            while y:
                if y & 1:
                    m |= 1 << pos[idx]
                y >>= 1
                idx += 1
            out[v, j] = colex_rank(m, binom)
            j += 1
            c = x & -x
            z = x + c
            x = (((z ^ x) >> 2) // c) | z
    return out


@njit
def bfs_labels(nbr, blocked):
    """Component labels in order of first canonical vertex; blocked vertices get -1."""
    V = nbr.shape[0]
    D = nbr.shape[1]
    labels = np.full(V, -1, np.int32)
    queue = np.empty(V, np.int64)
    comp = 0
    for s in range(V):
        if blocked[s] or labels[s] >= 0:
            continue
        labels[s] = comp
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            v = queue[head]
            head += 1
            for j in range(D):
                u = nbr[v, j]
                if not blocked[u] and labels[u] < 0:
                    labels[u] = comp
                    queue[tail] = u
                    tail += 1
        comp += 1
    return labels, comp


@njit
def bfs_parents(nbr, blocked, src, dst):
    """BFS tree from ``src`` with canonical neighbor order, stopping at ``dst``.

    ``parent[src] == src``; unreached vertices keep -1.
    """
    V = nbr.shape[0]
    D = nbr.shape[1]
    parent = np.full(V, -1, np.int64)
    queue = np.empty(V, np.int64)
    parent[src] = src
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for j in range(D):
            u = nbr[v, j]
            if blocked[u] or parent[u] >= 0:
                continue
            parent[u] = v
            if u == dst:
                return parent
            queue[tail] = u
            tail += 1
    return parent


# -- vertex connectivity -----------------------------------------------------


@njit
def split_graph(nbr, alive, uncuttable, big):
    """Residual network for vertex-capacitated flow on the alive subgraph.

    Vertex ``v`` becomes ``2v`` (in) -> ``2v+1`` (out) with capacity 1, or
    ``big`` if it may not be cut. Each disjointness edge becomes two arcs
    out -> in of capacity ``big``. Split arcs are the first arc of their node.
    """
    V = nbr.shape[0]
    D = nbr.shape[1]
    N = 2 * V
    cnt = np.zeros(N, np.int64)
    for v in range(V):
        if not alive[v]:
            continue
        cnt[2 * v] += 1
        cnt[2 * v + 1] += 1
        for j in range(D):
            u = nbr[v, j]
            if alive[u]:
                cnt[2 * v + 1] += 1
                cnt[2 * u] += 1
    start = np.zeros(N + 1, np.int64)
    for i in range(N):
        start[i + 1] = start[i] + cnt[i]
    M = start[N]
    to = np.empty(M, np.int64)
    cap = np.zeros(M, np.int64)
    rev = np.empty(M, np.int64)
    fill = start[:N].copy()
    for v in range(V):
        if not alive[v]:
            continue
        a = 2 * v
        b = a + 1
        ia = fill[a]
        ib = fill[b]
        to[ia] = b
        cap[ia] = big if uncuttable[v] else 1
        rev[ia] = ib
        to[ib] = a
        rev[ib] = ia
        fill[a] += 1
        fill[b] += 1
    for v in range(V):
        if not alive[v]:
            continue
        for j in range(D):
            u = nbr[v, j]
            if not alive[u]:
                continue
            a = 2 * v + 1
            b = 2 * u
            ia = fill[a]
            ib = fill[b]
            to[ia] = b
            cap[ia] = big
            rev[ia] = ib
            to[ib] = a
            rev[ib] = ia
            fill[a] += 1
            fill[b] += 1
    return start, to, cap, rev


@njit
def unit_flow(start, to, cap0, rev, src, sink, stop, big, cap, parent, queue):
    """Edmonds-Karp from ``src`` to ``sink``, giving up once the flow reaches ``stop``.

    Returns ``big`` if an augmenting path crosses no cuttable vertex.
    """
    for e in range(cap.shape[0]):
        cap[e] = cap0[e]
    flow = 0
    while flow < stop:
        for i in range(parent.shape[0]):
            parent[i] = -1
        parent[src] = -2
        queue[0] = src
        head = 0
        tail = 1
        found = False
        while head < tail and not found:
            x = queue[head]
            head += 1
            for e in range(start[x], start[x + 1]):
                if cap[e] > 0:
                    y = to[e]
                    if parent[y] == -1:
                        parent[y] = e
                        if y == sink:
                            found = True
                            break
                        queue[tail] = y
                        tail += 1
        if not found:
            break
        b = big
        y = sink
        while y != src:
            e = parent[y]
            if cap[e] < b:
                b = cap[e]
            y = to[rev[e]]
        if b >= big:
            return big
        y = sink
        while y != src:
            e = parent[y]
            cap[e] -= b
            cap[rev[e]] += b
            y = to[rev[e]]
        flow += b
    return flow


@njit
def min_vertex_cut(nbr, masks, alive, uncuttable, limit, target):
    """Smallest vertex set (avoiding ``uncuttable``) whose removal disconnects the alive subgraph.

    Returns ``min(cut size, limit + 1)``; ``limit + 1`` also means no such set
    exists (e.g. the alive subgraph is complete). Returns as soon as the
    running minimum is ``<= target``.

    Pairs are scanned in Even's order: uncuttable vertices first, and the
    outer loop stops once it has passed a vertex that cannot be in the cut.
    """
    V = nbr.shape[0]
    big = V + 1
    start, to, cap0, rev = split_graph(nbr, alive, uncuttable, big)
    order = np.empty(V, np.int64)
    L = 0
    for v in range(V):
        if alive[v] and uncuttable[v]:
            order[L] = v
            L += 1
    for v in range(V):
        if alive[v] and not uncuttable[v]:
            order[L] = v
            L += 1
    cap = np.empty_like(cap0)
    parent = np.empty(2 * V, np.int64)
    queue = np.empty(2 * V, np.int64)
    best = limit + 1
    for ii in range(L):
        s = order[ii]
        for jj in range(ii + 1, L):
            t = order[jj]
            if (masks[s] & masks[t]) == 0:
                continue
            f = unit_flow(start, to, cap0, rev, 2 * s + 1, 2 * t, best, big, cap, parent, queue)
            if f < best:
                best = f
                if best <= target or best == 0:
                    return best
        if uncuttable[s] or ii >= best:
            break
    return best


@njit
def first_disconnecting_subset(nbr, size):
    """Lexicographically first ``size``-subset of vertex ids whose removal disconnects the graph.

    Returns an empty array if none exists. Brute force; used as an oracle.
    """
    V = nbr.shape[0]
    blocked = np.zeros(V, np.bool_)
    idx = np.arange(size)
    if size > V - 2:
        return np.empty(0, np.int64)
    while True:
        for i in range(size):
            blocked[idx[i]] = True
        labels, count = bfs_labels(nbr, blocked)
        for i in range(size):
            blocked[idx[i]] = False
        if count >= 2:
            return idx.astype(np.int64)
        i = size - 1
        while i >= 0 and idx[i] == V - size + i:
            i -= 1
        if i < 0:
            return np.empty(0, np.int64)
        idx[i] += 1
        for j in range(i + 1, size):
            idx[j] = idx[j - 1] + 1


# -- family predicates -------------------------------------------------------


@njit
def _min_cross_intersection_jit(fa, fb):
    best = 64
    for i in range(fa.shape[0]):
        a = fa[i]
        for j in range(fb.shape[0]):
            c = popcount(a & fb[j])
            if c < best:
                best = c
                if best == 0:
                    return 0
    return best


def _min_cross_intersection_np(fa, fb, chunk=2048):
    best = 64
    for lo in range(0, fa.shape[0], chunk):
        block = np.bitwise_count(fa[lo:lo + chunk, None] & fb[None, :])
        if block.size:
            best = min(best, int(block.min()))
        if best == 0:
            break
    return best


@njit
def _has_disjoint_pair_jit(f):
    for i in range(f.shape[0]):
        for j in range(i + 1, f.shape[0]):
            if (f[i] & f[j]) == 0:
                return True
    return False


def _has_disjoint_pair_np(f, chunk=2048):
    for lo in range(0, f.shape[0], chunk):
        block = (f[lo:lo + chunk, None] & f[None, :]) == 0
        rows = np.arange(lo, lo + block.shape[0])
        block[np.arange(block.shape[0]), rows] = False
        if block.any():
            return True
    return False


def min_cross_intersection(fa: np.ndarray, fb: np.ndarray) -> int:
    """Minimum ``|A & B|`` over all cross pairs; 64 when either side is empty."""
    if fa.shape[0] == 0 or fb.shape[0] == 0:
        return 64
    if USE_JIT:
        return int(_min_cross_intersection_jit(fa, fb))
    return _min_cross_intersection_np(fa, fb)


def has_disjoint_pair(f: np.ndarray) -> bool:
    if USE_JIT:
        return bool(_has_disjoint_pair_jit(f))
    return _has_disjoint_pair_np(f)


# -- exhaustive searches -----------------------------------------------------


@njit
def _valid_bipartitions_jit(pi, pj, N):
    out = np.empty(1 << 16, np.int64)
    k = 0
    full = (1 << N) - 1
    for mask in range(1, full):
        ok = True
        for e in range(pi.shape[0]):
            if ((mask >> pi[e]) & 1) != ((mask >> pj[e]) & 1):
                ok = False
                break
        if ok:
            if k == out.shape[0]:
                grown = np.empty(2 * k, np.int64)
                grown[:k] = out
                out = grown
            out[k] = mask
            k += 1
    return out[:k]


def _valid_bipartitions_np(pi, pj, N, chunk=1 << 20):
    found = []
    full = (1 << N) - 1
    for lo in range(1, full, chunk):
        masks = np.arange(lo, min(lo + chunk, full), dtype=np.int64)
        ok = np.ones(masks.shape[0], dtype=bool)
        for a, b in zip(pi, pj):
            ok &= ((masks >> a) & 1) == ((masks >> b) & 1)
        found.append(masks[ok])
    return np.concatenate(found) if found else np.empty(0, np.int64)


def valid_bipartitions(pi: np.ndarray, pj: np.ndarray, N: int) -> np.ndarray:
    """All splits of N vertices into two nonempty sides with no edge ``(pi[e], pj[e])`` crossing.

    A split is the bitmask of side A over vertex ids.
    """
    if USE_JIT:
        return _valid_bipartitions_jit(pi, pj, N)
    return _valid_bipartitions_np(pi, pj, N)


@njit
def _best_pair_sum_jit(nbrbits, N):
    full = (1 << N) - 1
    best = -1
    best_a = 0
    for amask in range(1, full + 1):
        nb = 0
        x = amask
        i = 0
        while x:
            if x & 1:
                nb |= nbrbits[i]
            x >>= 1
            i += 1
        allowed = full & ~(amask | nb)
        if allowed:
            val = popcount(amask) + popcount(allowed)
            if val > best:
                best = val
                best_a = amask
    return best, best_a


def _best_pair_sum_np(nbrbits, N, chunk=1 << 18):
    full = (1 << N) - 1
    best, best_a = -1, 0
    for lo in range(1, full + 1, chunk):
        amask = np.arange(lo, min(lo + chunk, full + 1), dtype=np.int64)
        nb = np.zeros_like(amask)
        for i in range(N):
            nb |= np.where((amask >> i) & 1, nbrbits[i], 0)
        allowed = full & ~(amask | nb)
        # bitwise_count yields uint8; widen before the -1 sentinel can wrap
        size = np.bitwise_count(amask).astype(np.int64) + np.bitwise_count(allowed)
        val = np.where(allowed != 0, size, -1)
        k = int(np.argmax(val))
        if val[k] > best:
            best, best_a = int(val[k]), int(amask[k])
    return best, best_a


def best_pair_sum(nbrbits: np.ndarray, N: int) -> tuple[int, int]:
    """Max ``|A| + |B|`` over nonempty A, B with no edge between them and A, B disjoint.

    ``nbrbits[i]`` is the neighborhood of vertex i as a bitmask over vertex
    ids. For each A the best B is every vertex outside A and its neighborhood,
    so only the ``2^N`` choices of A are enumerated. Returns ``(-1, 0)`` if no
    valid pair exists.
    """
    if USE_JIT:
        best, best_a = _best_pair_sum_jit(nbrbits, N)
        return int(best), int(best_a)
    return _best_pair_sum_np(nbrbits, N)
