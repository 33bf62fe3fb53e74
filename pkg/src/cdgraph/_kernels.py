"""Hot inner loops over permutation arrays.

Every kernel exists twice: a pure-numpy version and a numba ``@njit``
version with the same signature and output. The numba path is used when
numba imports cleanly and ``CDGRAPH_NUMBA`` is not set to ``0``; the two
paths are kept side by side so tests and ``benchmarks/bench_kernels.py``
can compare them directly.

All permutation arrays are 2-d ``(count, degree)`` integer arrays whose
rows are image sequences. Products are read left to right: ``(a*b)[x] ==
b[a[x]]``.
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

INDEX_DTYPE = np.int64


# --------------------------------------------------------------------------
# numpy implementations


def _np_compose(a, b):
    return np.take_along_axis(b, a, axis=1)


def _np_conjugate(rows, g, ginv):
    # g^-1 * x * g, applied left to right
    return g[rows[:, ginv]]


def _np_row_keys(rows, base, radix):
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for point in base:
        keys = keys * radix + rows[:, point].astype(np.int64)
    return keys


def _np_orders(rows):
    n, d = rows.shape
    orders = np.ones(n, dtype=INDEX_DTYPE)
    if n == 0:
        return orders
    ident = np.arange(d, dtype=rows.dtype)
    # walk every point until it returns home; cycle length per point
    pos = rows.copy()
    cyc = np.zeros((n, d), dtype=INDEX_DTYPE)
    steps = 1
    open_ = pos != ident
    cyc[~open_] = 1
    while open_.any():
        steps += 1
        pos = np.take_along_axis(rows, pos, axis=1)
        closed = open_ & (pos == ident)
        cyc[closed] = steps
        open_ &= ~closed
    for j in range(d):
        orders = np.lcm(orders, cyc[:, j])
    return orders


def _np_powers(rows, exps):
    n, d = rows.shape
    result = np.broadcast_to(np.arange(d, dtype=rows.dtype), (n, d)).copy()
    base = rows.copy()
    e = np.asarray(exps, dtype=INDEX_DTYPE).copy()
    while (e > 0).any():
        odd = (e & 1).astype(bool)
        if odd.any():
            result[odd] = np.take_along_axis(base[odd], result[odd], axis=1)
        e >>= 1
        base = np.take_along_axis(base, base, axis=1)
    return result


def _np_commutes_with(rows, g):
    # x*g == g*x for each row x
    return (g[rows] == rows[:, g]).all(axis=1)


def _np_component_labels(n, src, dst):
    labels = np.arange(n, dtype=INDEX_DTYPE)
    if len(src) == 0:
        return labels
    src = np.asarray(src, dtype=INDEX_DTYPE)
    dst = np.asarray(dst, dtype=INDEX_DTYPE)
    while True:
        m = np.minimum(labels[src], labels[dst])
        new = labels.copy()
        np.minimum.at(new, src, m)
        np.minimum.at(new, dst, m)
        new = new[new]  # pointer jumping
        if np.array_equal(new, labels):
            return labels
        labels = new


def _np_all_pairs_bfs(adj):
    n = adj.shape[0]
    dist = np.full((n, n), -1, dtype=INDEX_DTYPE)
    if n == 0:
        return dist
    a = adj.astype(np.int64)
    reached = np.eye(n, dtype=bool)
    frontier = reached.copy()
    dist[reached] = 0
    step = 0
    while frontier.any():
        step += 1
        nxt = (frontier.astype(np.int64) @ a) > 0
        nxt &= ~reached
        dist[nxt] = step
        reached |= nxt
        frontier = nxt
    return dist


numpy_impl = SimpleNamespace(
    compose=_np_compose,
    conjugate=_np_conjugate,
    row_keys=_np_row_keys,
    orders=_np_orders,
    powers=_np_powers,
    commutes_with=_np_commutes_with,
    component_labels=_np_component_labels,
    all_pairs_bfs=_np_all_pairs_bfs,
)


# --------------------------------------------------------------------------
# numba implementations


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def compose(a, b):
        n, d = a.shape
        out = np.empty_like(a)
        for i in range(n):
            for x in range(d):
                out[i, x] = b[i, a[i, x]]
        return out

    @njit(cache=True)
    def conjugate(rows, g, ginv):
        n, d = rows.shape
        out = np.empty_like(rows)
        for i in range(n):
            for x in range(d):
                out[i, x] = g[rows[i, ginv[x]]]
        return out

    @njit(cache=True)
    def row_keys(rows, base, radix):
        n = rows.shape[0]
        keys = np.zeros(n, dtype=np.int64)
        for i in range(n):
            k = 0
            for j in range(base.shape[0]):
                k = k * radix + rows[i, base[j]]
            keys[i] = k
        return keys

    @njit(cache=True)
    def orders(rows):
        n, d = rows.shape
        out = np.ones(n, dtype=np.int64)
        seen = np.zeros(d, dtype=np.bool_)
        for i in range(n):
            seen[:] = False
            acc = 1
            for start in range(d):
                if seen[start]:
                    continue
                length = 0
                x = start
                while not seen[x]:
                    seen[x] = True
                    x = rows[i, x]
                    length += 1
                a, b = acc, length
                while b:
                    a, b = b, a % b
                acc = acc // a * length
            out[i] = acc
        return out

    @njit(cache=True)
    def powers(rows, exps):
        n, d = rows.shape
        out = np.empty_like(rows)
        seen = np.zeros(d, dtype=np.bool_)
        cyc = np.empty(d, dtype=np.int64)
        for i in range(n):
            seen[:] = False
            e = exps[i]
            for start in range(d):
                if seen[start]:
                    continue
                length = 0
                x = start
                while not seen[x]:
                    seen[x] = True
                    cyc[length] = x
                    x = rows[i, x]
                    length += 1
                shift = e % length
                for k in range(length):
                    out[i, cyc[k]] = cyc[(k + shift) % length]
        return out

    @njit(cache=True)
    def commutes_with(rows, g):
        n, d = rows.shape
        out = np.ones(n, dtype=np.bool_)
        for i in range(n):
            for x in range(d):
                if g[rows[i, x]] != rows[i, g[x]]:
                    out[i] = False
                    break
        return out

    # helper calls between closures defeat numba's on-disk cache, so the
    # union-find root search and the gcd are written inline
    @njit(cache=True)
    def component_labels(n, src, dst):
        parent = np.arange(n)
        for k in range(src.shape[0]):
            a = src[k]
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = dst[k]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            r = i
            while parent[r] != r:
                r = parent[r]
            out[i] = r
        return out

    @njit(cache=True)
    def all_pairs_bfs(adj):
        n = adj.shape[0]
        dist = np.full((n, n), -1, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        for s in range(n):
            dist[s, s] = 0
            queue[0] = s
            head, tail = 0, 1
            while head < tail:
                u = queue[head]
                head += 1
                for v in range(n):
                    if adj[u, v] and dist[s, v] < 0:
                        dist[s, v] = dist[s, u] + 1
                        queue[tail] = v
                        tail += 1
        return dist

    def _wrap_labels(n, src, dst):
        return component_labels(
            n, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)
        )

    def _wrap_keys(rows, base, radix):
        return row_keys(rows, np.asarray(base, dtype=np.int64), radix)

    def _wrap_powers(rows, exps):
        return powers(rows, np.asarray(exps, dtype=np.int64))

    return SimpleNamespace(
        compose=compose,
        conjugate=conjugate,
        row_keys=_wrap_keys,
        orders=orders,
        powers=_wrap_powers,
        commutes_with=commutes_with,
        component_labels=_wrap_labels,
        all_pairs_bfs=all_pairs_bfs,
    )


def _numba_wanted() -> bool:
    return os.environ.get("CDGRAPH_NUMBA", "1").strip().lower() not in {"0", "false", "no", "off"}


try:
    numba_impl = _build_numba()
except ImportError:  # pragma: no cover - numba is optional
    numba_impl = None

USING_NUMBA = numba_impl is not None and _numba_wanted()
active = numba_impl if USING_NUMBA else numpy_impl


def key_radix_fits(degree: int, base_len: int) -> bool:
    return base_len * math.log2(max(degree, 2)) < 62
