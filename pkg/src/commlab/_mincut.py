"""Minimum-cut kernel for constrained subproblems of the cut enumerator.

Given an undirected unit-capacity graph and a per-vertex label array
(0 = forced to the source side, 1 = forced to the sink side, 2 = free),
compute a minimum cut separating the two forced groups, i.e. max-flow between
the contracted supernodes, and the source-side indicator of every vertex.

Compiled with numba when available (the enumerator makes millions of calls
on small graphs); a pure-Python port with identical semantics is the fallback.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


def _mincut_py(n, edges, labels):
    nn = 2
    vmap = [0] * n
    for v in range(n):
        if labels[v] == 0:
            vmap[v] = 0
        elif labels[v] == 1:
            vmap[v] = 1
        else:
            vmap[v] = nn
            nn += 1
    head = [-1] * nn
    nxt, to, cap = [], [], []
    for e in range(len(edges)):
        a, b = vmap[edges[e][0]], vmap[edges[e][1]]
        if a == b:
            continue
        to.append(b); cap.append(1); nxt.append(head[a]); head[a] = len(to) - 1
        to.append(a); cap.append(1); nxt.append(head[b]); head[b] = len(to) - 1
    flow = 0
    while True:
        level = [-1] * nn
        level[0] = 0
        q = [0]
        for v in q:
            e = head[v]
            while e != -1:
                if cap[e] > 0 and level[to[e]] < 0:
                    level[to[e]] = level[v] + 1
                    q.append(to[e])
                e = nxt[e]
        if level[1] < 0:
            break
        it = head[:]
        while True:
            v, path = 0, []
            found = False
            while True:
                if v == 1:
                    found = True
                    break
                e = it[v]
                advanced = False
                while e != -1:
                    if cap[e] > 0 and level[to[e]] == level[v] + 1:
                        path.append(e)
                        v = to[e]
                        advanced = True
                        break
                    e = nxt[e]
                    it[v] = e
                if not advanced:
                    if not path:
                        break
                    level[v] = -1
                    e = path.pop()
                    v = to[e ^ 1]
            if not found:
                break
            for e in path:
                cap[e] -= 1
                cap[e ^ 1] += 1
            flow += 1
    seen = [False] * nn
    seen[0] = True
    q = [0]
    for v in q:
        e = head[v]
        while e != -1:
            if cap[e] > 0 and not seen[to[e]]:
                seen[to[e]] = True
                q.append(to[e])
            e = nxt[e]
    side = np.zeros(n, np.int8)
    for v in range(n):
        side[v] = 1 if seen[vmap[v]] else 0
    return flow, side


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _mincut_nb(n, edges, labels):  # pragma: no cover - numba path
        nn = 2
        vmap = np.empty(n, np.int64)
        for v in range(n):
            if labels[v] == 0:
                vmap[v] = 0
            elif labels[v] == 1:
                vmap[v] = 1
            else:
                vmap[v] = nn
                nn += 1
        m = edges.shape[0]
        head = np.full(nn, -1, np.int64)
        nxt = np.empty(4 * m + 4, np.int64)
        to = np.empty(4 * m + 4, np.int64)
        cap = np.empty(4 * m + 4, np.int64)
        cnt = 0
        for e in range(m):
            a = vmap[edges[e, 0]]
            b = vmap[edges[e, 1]]
            if a == b:
                continue
            to[cnt] = b; cap[cnt] = 1; nxt[cnt] = head[a]; head[a] = cnt; cnt += 1
            to[cnt] = a; cap[cnt] = 1; nxt[cnt] = head[b]; head[b] = cnt; cnt += 1
        flow = 0
        level = np.empty(nn, np.int64)
        it = np.empty(nn, np.int64)
        q = np.empty(nn, np.int64)
        path = np.empty(nn + 1, np.int64)
        while True:
            for v in range(nn):
                level[v] = -1
            level[0] = 0
            q[0] = 0
            qh, qt = 0, 1
            while qh < qt:
                v = q[qh]; qh += 1
                e = head[v]
                while e != -1:
                    if cap[e] > 0 and level[to[e]] < 0:
                        level[to[e]] = level[v] + 1
                        q[qt] = to[e]; qt += 1
                    e = nxt[e]
            if level[1] < 0:
                break
            for v in range(nn):
                it[v] = head[v]
            while True:
                v = 0
                plen = 0
                found = False
                while True:
                    if v == 1:
                        found = True
                        break
                    e = it[v]
                    advanced = False
                    while e != -1:
                        if cap[e] > 0 and level[to[e]] == level[v] + 1:
                            path[plen] = e
                            plen += 1
                            v = to[e]
                            advanced = True
                            break
                        e = nxt[e]
                        it[v] = e
                    if not advanced:
                        if plen == 0:
                            break
                        level[v] = -1
                        plen -= 1
                        v = to[path[plen] ^ 1]
                if not found:
                    break
                for k in range(plen):
                    cap[path[k]] -= 1
                    cap[path[k] ^ 1] += 1
                flow += 1
        side = np.zeros(n, np.int8)
        seen = np.zeros(nn, np.int8)
        seen[0] = 1
        q[0] = 0
        qh, qt = 0, 1
        while qh < qt:
            v = q[qh]; qh += 1
            e = head[v]
            while e != -1:
                if cap[e] > 0 and seen[to[e]] == 0:
                    seen[to[e]] = 1
                    q[qt] = to[e]; qt += 1
                e = nxt[e]
        for v in range(n):
            side[v] = seen[vmap[v]]
        return flow, side


def constrained_mincut(n: int, edges: np.ndarray, labels: np.ndarray) -> tuple[int, np.ndarray]:
    """Min cut separating label-0 vertices from label-1 vertices.

    Returns (weight, side) where side[v] == 1 iff v ends on the label-0 side.
    ``edges`` is an (m, 2) int64 array; ``labels`` an (n,) int8 array.
    """
    if _HAVE_NUMBA:
        return _mincut_nb(n, edges, labels)
    return _mincut_py(n, edges, labels)
