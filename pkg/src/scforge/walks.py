"""Enumeration of closed non-backtracking length-8 walks in a bipartite graph.

A walk is stored as ``(c1, v1, c2, v2, c3, v3, c4, v4)`` where CN ``c_x``
joins VNs ``v_x`` and ``v_{x+1}`` (indices cyclic), i.e. the traversal
``v1 c1 v2 c2 v3 c3 v4 c4 v1``.  Consecutive CNs and consecutive VNs differ,
which is exactly the no-immediate-backtracking condition.
"""

from __future__ import annotations

import numpy as np


def _rotations_and_reflections(w):
    c = w[0::2]
    v = w[1::2]
    for s in range(4):
        cs = c[s:] + c[:s]
        vs = v[s:] + v[:s]
        yield tuple(x for pair in zip(cs, vs) for x in pair)
    # reverse traversal: v1 c4 v4 c3 v3 c2 v2 c1 -> c'_x = c_{-x}, v'_x = v_{1-x}
    rc = (c[3], c[2], c[1], c[0])
    rv = (v[0], v[3], v[2], v[1])
    for s in range(4):
        cs = rc[s:] + rc[:s]
        vs = rv[s:] + rv[:s]
        yield tuple(x for pair in zip(cs, vs) for x in pair)


def canonical(walk) -> tuple[int, ...]:
    """Lexicographically least rotation/reflection of a walk."""
    return min(_rotations_and_reflections(tuple(int(x) for x in walk)))


def adjacency(matrix) -> tuple[list[list[int]], list[list[int]]]:
    m = np.asarray(matrix)
    cn = [list(map(int, np.flatnonzero(row))) for row in m]
    vn = [list(map(int, np.flatnonzero(col))) for col in m.T]
    return cn, vn


def closed_walks8(matrix, *, first_cns=None) -> list[tuple[int, ...]]:
    """All canonical closed length-8 walks, sorted.

    Every canonical walk starts at its smallest CN, so the search only
    extends walks whose later CNs are at least ``c1``.  When ``c1`` occurs
    once, the only other traversal starting there is the reversal
    ``(c1, v2, c4, v1, ...)``, so the walk is canonical iff ``v1 < v2``.
    Walks revisiting ``c1`` as ``c3`` have four traversals starting there.
    ``first_cns`` restricts the starting CN (used to shard the search).
    """
    cn_adj, vn_adj = adjacency(matrix)
    cn_set = [set(a) for a in cn_adj]
    found = []
    starts = range(len(cn_adj)) if first_cns is None else first_cns
    for c1 in starts:
        nb1 = cn_set[c1]
        # VNs shared by c1 and each later CN close the walk
        closing = {c: sorted(nb1 & cn_set[c]) for c in range(c1 + 1, len(cn_adj))}
        for v2 in cn_adj[c1]:
            for c2 in vn_adj[v2]:
                if c2 <= c1:
                    continue
                for v3 in cn_adj[c2]:
                    if v3 == v2:
                        continue
                    for c3 in vn_adj[v3]:
                        if c3 < c1 or c3 == c2:
                            continue
                        for v4 in cn_adj[c3]:
                            if v4 == v3:
                                continue
                            for c4 in vn_adj[v4]:
                                if c4 <= c1 or c4 == c3:
                                    continue
                                if c3 == c1:
                                    for v1 in closing[c4]:
                                        if v1 == v4 or v1 == v2:
                                            continue
                                        w = (c1, v1, c2, v2, c1, v3, c4, v4)
                                        # the other traversals that start at c1
                                        if (w <= (c1, v3, c4, v4, c1, v1, c2, v2)
                                                and w <= (c1, v2, c4, v1, c1, v4, c2, v3)
                                                and w <= (c1, v4, c2, v3, c1, v2, c4, v1)):
                                            found.append(w)
                                    continue
                                for v1 in closing[c4]:
                                    if v1 >= v2:
                                        break
                                    if v1 != v4:
                                        found.append((c1, v1, c2, v2, c3, v3, c4, v4))
    found.sort()
    return found


def walk_nodes(walk) -> tuple[frozenset, frozenset]:
    return frozenset(walk[0::2]), frozenset(walk[1::2])
