import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scforge.walks import adjacency, canonical, closed_walks8


def naive_walks(matrix):
    """Every closed non-backtracking 8-walk, canonicalized after the fact."""
    cn, vn = adjacency(matrix)
    cn_sets = [set(a) for a in cn]
    out = set()
    for c1 in range(len(cn)):
        for v2 in cn[c1]:
            for c2 in vn[v2]:
                if c2 == c1:
                    continue
                for v3 in cn[c2]:
                    if v3 == v2:
                        continue
                    for c3 in vn[v3]:
                        if c3 == c2:
                            continue
                        for v4 in cn[c3]:
                            if v4 == v3:
                                continue
                            for c4 in vn[v4]:
                                if c4 in (c3, c1):
                                    continue
                                for v1 in cn[c4]:
                                    if v1 in (v4, v2) or v1 not in cn_sets[c1]:
                                        continue
                                    out.add(canonical((c1, v1, c2, v2, c3, v3, c4, v4)))
    return sorted(out)


binary = st.tuples(st.integers(1, 6), st.integers(1, 6)).flatmap(
    lambda s: arrays(np.int64, s, elements=st.integers(0, 1)))


@given(binary)
def test_fast_enumeration_matches_naive(matrix):
    walks = closed_walks8(matrix)
    assert walks == naive_walks(matrix)
    assert len(set(walks)) == len(walks)


def test_single_four_cycle():
    assert closed_walks8(np.ones((2, 2), dtype=int)) == [(0, 0, 1, 1, 0, 0, 1, 1)]


def test_canonical_is_symmetry_invariant():
    w = (3, 5, 1, 2, 4, 6, 2, 7)
    c = canonical(w)
    cns, vns = w[0::2], w[1::2]
    rotated = tuple(x for pair in zip(cns[1:] + cns[:1], vns[1:] + vns[:1]) for x in pair)
    rc = (cns[3], cns[2], cns[1], cns[0])
    rv = (vns[0], vns[3], vns[2], vns[1])
    reflected = tuple(x for pair in zip(rc, rv) for x in pair)
    assert canonical(rotated) == c == canonical(reflected)
    assert c[0] == min(cns)


def test_first_cn_sharding_partitions_the_result():
    m = np.ones((4, 4), dtype=int)
    whole = closed_walks8(m)
    parts = sorted(closed_walks8(m, first_cns=[0, 1]) + closed_walks8(m, first_cns=[2, 3]))
    assert parts == whole
