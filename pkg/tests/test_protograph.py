from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scforge.protograph import (
    REFERENCE_PARTITION_G3K7,
    CodeParams,
    ColumnTypeDistribution,
    PartitionMatrix,
    all_cutting_vectors,
    build_sc_protograph,
    cv_partition,
    independent_param_count,
    overlap_params,
    partition_from_distribution,
    t_lookup,
    uncoupled_partition,
)


@st.composite
def partitions(draw, min_gamma=1, max_gamma=4, max_kappa=6, max_m=2):
    g = draw(st.integers(min_gamma, max_gamma))
    k = draw(st.integers(1, max_kappa))
    m = draw(st.integers(0, max_m))
    cells = draw(st.lists(st.integers(0, m), min_size=g * k, max_size=g * k))
    return PartitionMatrix(np.array(cells).reshape(g, k), m)


class TestCodeParams:
    def test_gamma_two_rejected_with_reason(self):
        with pytest.raises(ValueError, match="column weight 2"):
            CodeParams(2, 5, 7, 1, 3)

    @pytest.mark.parametrize("kw", [
        dict(gamma=1), dict(z=7), dict(z=3), dict(L=0), dict(m=-1),
    ])
    def test_invalid(self, kw):
        base = dict(gamma=3, kappa=7, z=13, m=1, L=5)
        base.update(kw)
        with pytest.raises(ValueError):
            CodeParams(**base)

    def test_window_width(self):
        assert CodeParams(3, 7, 13, 2, 10).window_replicas == 5


class TestPartitionFromDistribution:
    def test_single_type(self):
        p = CodeParams(3, 2, 5, 1, 2)
        part = partition_from_distribution(ColumnTypeDistribution({(0, 0, 0): 2}, 3, 1), p)
        assert part.to_list() == [[0, 0], [0, 0], [0, 0]]

    def test_ordering_rule(self):
        p = CodeParams(3, 2, 5, 1, 2)
        dist = ColumnTypeDistribution({(0, 1, 0): 1, (1, 0, 1): 1}, 3, 1)
        part = partition_from_distribution(dist, p)
        assert part.column_types() == [(0, 1, 0), (1, 0, 1)]

    def test_g3k7_histogram(self):
        hist = REFERENCE_PARTITION_G3K7.histogram()
        part = partition_from_distribution(hist, CodeParams(3, 7, 13, 1, 10))
        assert overlap_params(part).independent_vector() == [3, 3, 4, 0, 1, 2, 0]

    def test_mass_mismatch(self):
        with pytest.raises(ValueError):
            partition_from_distribution(ColumnTypeDistribution({(0, 0, 0): 1}, 3, 1),
                                        CodeParams(3, 2, 5, 1, 2))

    @given(partitions(min_gamma=3))
    def test_histogram_round_trip(self, part):
        params = CodeParams(part.gamma, part.kappa, part.kappa + 1, part.m, 1)
        hist = part.histogram()
        assert partition_from_distribution(hist, params).histogram() == hist


class TestOverlapParams:
    def test_uncoupled(self):
        t = overlap_params(uncoupled_partition(CodeParams(3, 7, 13, 1, 10)))
        for s in [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]:
            assert t[s] == 7
        assert all(t[s] == 0 for s in [(3,), (4,), (5,), (0, 4), (3, 4, 5)])

    def test_g3k7(self):
        t = overlap_params(REFERENCE_PARTITION_G3K7)
        assert [t[0], t[1], t[2], t[0, 1], t[0, 2], t[1, 2], t[0, 1, 2]] == [3, 3, 4, 0, 1, 2, 0]

    def test_lookup_examples(self):
        t = overlap_params(uncoupled_partition(CodeParams(3, 7, 13, 1, 10)))
        assert t_lookup(t, {-3, 1}) == 0
        assert t_lookup(t, {0}) == 7
        assert t_lookup(t, {0, 3}) == 0

    @given(partitions())
    def test_invariants_against_column_scan(self, part):
        t = overlap_params(part)
        g, h = part.gamma, (part.m + 1) * part.gamma
        stacked = part.stacked()
        assert sum(t[i] for i in range(h)) == g * part.kappa
        for mu in range(1, min(g, 3) + 1):
            for s in combinations(range(h), mu):
                scan = int(np.all(stacked[list(s)] == 1, axis=0).sum())
                assert t[s] == scan
                if len({i % g for i in s}) < mu:
                    assert t[s] == 0
                for j in range(h):
                    assert t_lookup(t, set(s) | {j}) <= t[s]


class TestSCProtograph:
    def test_memory_zero_is_block_diagonal(self):
        part = PartitionMatrix(np.zeros((3, 4), dtype=int), 0)
        sc = build_sc_protograph(part, 3)
        expected = np.kron(np.eye(3, dtype=int), np.ones((3, 4), dtype=int))
        assert np.array_equal(sc.matrix, expected)

    def test_shape(self):
        sc = build_sc_protograph(REFERENCE_PARTITION_G3K7, 2)
        assert sc.shape == (9, 14)
        assert list(sc.replica_of_column) == [0] * 7 + [1] * 7

    @given(partitions(), st.integers(1, 4))
    def test_row_weights(self, part, L):
        sc = build_sc_protograph(part, L)
        g = part.gamma
        for r in range(sc.shape[0]):
            expected = 0
            for rho in range(L):
                y = r // g - rho
                if 0 <= y <= part.m:
                    expected += int(part.component(y)[r % g].sum())
            assert int(sc.matrix[r].sum()) == expected
        assert np.all(sc.matrix.sum(axis=0) == g)

    def test_needs_positive_length(self):
        with pytest.raises(ValueError):
            build_sc_protograph(REFERENCE_PARTITION_G3K7, 0)


class TestCuttingVectors:
    def test_code2_vector(self):
        part = cv_partition([4, 9, 15], CodeParams(3, 19, 46, 1, 5))
        assert int((part.assign == 0).sum()) == 28
        assert part.assign[0, 3] == 0 and part.assign[0, 4] == 1

    def test_code9_vector(self):
        part = cv_partition([3, 7, 11, 14], CodeParams(4, 17, 37, 1, 6))
        assert int((part.assign == 0).sum()) == 35

    @pytest.mark.parametrize("zeta", [[7, 7, 7], [3, 2, 5], [-1, 2, 3], [1, 2, 8], [1, 2]])
    def test_invalid(self, zeta):
        with pytest.raises(ValueError):
            cv_partition(zeta, CodeParams(3, 7, 13, 1, 5))

    def test_needs_memory_one(self):
        with pytest.raises(ValueError):
            cv_partition([1, 2, 3], CodeParams(3, 7, 13, 2, 5))

    def test_all_vectors_are_valid(self):
        p = CodeParams(3, 5, 7, 1, 3)
        vecs = list(all_cutting_vectors(p))
        assert len(vecs) == 20
        for v in vecs:
            cv_partition(v, p)


@pytest.mark.parametrize("g,m,n", [(3, 1, 7), (3, 2, 26), (4, 1, 15)])
def test_independent_param_count(g, m, n):
    assert independent_param_count(g, m) == n
