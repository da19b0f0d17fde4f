"""Base and spatially-coupled protographs, partitions and overlap parameters.

Conventions used throughout the package:

* The base protograph is the all-ones ``gamma x kappa`` matrix (no zero
  circulants).  A partition assigns every entry ``(i, j)`` to a component
  ``assign[i, j]`` in ``{0, ..., m}``.
* Stacking the components gives a ``(m+1)*gamma x kappa`` matrix in which
  entry ``(i, j)`` of component ``y`` sits on row ``y*gamma + i``.  Overlap
  parameters are column counts over subsets of these stacked rows.
* The SC protograph places the stacked matrix ``L`` times along the
  diagonal, replica ``r`` (0-based) starting at row ``r*gamma`` and
  occupying columns ``r*kappa .. (r+1)*kappa - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True)
class CodeParams:
    gamma: int
    kappa: int
    z: int
    m: int
    L: int

    def __post_init__(self):
        if self.gamma == 2:
            raise ValueError(
                "gamma = 2 is not supported: with column weight 2 every cycle "
                "of the target length is itself the detrimental object, so the "
                "pattern-based partitioning offers nothing over plain girth "
                "optimization; use gamma >= 3"
            )
        if self.gamma < 3:
            raise ValueError(f"column weight must be at least 3, got {self.gamma}")
        if self.kappa < 0:
            raise ValueError(f"row weight must be non-negative, got {self.kappa}")
        if self.m < 0:
            raise ValueError(f"memory must be non-negative, got {self.m}")
        if self.L < 1:
            raise ValueError(f"coupling length must be at least 1, got {self.L}")
        if self.z <= self.kappa:
            raise ValueError(
                f"circulant size z={self.z} must exceed the row weight "
                f"kappa={self.kappa}"
            )

    @property
    def window_replicas(self) -> int:
        """Replica count of the working window, 2m+1."""
        return 2 * self.m + 1

    def with_(self, **changes) -> "CodeParams":
        values = dict(gamma=self.gamma, kappa=self.kappa, z=self.z, m=self.m, L=self.L)
        values.update(changes)
        return CodeParams(**values)


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.int64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PartitionMatrix:
    """Component index of every circulant of the base matrix."""

    assign: np.ndarray
    m: int

    def __post_init__(self):
        a = _freeze(self.assign)
        if a.ndim != 2:
            raise ValueError("assignment must be a 2-D array")
        if a.size and (a.min() < 0 or a.max() > self.m):
            raise ValueError(f"component indices must lie in [0, {self.m}]")
        object.__setattr__(self, "assign", a)

    @property
    def gamma(self) -> int:
        return self.assign.shape[0]

    @property
    def kappa(self) -> int:
        return self.assign.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PartitionMatrix):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.assign, other.assign)

    def __hash__(self):
        return hash((self.m, self.assign.shape, self.assign.tobytes()))

    def component(self, y: int) -> np.ndarray:
        return (self.assign == y).astype(np.uint8)

    def stacked(self) -> np.ndarray:
        """The ``(m+1)*gamma x kappa`` stacked replica protograph."""
        return np.vstack([self.component(y) for y in range(self.m + 1)])

    def column_types(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in col) for col in self.assign.T]

    def histogram(self) -> "ColumnTypeDistribution":
        counts: dict[tuple[int, ...], int] = {}
        for a in self.column_types():
            counts[a] = counts.get(a, 0) + 1
        return ColumnTypeDistribution(counts, self.gamma, self.m)

    def to_list(self) -> list[list[int]]:
        return self.assign.tolist()


@dataclass(frozen=True)
class ColumnTypeDistribution:
    """How many base columns carry each component-assignment vector."""

    counts: Mapping[tuple[int, ...], int]
    gamma: int
    m: int

    def __post_init__(self):
        clean = {}
        for a, n in self.counts.items():
            a = tuple(int(v) for v in a)
            if len(a) != self.gamma or any(v < 0 or v > self.m for v in a):
                raise ValueError(f"invalid column type {a}")
            if n < 0:
                raise ValueError(f"negative count for column type {a}")
            if n:
                clean[a] = int(n)
        object.__setattr__(self, "counts", dict(sorted(clean.items())))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_vector(self, types: list[tuple[int, ...]] | None = None) -> np.ndarray:
        types = types or all_column_types(self.gamma, self.m)
        return np.array([self.counts.get(a, 0) for a in types], dtype=np.int64)


def all_column_types(gamma: int, m: int) -> list[tuple[int, ...]]:
    """Every assignment vector in lexicographic order."""
    return list(product(range(m + 1), repeat=gamma))


def type_rows(a: Iterable[int], gamma: int) -> tuple[int, ...]:
    """Stacked-row indices covered by a column of type ``a``."""
    return tuple(y * gamma + i for i, y in enumerate(a))


@dataclass(frozen=True)
class OverlapParams:
    """Overlap counts keyed by frozensets of stacked-row indices.

    Only non-zero counts are stored; lookups of anything else return 0.
    """

    values: Mapping[frozenset, int]
    gamma: int
    m: int

    @property
    def height(self) -> int:
        return (self.m + 1) * self.gamma

    def get(self, indices: Iterable[int]) -> int:
        return t_lookup(self, indices)

    def __getitem__(self, indices) -> int:
        if isinstance(indices, int):
            indices = (indices,)
        return self.get(indices)

    def independent_vector(self) -> list[int]:
        """Values of the independent parameters in canonical order."""
        return [self.get(s) for s in independent_index_sets(self.gamma, self.m)]


def t_lookup(t, indices: Iterable[int]) -> int:
    """Overlap count for a possibly shifted index set; 0 outside the replica."""
    key = frozenset(indices)
    h = (t.m + 1) * t.gamma
    for i in key:
        if i < 0 or i >= h:
            return 0
    return t.values.get(key, 0)


def overlap_params(p: PartitionMatrix, params: CodeParams | None = None) -> OverlapParams:
    if params is not None and (p.gamma, p.kappa, p.m) != (params.gamma, params.kappa, params.m):
        raise ValueError("partition shape does not match the code parameters")
    values: dict[frozenset, int] = {}
    for a in p.column_types():
        rows = type_rows(a, p.gamma)
        for mu in range(1, len(rows) + 1):
            for s in combinations(rows, mu):
                key = frozenset(s)
                values[key] = values.get(key, 0) + 1
    return OverlapParams(values, p.gamma, p.m)


def independent_index_sets(gamma: int, m: int) -> list[tuple[int, ...]]:
    """Index sets of the independent parameters, by degree then lexicographic."""
    rows = range(m * gamma)
    out = []
    for mu in range(1, gamma + 1):
        for s in combinations(rows, mu):
            if len({i % gamma for i in s}) == mu:
                out.append(s)
    return out


def independent_param_count(gamma: int, m: int) -> int:
    if gamma < 1 or m < 0:
        raise ValueError("need gamma >= 1 and m >= 0")
    return (m + 1) ** gamma - 1


def partition_from_distribution(
    dist: ColumnTypeDistribution, params: CodeParams
) -> PartitionMatrix:
    if dist.total != params.kappa:
        raise ValueError(
            f"distribution covers {dist.total} columns but kappa = {params.kappa}"
        )
    if (dist.gamma, dist.m) != (params.gamma, params.m):
        raise ValueError("distribution and code parameters disagree on gamma or m")
    cols = []
    for a in sorted(dist.counts):
        cols.extend([a] * dist.counts[a])
    assign = np.array(cols, dtype=np.int64).T.reshape(params.gamma, params.kappa)
    return PartitionMatrix(assign, params.m)


def uncoupled_partition(params: CodeParams) -> PartitionMatrix:
    """Everything in the first component (the block code repeated L times)."""
    return PartitionMatrix(np.zeros((params.gamma, params.kappa), dtype=np.int64), params.m)


def cv_partition(zeta, params: CodeParams) -> PartitionMatrix:
    """Cutting-vector partition: row ``i`` keeps columns ``j < zeta[i]`` in H_0."""
    if params.m != 1:
        raise ValueError("cutting-vector partitioning is defined for m = 1 only")
    zeta = [int(v) for v in zeta]
    if len(zeta) != params.gamma:
        raise ValueError(f"cutting vector needs {params.gamma} entries, got {len(zeta)}")
    if zeta[0] < 0 or zeta[-1] > params.kappa:
        raise ValueError(f"cutting vector entries must lie in [0, {params.kappa}]")
    if any(b <= a for a, b in zip(zeta, zeta[1:])):
        raise ValueError(f"cutting vector must be strictly ascending, got {zeta}")
    j = np.arange(params.kappa)
    assign = np.array([(j >= c).astype(np.int64) for c in zeta])
    return PartitionMatrix(assign, 1)


def all_cutting_vectors(params: CodeParams):
    """Every strictly ascending cutting vector for the given shape."""
    return combinations(range(params.kappa + 1), params.gamma)


@dataclass(frozen=True, eq=False)
class SCProtograph:
    matrix: np.ndarray
    gamma: int
    kappa: int
    m: int
    L: int
    replica_of_column: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_sc_protograph(p: PartitionMatrix, L: int) -> SCProtograph:
    if L < 1:
        raise ValueError("coupling length must be at least 1")
    g, k, m = p.gamma, p.kappa, p.m
    stacked = p.stacked()
    mat = np.zeros((g * (L + m), k * L), dtype=np.uint8)
    for r in range(L):
        mat[r * g:(r + m + 1) * g, r * k:(r + 1) * k] = stacked
    mat.setflags(write=False)
    replica = np.repeat(np.arange(L), k)
    replica.setflags(write=False)
    return SCProtograph(mat, g, k, m, L, replica)


# Optimal balanced partition for gamma=3, kappa=7, m=1.  Its overlap vector is
# [3 3 4 0 1 2 0]; among the column arrangements of that histogram this one
# lifts (SCB powers, z=13, L=10) to 6,500 length-8 objects.
REFERENCE_PARTITION_G3K7 = PartitionMatrix(
    np.array(
        [
            [0, 0, 0, 1, 1, 1, 1],
            [1, 1, 1, 0, 0, 0, 1],
            [0, 1, 1, 0, 1, 0, 0],
        ]
    ),
    1,
)
