"""Brute-force pattern census by exhaustive walk enumeration.

Every canonical closed length-8 walk is classified by the number of distinct
CNs and VNs it touches.  An *instance* is the edge set a walk traverses; the
number of canonical walks sharing one edge set is the candidate multiplicity,
which should equal ``zeta`` for the pattern.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..protograph import SCProtograph
from ..walks import closed_walks8
from .constants import PATTERNS, pattern_of

DEFAULT_MAX_EDGES = 20_000


@dataclass
class OracleCensus:
    walks: dict[int, int]
    instances: dict[int, int]
    # (ell, leftmost VN replica, span in replicas) -> instances
    by_start_span: dict[tuple[int, int, int], int]
    multiplicities: dict[int, Counter] = field(repr=False)
    unclassified: int = 0

    @property
    def weighted_total(self) -> Fraction:
        return sum((PATTERNS[ell].beta * n for ell, n in self.instances.items()), Fraction(0))

    def span_count(self, ell: int, k: int, start: int = 0) -> int:
        return self.by_start_span.get((ell, start, k), 0)

    def multiplicity_ok(self) -> bool:
        return all(set(c) <= {PATTERNS[ell].zeta} for ell, c in self.multiplicities.items())


def _edge_set(w) -> frozenset:
    c, v = w[0::2], w[1::2]
    edges = set()
    for x in range(4):
        edges.add((c[x], v[x]))
        edges.add((c[x], v[(x + 1) % 4]))
    return frozenset(edges)


def brute_force_candidate_census(sc, *, kappa: int | None = None,
                                 max_edges: int = DEFAULT_MAX_EDGES) -> OracleCensus:
    """Count pattern instances of a binary protograph by walk enumeration.

    ``sc`` is an :class:`SCProtograph` or a plain 0/1 matrix.  For a plain
    matrix, pass ``kappa`` to bucket instances by replica (columns are then
    grouped in blocks of ``kappa``).
    """
    if isinstance(sc, SCProtograph):
        mat = np.asarray(sc.matrix)
        replica = np.asarray(sc.replica_of_column)
    else:
        mat = np.asarray(sc)
        if mat.ndim != 2:
            raise ValueError("protograph must be a 2-D matrix")
        replica = (np.arange(mat.shape[1]) // kappa) if kappa else np.zeros(mat.shape[1], int)
    n_edges = int(np.count_nonzero(mat))
    if n_edges > max_edges:
        raise ValueError(
            f"protograph has {n_edges} edges, above the enumeration guard of {max_edges}"
        )
    per_instance: dict[int, Counter] = defaultdict(Counter)
    walks: Counter = Counter()
    unclassified = 0
    for w in closed_walks8(mat):
        ell = pattern_of(len(set(w[0::2])), len(set(w[1::2])))
        if ell is None:
            unclassified += 1
            continue
        walks[ell] += 1
        per_instance[ell][_edge_set(w)] += 1

    instances = {ell: len(inst) for ell, inst in per_instance.items()}
    buckets: Counter = Counter()
    for ell, inst in per_instance.items():
        for edges in inst:
            reps = [int(replica[v]) for _, v in edges]
            lo = min(reps)
            buckets[(ell, lo, max(reps) - lo + 1)] += 1
    mult = {ell: Counter(inst.values()) for ell, inst in per_instance.items()}
    return OracleCensus(dict(walks), instances, dict(buckets), mult, unclassified)
