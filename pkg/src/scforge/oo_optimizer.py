"""Search for the partition that minimizes the weighted pattern count.

Partitions are represented by their column-type distribution: the objective
only depends on how many base columns carry each component-assignment
vector.  Candidate distributions are scored in batches; the overlap counts of
a batch are a linear function of the type counts, so every closed-form span
sum runs once per batch on numpy arrays.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .pattern_census import PATTERNS, patterns_for, span_count_x2
from .protograph import (
    CodeParams,
    ColumnTypeDistribution,
    OverlapParams,
    PartitionMatrix,
    all_column_types,
    independent_index_sets,
    overlap_params,
    partition_from_distribution,
    type_rows,
)

log = logging.getLogger(__name__)

DEFAULT_GUARD = 10**7
_CHUNK = 20_000


@dataclass
class OOSolution:
    distribution: ColumnTypeDistribution
    partition: PartitionMatrix
    overlaps: OverlapParams
    f_star: Fraction
    strategy: str
    visited: int
    restarts: int = 0
    co_optimal: int | None = None
    trace: list = field(default_factory=list, repr=False)

    @property
    def t_star(self) -> list[int]:
        """Independent overlap parameters, in canonical index-set order."""
        return self.overlaps.independent_vector()

    @property
    def f_star_rounded(self) -> int:
        return int((self.f_star * 2 + 1) // 2)


class BatchObjective:
    """Evaluates F_sum for many column-type distributions at once."""

    def __init__(self, gamma: int, m: int, L: int):
        self.gamma, self.m, self.L = gamma, m, L
        self.types = all_column_types(gamma, m)
        h = (m + 1) * gamma
        self.height = h
        # every stacked-row set with distinct residues that some type covers
        sets = []
        for a in self.types:
            rows = type_rows(a, gamma)
            for r in range(1, gamma + 1):
                sets.extend(frozenset(s) for s in combinations(rows, r))
        self.sets = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
        self.set_index = {s: i for i, s in enumerate(self.sets)}
        cover = np.zeros((len(self.sets), len(self.types)), dtype=np.int64)
        for j, a in enumerate(self.types):
            rows = set(type_rows(a, gamma))
            for i, s in enumerate(self.sets):
                if s <= rows:
                    cover[i, j] = 1
        self.cover = cover
        comp = np.zeros((m + 1, len(self.types)), dtype=np.int64)
        for j, a in enumerate(self.types):
            for y in a:
                comp[y, j] += 1
        self.component_load = comp

    @property
    def n_types(self) -> int:
        return len(self.types)

    def balanced_mask(self, counts: np.ndarray, kappa: int) -> np.ndarray:
        lo, hi = balance_bounds(self.gamma, kappa, self.m)
        loads = counts @ self.component_load.T
        return np.all((loads >= lo) & (loads <= hi), axis=1)

    def fsum_x4(self, counts: np.ndarray) -> np.ndarray:
        """Four times F_sum for each row of ``counts`` (integer array)."""
        counts = np.atleast_2d(np.asarray(counts, dtype=np.int64))
        out = np.zeros(counts.shape[0], dtype=np.int64)
        for start in range(0, counts.shape[0], _CHUNK):
            out[start:start + _CHUNK] = self._fsum_x4_chunk(counts[start:start + _CHUNK])
        return out

    def _fsum_x4_chunk(self, counts):
        tv = counts @ self.cover.T
        cols = {s: tv[:, i] for i, s in enumerate(self.sets)}
        h = self.height
        cache = {}

        def T(*idx):
            try:
                return cache[idx]
            except KeyError:
                pass
            v = 0
            if all(0 <= i < h for i in idx):
                col = cols.get(frozenset(idx))
                if col is not None and col.any():
                    v = col
            cache[idx] = v
            return v

        total = np.zeros(counts.shape[0], dtype=np.int64)
        for ell in patterns_for(self.gamma):
            pat = PATTERNS[ell]
            w2 = int(pat.beta * 2)  # 2*beta is integral for every pattern
            for k in range(1, pat.max_span(self.m) + 1):
                weight = self.L - k + 1
                if weight <= 0:
                    continue
                x2 = span_count_x2(T, self.gamma, self.m, ell, k)
                if isinstance(x2, np.ndarray) or x2:
                    total = total + w2 * weight * x2
        return total

    def fsum(self, counts) -> Fraction:
        return Fraction(int(self.fsum_x4(np.asarray(counts))[0]), 4)

    def distribution(self, vec, kappa: int) -> ColumnTypeDistribution:
        return ColumnTypeDistribution(
            {a: int(n) for a, n in zip(self.types, vec) if n}, self.gamma, self.m
        )


def balance_bounds(gamma: int, kappa: int, m: int) -> tuple[int, int]:
    n = gamma * kappa
    return n // (m + 1), -(-n // (m + 1))


def check_constraints(t: OverlapParams, params: CodeParams) -> bool:
    """True iff ``t`` comes from a real partition and the partition is balanced."""
    if (t.gamma, t.m) != (params.gamma, params.m):
        return False
    g, m = params.gamma, params.m
    # a column covers its full row set iff it has exactly that type
    counts = {a: t.get(type_rows(a, g)) for a in all_column_types(g, m)}
    if any(n < 0 for n in counts.values()) or sum(counts.values()) != params.kappa:
        return False
    dist = ColumnTypeDistribution(counts, g, m)
    rebuilt = overlap_params(partition_from_distribution(dist, params))
    if {k: v for k, v in rebuilt.values.items() if v} != {k: v for k, v in t.values.items() if v}:
        return False
    lo, hi = balance_bounds(g, params.kappa, m)
    for y in range(m + 1):
        load = sum(t.get((y * g + i,)) for i in range(g))
        if not lo <= load <= hi:
            return False
    return True


def search_space_size(params: CodeParams) -> int:
    n = (params.m + 1) ** params.gamma
    return comb(params.kappa + n - 1, n - 1)


def _compositions(total: int, parts: int):
    """All non-negative integer vectors of length ``parts`` summing to ``total``,
    in lexicographically decreasing order of the leading entries."""
    for bars in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        vec = []
        for b in bars:
            vec.append(b - prev - 1)
            prev = b
        vec.append(total + parts - 2 - prev)
        yield vec


def _solution(obj: BatchObjective, vec, params, strategy, visited, **kw) -> OOSolution:
    dist = obj.distribution(vec, params.kappa)
    part = partition_from_distribution(dist, params)
    return OOSolution(
        distribution=dist,
        partition=part,
        overlaps=overlap_params(part),
        f_star=obj.fsum(vec),
        strategy=strategy,
        visited=visited,
        **kw,
    )


def solve_exhaustive(params: CodeParams, *, guard: int = DEFAULT_GUARD,
                     batch: int = 200_000) -> OOSolution:
    """Global minimum of F_sum over balanced distributions.

    Among minimizers the lexicographically least count vector (types in
    lexicographic order) is returned.
    """
    size = search_space_size(params)
    if size > guard:
        raise ValueError(
            f"search space of {size} distributions exceeds the guard of {guard}; "
            "use solve_local instead"
        )
    obj = BatchObjective(params.gamma, params.m, params.L)
    best_val, best_vec, n_best, visited = None, None, 0, 0
    gen = _compositions(params.kappa, obj.n_types)
    while True:
        block = np.array(list(_take(gen, batch)), dtype=np.int64)
        if block.size == 0:
            break
        block = block[obj.balanced_mask(block, params.kappa)]
        if not len(block):
            continue
        visited += len(block)
        vals = obj.fsum_x4(block)
        lo = vals.min()
        winners = block[vals == lo]
        first = min(map(tuple, winners.tolist()))
        if best_val is None or lo < best_val:
            best_val, best_vec, n_best = lo, first, len(winners)
        elif lo == best_val:
            best_vec = min(best_vec, first)
            n_best += len(winners)
    if best_vec is None:
        raise ValueError("no balanced distribution exists for these parameters")
    return _solution(obj, best_vec, params, "exhaustive", visited, co_optimal=n_best)


def _take(gen, n):
    for _ in range(n):
        try:
            yield next(gen)
        except StopIteration:
            return


def random_balanced_distribution(params: CodeParams, rng: random.Random) -> list[int]:
    g, k, m = params.gamma, params.kappa, params.m
    lo, hi = balance_bounds(g, k, m)
    loads = [lo] * (m + 1)
    for y in rng.sample(range(m + 1), g * k - lo * (m + 1)):
        loads[y] += 1
    entries = [y for y in range(m + 1) for _ in range(loads[y])]
    rng.shuffle(entries)
    assign = np.array(entries).reshape(g, k)
    index = {a: i for i, a in enumerate(all_column_types(g, m))}
    vec = [0] * len(index)
    for col in assign.T:
        vec[index[tuple(int(v) for v in col)]] += 1
    return vec


def solve_local(params: CodeParams, *, seed: int = 0, restarts: int = 8,
                budget: int | None = None) -> OOSolution:
    """Seeded steepest descent on the distribution simplex with restarts.

    A move shifts one column from one type to another.  ``budget`` caps the
    total number of accepted moves over all restarts; with ``budget=0`` the
    first seeded initial distribution is returned as is.
    """
    rng = random.Random(seed)
    obj = BatchObjective(params.gamma, params.m, params.L)
    n = obj.n_types
    moves = [(a, b) for a in range(n) for b in range(n) if a != b]
    move_delta = np.zeros((len(moves), n), dtype=np.int64)
    for r, (a, b) in enumerate(moves):
        move_delta[r, a] -= 1
        move_delta[r, b] += 1

    best_vec, best_val = None, None
    visited, used, trace = 0, 0, []
    for restart in range(max(restarts, 1)):
        cur = np.array(random_balanced_distribution(params, rng), dtype=np.int64)
        cur_val = int(obj.fsum_x4(cur)[0])
        visited += 1
        trace.append((restart, 0, Fraction(cur_val, 4)))
        while budget is None or used < budget:
            nb = cur + move_delta
            ok = np.all(nb >= 0, axis=1) & obj.balanced_mask(nb, params.kappa)
            if not ok.any():
                break
            cand = nb[ok]
            vals = obj.fsum_x4(cand)
            visited += len(cand)
            i = int(np.argmin(vals))
            if vals[i] >= cur_val:
                break
            cur, cur_val = cand[i], int(vals[i])
            used += 1
            trace.append((restart, used, Fraction(cur_val, 4)))
        key = (cur_val, tuple(cur.tolist()))
        if best_val is None or key < (best_val, tuple(best_vec)):
            best_vec, best_val = cur.tolist(), cur_val
        log.debug("restart %d ended at F_sum=%s", restart, Fraction(cur_val, 4))
        if budget is not None and used >= budget:
            break
    return _solution(obj, best_vec, params, "local-search", visited,
                     restarts=restart + 1, trace=trace)


def solve(params: CodeParams, *, guard: int = DEFAULT_GUARD, seed: int = 0,
          restarts: int = 8, budget: int | None = None) -> OOSolution:
    """Exhaustive search when the space is small enough, local search otherwise."""
    if search_space_size(params) <= guard:
        return solve_exhaustive(params, guard=guard)
    return solve_local(params, seed=seed, restarts=restarts, budget=budget)


def independent_labels(gamma: int, m: int) -> list[str]:
    """Readable names of the independent parameters, e.g. ``t{0,1}``."""
    return ["t{" + ",".join(map(str, s)) + "}" for s in independent_index_sets(gamma, m)]
