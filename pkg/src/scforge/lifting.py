"""Circulant lifting of SC protographs and counting of lifted length-8 objects.

The counting works on a window of ``2m+1`` consecutive replicas.  Every
canonical closed length-8 walk of the window protograph is a *candidate*.  It
lifts to 8-cycles exactly when its signed power sum vanishes mod ``z``.  The
lifted cycle is the targeted object only if neither diagonal VN pair is joined
by a further CN whose 6-cycle power condition also holds.  Candidates are
bucketed by leftmost replica and span, and the per-span counts are
extrapolated to the full coupling length.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .pattern_census.constants import pattern_of
from .protograph import CodeParams, PartitionMatrix, build_sc_protograph
from .walks import closed_walks8

DEFAULT_LIFT_GUARD = 20_000


@dataclass(frozen=True, eq=False)
class CirculantPowers:
    """Shift of every circulant of the base matrix, reduced mod ``z``."""

    f: np.ndarray
    z: int

    def __post_init__(self):
        if self.z < 1:
            raise ValueError(f"circulant size must be positive, got {self.z}")
        arr = np.array(self.f, dtype=np.int64) % self.z
        if arr.ndim != 2:
            raise ValueError("powers must form a 2-D array")
        arr.setflags(write=False)
        object.__setattr__(self, "f", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.f.shape

    @property
    def flat(self) -> np.ndarray:
        return self.f.ravel()

    def with_entries(self, changes) -> "CirculantPowers":
        """Copy with ``{(i, j): power}`` applied."""
        arr = self.f.copy()
        for (i, j), v in changes.items():
            arr[i, j] = v
        return CirculantPowers(arr, self.z)

    def to_list(self) -> list[list[int]]:
        return self.f.tolist()

    def __eq__(self, other):
        if not isinstance(other, CirculantPowers):
            return NotImplemented
        return self.z == other.z and np.array_equal(self.f, other.f)

    def __hash__(self):
        return hash((self.z, self.f.tobytes()))


def scb_powers(params: CodeParams) -> CirculantPowers:
    """Separable starting powers ``f[i, j] = i^2 * 2j mod z``."""
    i = np.arange(params.gamma)[:, None]
    j = np.arange(params.kappa)[None, :]
    return CirculantPowers((i * i) * (2 * j), params.z)


@dataclass(frozen=True, eq=False)
class Window:
    """SC protograph restricted to ``xi`` replicas, with a map from each
    window entry to the base circulant it inherits its power from."""

    matrix: np.ndarray
    gamma: int
    kappa: int
    m: int
    xi: int
    replica_of_column: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @cached_property
    def base_index(self) -> np.ndarray:
        """Flat base index ``i*kappa + j`` of every window position."""
        rows, cols = np.indices(self.matrix.shape)
        return (rows % self.gamma) * self.kappa + cols % self.kappa

    def powers_on(self, powers: CirculantPowers) -> np.ndarray:
        """Window-sized power array (meaningful only where the matrix is 1)."""
        return powers.flat[self.base_index]


def build_window(partition: PartitionMatrix, params: CodeParams | None = None,
                 xi: int | None = None) -> Window:
    """The ``(xi+m)*gamma x xi*kappa`` window.

    ``xi`` defaults to ``2m+1``, the widest span of a length-8 candidate.  A
    code with fewer replicas than that is its own window.
    """
    m = partition.m
    if xi is None:
        xi = 2 * m + 1 if params is None else min(params.window_replicas, params.L)
    sc = build_sc_protograph(partition, xi)
    return Window(np.asarray(sc.matrix), partition.gamma, partition.kappa, m, xi,
                  np.asarray(sc.replica_of_column))


@dataclass(frozen=True)
class Candidate:
    """One canonical closed walk ``(c1, v1, ..., c4, v4)`` of the window.

    ``c_x`` joins ``v_x`` and ``v_{x+1}``.  ``chords13``/``chords24`` list the
    other CNs adjacent to both VNs of a diagonal.
    """

    nodes: tuple[int, ...]
    pattern: int
    span: int
    start: int
    chords13: tuple[int, ...] = ()
    chords24: tuple[int, ...] = ()

    @property
    def cns(self) -> tuple[int, ...]:
        return self.nodes[0::2]

    @property
    def vns(self) -> tuple[int, ...]:
        return self.nodes[1::2]

    def edges(self) -> list[tuple[int, int]]:
        c, v = self.cns, self.vns
        return [(c[x], v[y]) for x in range(4) for y in (x, (x + 1) % 4)]

    def plus_edges(self):
        c, v = self.cns, self.vns
        return [(c[x], v[x]) for x in range(4)]

    def minus_edges(self):
        c, v = self.cns, self.vns
        return [(c[x], v[(x + 1) % 4]) for x in range(4)]

    def chord_edges(self, diagonal: int, cn: int):
        """(plus, minus) edge lists of the 6-cycle closed by ``cn``."""
        c1, v1, c2, v2, c3, v3, c4, v4 = self.nodes
        if diagonal == 0:
            # v1 -c1- v2 -c2- v3 -cn- v1
            return [(c1, v1), (c2, v2), (cn, v3)], [(c1, v2), (c2, v3), (cn, v1)]
        # v2 -c1- v1 -c4- v4 -cn- v2
        return [(c1, v1), (cn, v2), (c4, v4)], [(c1, v2), (cn, v4), (c4, v1)]


def _signed(window_powers, plus, minus, z) -> int:
    s = sum(int(window_powers[e]) for e in plus) - sum(int(window_powers[e]) for e in minus)
    return s % z


def lifts_to_cycle(cand: Candidate, window_powers: np.ndarray, z: int) -> bool:
    return _signed(window_powers, cand.plus_edges(), cand.minus_edges(), z) == 0


def chord_realized(cand: Candidate, diagonal: int, window_powers: np.ndarray, z: int) -> bool:
    cns = cand.chords13 if diagonal == 0 else cand.chords24
    return any(_signed(window_powers, *cand.chord_edges(diagonal, cn), z) == 0 for cn in cns)


def is_active(cand: Candidate, window_powers: np.ndarray, z: int) -> bool:
    """Lifts to 8-cycles none of which has an internal connection."""
    return (lifts_to_cycle(cand, window_powers, z)
            and not chord_realized(cand, 0, window_powers, z)
            and not chord_realized(cand, 1, window_powers, z))


_PATTERN_TABLE = np.full((5, 5), -1, dtype=np.int64)
for _c in range(5):
    for _v in range(5):
        _PATTERN_TABLE[_c, _v] = pattern_of(_c, _v) or -1


def _distinct_per_row(arr: np.ndarray) -> np.ndarray:
    s = np.sort(arr, axis=1)
    return 1 + np.count_nonzero(np.diff(s, axis=1), axis=1)


class CandidateSet:
    """All candidates of a window, held as arrays for vectorized checks.

    ``nodes`` has one row ``(c1, v1, ..., c4, v4)`` per candidate.  The
    ``*_idx`` arrays hold base circulant indices (``i*kappa + j``) so a power
    vector ``powers.flat`` can be gathered directly.  Internal connections are
    stored as one row per (candidate, diagonal, CN).
    """

    def __init__(self, window: Window, nodes: np.ndarray, chord_owner: np.ndarray,
                 chord_diag: np.ndarray, chord_cn: np.ndarray, cycles4: np.ndarray):
        self.window = window
        self.nodes = nodes = np.asarray(nodes, dtype=np.int64).reshape(-1, 8)
        self.chord_owner = np.asarray(chord_owner, dtype=np.int64)
        self.chord_diag = np.asarray(chord_diag, dtype=np.int64)
        self.chord_cn = np.asarray(chord_cn, dtype=np.int64)
        self.cycles4 = cycles4
        base = window.base_index
        c, v = nodes[:, 0::2], nodes[:, 1::2]
        v_next = np.roll(v, -1, axis=1)

        self.pattern = _PATTERN_TABLE[_distinct_per_row(c), _distinct_per_row(v)]
        if np.any(self.pattern < 0):
            raise RuntimeError("a closed walk does not match any length-8 pattern")
        reps = window.replica_of_column[v]
        self.start = reps.min(axis=1)
        self.span = reps.max(axis=1) - self.start + 1
        self.plus_idx = base[c, v]
        self.minus_idx = base[c, v_next]

        o = self.chord_owner
        cn = self.chord_cn
        c1, v1, c2, v2, c4, v4 = (nodes[o, x] for x in (0, 1, 2, 3, 6, 7))
        v3 = nodes[o, 5]
        d0 = (self.chord_diag == 0)[:, None]
        # v1 -c1- v2 -c2- v3 -cn- v1   or   v2 -c1- v1 -c4- v4 -cn- v2
        self.chord_plus = np.where(
            d0,
            np.stack([base[c1, v1], base[c2, v2], base[cn, v3]], axis=1),
            np.stack([base[c1, v1], base[cn, v2], base[c4, v4]], axis=1),
        ).reshape(-1, 3)
        self.chord_minus = np.where(
            d0,
            np.stack([base[c1, v2], base[c2, v3], base[cn, v1]], axis=1),
            np.stack([base[c1, v2], base[cn, v4], base[c4, v1]], axis=1),
        ).reshape(-1, 3)

        # distinct window positions of each candidate, padded with -1
        ncols = window.shape[1]
        pos = np.concatenate([c * ncols + v, c * ncols + v_next], axis=1)
        pos.sort(axis=1)
        dup = np.zeros_like(pos, dtype=bool)
        dup[:, 1:] = pos[:, 1:] == pos[:, :-1]
        self.entries = np.where(dup, -1, pos)

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.candidates)

    def __getitem__(self, k: int) -> Candidate:
        return self.candidates[k]

    @cached_property
    def candidates(self) -> list[Candidate]:
        chords = defaultdict(list)
        for o, d, cn in zip(self.chord_owner.tolist(), self.chord_diag.tolist(),
                            self.chord_cn.tolist()):
            chords[o, d].append(cn)
        return [
            Candidate(tuple(w), ell, k, s, tuple(chords.get((n, 0), ())), tuple(chords.get((n, 1), ())))
            for n, (w, ell, k, s) in enumerate(zip(self.nodes.tolist(), self.pattern.tolist(),
                                                    self.span.tolist(), self.start.tolist()))
        ]

    def groups(self) -> Counter:
        """Candidate counts keyed by ``(pattern, span, start)``."""
        return Counter(zip(self.pattern.tolist(), self.span.tolist(), self.start.tolist()))

    @cached_property
    def entry_base(self) -> np.ndarray:
        """Base index of each touched window position (-1 for padding)."""
        flat = self.window.base_index.ravel()
        return np.where(self.entries >= 0, flat[np.maximum(self.entries, 0)], -1)

    @cached_property
    def touching(self) -> list[np.ndarray]:
        """For every base circulant, the candidates whose status depends on it."""
        n = len(self)
        owners = np.concatenate([
            np.repeat(np.arange(n), 8),
            np.repeat(self.chord_owner, 6),
        ])
        bases = np.concatenate([
            np.concatenate([self.plus_idx, self.minus_idx], axis=1).ravel(),
            np.concatenate([self.chord_plus, self.chord_minus], axis=1).ravel(),
        ])
        n_base = self.window.gamma * self.window.kappa
        pairs = np.unique(bases * max(n, 1) + owners)
        b, o = np.divmod(pairs, max(n, 1))
        cuts = np.searchsorted(b, np.arange(n_base + 1))
        return [o[cuts[x]:cuts[x + 1]] for x in range(n_base)]

    # vectorized power conditions -------------------------------------------

    def cycle_mask(self, powers: CirculantPowers, which=None) -> np.ndarray:
        f = powers.flat
        plus, minus = self.plus_idx, self.minus_idx
        if which is not None:
            plus, minus = plus[which], minus[which]
        return (f[plus].sum(axis=1) - f[minus].sum(axis=1)) % powers.z == 0

    @cached_property
    def _chord_order(self):
        order = np.argsort(self.chord_owner, kind="stable")
        cuts = np.searchsorted(self.chord_owner[order], np.arange(len(self) + 1))
        return order, cuts

    def chord_masks(self, powers: CirculantPowers, which=None) -> tuple[np.ndarray, np.ndarray]:
        """Per candidate: is the (v1,v3) / (v2,v4) internal connection realized."""
        f = powers.flat
        n = len(self)
        if which is None:
            rows = slice(None)
        else:
            order, cuts = self._chord_order
            which = np.asarray(which, dtype=np.int64)
            rows = np.concatenate([order[cuts[k]:cuts[k + 1]] for k in which]) if len(which) else \
                np.zeros(0, dtype=np.int64)
        owner, diag = self.chord_owner[rows], self.chord_diag[rows]
        plus, minus = self.chord_plus[rows], self.chord_minus[rows]
        hit = (f[plus].sum(axis=1) - f[minus].sum(axis=1)) % powers.z == 0
        out = []
        for d in (0, 1):
            m = np.zeros(n, dtype=bool)
            m[owner[hit & (diag == d)]] = True
            out.append(m if which is None else m[which])
        return out[0], out[1]

    def active_mask(self, powers: CirculantPowers, which=None) -> np.ndarray:
        cyc = self.cycle_mask(powers, which)
        c13, c24 = self.chord_masks(powers, which)
        return cyc & ~c13 & ~c24

    def fully_chorded_mask(self, powers: CirculantPowers) -> np.ndarray:
        cyc = self.cycle_mask(powers)
        c13, c24 = self.chord_masks(powers)
        return cyc & c13 & c24

    def girth_ok(self, powers: CirculantPowers) -> bool:
        if not len(self.cycles4):
            return True
        f = powers.flat
        c = self.cycles4
        diff = f[c[:, 0]] + f[c[:, 3]] - f[c[:, 1]] - f[c[:, 2]]
        return not bool(np.any(diff % powers.z == 0))


def _window_cycles4(window: Window) -> np.ndarray:
    """Base indices ``(r1a, r1b, r2a, r2b)`` of every 4-cycle in the window."""
    mat = window.matrix
    base = window.base_index
    out = []
    for r1 in range(mat.shape[0]):
        for r2 in range(r1 + 1, mat.shape[0]):
            common = np.flatnonzero(mat[r1] & mat[r2])
            for x in range(len(common)):
                for y in range(x + 1, len(common)):
                    a, b = common[x], common[y]
                    out.append((base[r1, a], base[r1, b], base[r2, a], base[r2, b]))
    return np.array(out, dtype=np.int64).reshape(-1, 4)


def enumerate_candidates(window: Window) -> CandidateSet:
    """Every canonical length-8 candidate of the window, annotated with the
    CNs that could close an internal connection on either diagonal."""
    mat = window.matrix
    nodes = np.array(closed_walks8(mat), dtype=np.int64).reshape(-1, 8)
    cn_of = [set(np.flatnonzero(col).tolist()) for col in mat.T]
    common = {}
    owner, diag, chord = [], [], []
    for n, (c1, v1, c2, v2, c3, v3, c4, v4) in enumerate(nodes.tolist()):
        own = (c1, c2, c3, c4)
        for d, (a, b) in enumerate(((v1, v3), (v2, v4))):
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            shared = common.get(key)
            if shared is None:
                shared = common[key] = sorted(cn_of[a] & cn_of[b])
            for cn in shared:
                if cn not in own:
                    owner.append(n)
                    diag.append(d)
                    chord.append(cn)
    return CandidateSet(window, nodes, owner, diag, chord, _window_cycles4(window))


def span_weight(k: int, L: int) -> int:
    """How many placements of a span-``k`` candidate fit in ``L`` replicas."""
    return max(L - k + 1, 0)


def _count_x2(cs: CandidateSet, mask: np.ndarray, z: int, L: int) -> int:
    """Twice the extrapolated lifted count of the masked replica-0 candidates."""
    sel = mask & (cs.start == 0)
    w = np.maximum(L - cs.span[sel] + 1, 0)
    lifts_x2 = np.where(cs.pattern[sel] == 1, z, 2 * z)
    return int((w * lifts_x2).sum())


def _as_number(x2: int):
    return x2 // 2 if x2 % 2 == 0 else Fraction(x2, 2)


@dataclass
class LiftedCensus:
    """Active replica-0 candidates per (pattern, span) and the resulting F_SC."""

    active: dict[tuple[int, int], int]
    f_sc: int | Fraction
    L: int
    z: int

    def per_pattern(self) -> dict[int, int | Fraction]:
        out: dict[int, int] = defaultdict(int)
        for (ell, k), n in self.active.items():
            out[ell] += n * span_weight(k, self.L) * (self.z if ell == 1 else 2 * self.z)
        return {ell: _as_number(v) for ell, v in sorted(out.items())}


def lifted_census(cs: CandidateSet, powers: CirculantPowers, L: int) -> LiftedCensus:
    mask = cs.active_mask(powers)
    sel = mask & (cs.start == 0)
    active = Counter(zip(cs.pattern[sel].tolist(), cs.span[sel].tolist()))
    return LiftedCensus(dict(sorted(active.items())), _as_number(_count_x2(cs, mask, powers.z, L)),
                        L, powers.z)


def count_f_sc(partition: PartitionMatrix, powers: CirculantPowers, params: CodeParams,
               *, candidates: CandidateSet | None = None):
    """Number of lifted length-8 cycles without internal connections in H_SC.

    Returned as an int, or as a Fraction in the degenerate case of an active
    two-VN candidate under odd ``z`` (impossible once the girth is at least 6).
    """
    cs = candidates if candidates is not None else enumerate_candidates(build_window(partition, params))
    return _as_number(_count_x2(cs, cs.active_mask(powers), powers.z, params.L))


def girth_ok(partition: PartitionMatrix, powers: CirculantPowers, params: CodeParams | None = None,
             *, candidates: CandidateSet | None = None) -> bool:
    """True iff no 4-cycle of the protograph lifts to 4-cycles."""
    if candidates is None:
        window = build_window(partition, params)
        empty = np.zeros(0, dtype=np.int64)
        return CandidateSet(window, empty, empty, empty, empty, _window_cycles4(window)).girth_ok(powers)
    return candidates.girth_ok(powers)


def count_40_uas(partition: PartitionMatrix, powers: CirculantPowers, params: CodeParams,
                 *, candidates: CandidateSet | None = None) -> int:
    """Number of (4, 0) objects of a column-weight-3 lifted code.

    Such an object is four VNs joined pairwise by six CNs.  Each contains three
    length-8 cycles with both diagonals connected, so the count of those
    cycles is divided by three.
    """
    if params.gamma != 3:
        raise ValueError("(4, 0) objects are only counted for column weight 3")
    cs = candidates if candidates is not None else enumerate_candidates(build_window(partition, params))
    x2 = _count_x2(cs, cs.fully_chorded_mask(powers), powers.z, params.L)
    n, rem = divmod(x2, 6)
    if rem:
        raise RuntimeError("fully connected cycle count is not a multiple of three")
    return n


# -- lifted matrix -----------------------------------------------------------

@dataclass(eq=False)
class LiftedCode:
    H: sp.csr_matrix
    z: int
    gamma: int
    kappa: int
    m: int
    L: int
    params: CodeParams | None = None
    partition: PartitionMatrix | None = None
    powers: CirculantPowers | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.H.shape

    @property
    def nnz(self) -> int:
        return int(self.H.nnz)


def lift_protograph(sc_matrix, sc_powers, z: int) -> sp.csr_matrix:
    """Replace every 1 of ``sc_matrix`` by the circulant ``sigma^power``.

    Row ``r`` of ``sigma^f`` has its 1 in column ``(r + f) mod z``.
    """
    mat = np.asarray(sc_matrix)
    pw = np.asarray(sc_powers, dtype=np.int64)
    R, C = np.nonzero(mat)
    r = np.arange(z)
    rows = (R[:, None] * z + r[None, :]).ravel()
    cols = (C[:, None] * z + (r[None, :] + pw[R, C][:, None]) % z).ravel()
    data = np.ones(len(rows), dtype=np.int8)
    H = sp.csr_matrix((data, (rows, cols)), shape=(mat.shape[0] * z, mat.shape[1] * z))
    H.sort_indices()
    return H


def collapse(H, z: int) -> np.ndarray:
    """Protograph of a lifted matrix: 1 wherever a ``z x z`` block is nonzero."""
    coo = sp.coo_matrix(H)
    nr, nc = H.shape[0] // z, H.shape[1] // z
    out = np.zeros((nr, nc), dtype=np.int64)
    out[coo.row // z, coo.col // z] = 1
    return out


def assemble_parity_matrix(partition: PartitionMatrix, powers: CirculantPowers,
                           params: CodeParams) -> LiftedCode:
    sc = build_sc_protograph(partition, params.L)
    g, k = params.gamma, params.kappa
    rows, cols = np.indices(np.asarray(sc.matrix).shape)
    sc_pw = powers.f[rows % g, cols % k]
    H = lift_protograph(sc.matrix, sc_pw, params.z)
    return LiftedCode(H, params.z, g, k, params.m, params.L, params, partition, powers)


def _vn_graph(H) -> sp.csr_matrix:
    H = sp.csr_matrix(H, dtype=np.int64)
    A = (H.T @ H).tocsr()
    A.setdiag(0)
    A.eliminate_zeros()
    return A


def has_4_cycle(H) -> bool:
    A = _vn_graph(H)
    return A.nnz > 0 and A.max() > 1


def _checked_graph(code, guard):
    H = code.H if isinstance(code, LiftedCode) else sp.csr_matrix(code)
    if H.shape[1] > guard:
        raise ValueError(
            f"lifted code has {H.shape[1]} VNs, above the brute-force guard of {guard}"
        )
    A = _vn_graph(H)
    if A.nnz and A.max() > 1:
        raise ValueError("lifted code contains 4-cycles; brute-force counting requires girth >= 6")
    adj = [set(A.indices[A.indptr[a]:A.indptr[a + 1]].tolist()) for a in range(A.shape[0])]
    return A, adj


def brute_force_lifted_count(code, guard: int = DEFAULT_LIFT_GUARD) -> int:
    """Exhaustive count of 4-VN sets forming an 8-cycle with no adjacent diagonal.

    With girth at least 6 two VNs share at most one CN, so such a set is an
    induced 4-cycle of the VN adjacency graph.  Each is found twice, once per
    diagonal.
    """
    A, adj = _checked_graph(code, guard)
    A2 = (A @ A).tocsr()
    total = 0
    for a in range(A.shape[0]):
        lo, hi = A2.indptr[a], A2.indptr[a + 1]
        for c, cnt in zip(A2.indices[lo:hi].tolist(), A2.data[lo:hi].tolist()):
            if c <= a or cnt < 2 or c in adj[a]:
                continue
            common = sorted(adj[a] & adj[c])
            for x in range(len(common)):
                nb = adj[common[x]]
                total += sum(1 for y in common[x + 1:] if y not in nb)
    return total // 2


def brute_force_40_count(code, guard: int = DEFAULT_LIFT_GUARD) -> int:
    """Exhaustive count of four VNs joined pairwise by six distinct CNs."""
    H = code.H if isinstance(code, LiftedCode) else sp.csr_matrix(code)
    A, adj = _checked_graph(code, guard)
    Hc = sp.csc_matrix(H)
    cns = [set(Hc.indices[Hc.indptr[v]:Hc.indptr[v + 1]].tolist()) for v in range(H.shape[1])]

    def shared(a, b):
        # girth >= 6 leaves exactly one common CN per adjacent pair
        return next(iter(cns[a] & cns[b]))

    total = 0
    for a in range(A.shape[0]):
        up = sorted(b for b in adj[a] if b > a)
        for x, b in enumerate(up):
            for y, c in enumerate(up[x + 1:], start=x + 1):
                if c not in adj[b]:
                    continue
                for d in up[y + 1:]:
                    if d in adj[b] and d in adj[c]:
                        quad = (a, b, c, d)
                        links = {shared(p, q) for i, p in enumerate(quad) for q in quad[i + 1:]}
                        total += len(links) == 6
    return total
