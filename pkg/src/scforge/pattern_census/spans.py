"""Closed-form counts of pattern instances per span and in the whole SC protograph.

A *span* ``k`` groups the instances whose VNs touch ``k`` consecutive
replicas, counted once for a fixed leftmost replica.  All sums are carried
out over stacked-row indices; a lookup with any index outside the replica
block is 0, so shifted ranges that run off the block contribute nothing.

Internally every span sum is accumulated doubled so that the terms carrying
a factor 1/2 stay integral.  The lookup callable ``T(*rows)`` may return ints
or integer numpy arrays (one entry per candidate partition); a structurally
absent index set must come back as the int ``0`` so that terms can be skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Mapping

import numpy as np

from ..protograph import OverlapParams, t_lookup
from . import cases as cs
from .constants import PATTERNS, patterns_for

Lookup = Callable[..., object]


def _nz(*xs) -> bool:
    for x in xs:
        if type(x) is int and x == 0:
            return False
    return True


def _distinct_res(g: int, *idx: int) -> bool:
    return len({i % g for i in idx}) == len(idx)


class _Acc:
    __slots__ = ("x2", "by_case")

    def __init__(self, track: bool = False):
        self.x2 = 0
        self.by_case = {} if track else None

    def add(self, case: str, v, half: bool = False):
        v2 = v if half else 2 * v
        self.x2 = self.x2 + v2
        if self.by_case is not None:
            self.by_case[case] = self.by_case.get(case, 0) + v2


def _rng(g, lo, hi):
    return range(lo * g, hi * g)


def _pairs(g, lo, hi):
    return combinations(_rng(g, lo, hi), 2)


def _shift(d, *idx):
    return tuple(i + d for i in idx)


# ---------------------------------------------------------------- P1 .. P5


def _span_p1(T, g, m, k, acc):
    if k == 1:
        for i1, i2 in _pairs(g, 0, m + 1):
            if _distinct_res(g, i1, i2):
                acc.add("A", cs.p1_a(T(i1, i2)))
        return
    d = (1 - k) * g
    for i1, i2 in _pairs(g, k - 1, m + 1):
        if _distinct_res(g, i1, i2):
            t, s = T(i1, i2), T(i1 + d, i2 + d)
            if _nz(t, s):
                acc.add("B", cs.p1_b(t, s))


def _pair_terms(T, g, m, k, acc, fn, lo, hi, *offsets):
    """Sum ``fn(t, t_shift1, ...)`` over residue-distinct pairs in rows [lo, hi)."""
    for i1, i2 in _pairs(g, lo, hi):
        if not _distinct_res(g, i1, i2):
            continue
        args = [T(i1, i2)] + [T(i1 + o * g, i2 + o * g) for o in offsets]
        if _nz(*args):
            acc.add(fn.__name__[3:].upper(), fn(*args))


def _span_p2(T, g, m, k, acc):
    if k == 1:
        for i1, i2 in _pairs(g, 0, m + 1):
            if _distinct_res(g, i1, i2):
                acc.add("A", cs.p2_a(T(i1, i2)))
        return
    _pair_terms(T, g, m, k, acc, cs.p2_b, k - 1, m + 1, 1 - k)
    _pair_terms(T, g, m, k, acc, cs.p2_b, 0, m - k + 2, k - 1)
    for h in range(2, k):
        _pair_terms(T, g, m, k, acc, cs.p2_c, k - 1, m + 1, 1 - h, 1 - k)


def _span_p3(T, g, m, k, acc):
    if k == 1:
        for idx in combinations(_rng(g, 0, m + 1), 3):
            if _distinct_res(g, *idx):
                acc.add("A", cs.p3_a(T(*idx)))
        return
    d = (1 - k) * g
    for idx in combinations(_rng(g, k - 1, m + 1), 3):
        if _distinct_res(g, *idx):
            t, s = T(*idx), T(*_shift(d, *idx))
            if _nz(t, s):
                acc.add("B", cs.p3_b(t, s))


def _span_p4(T, g, m, k, acc):
    if k == 1:
        for i1, i2 in _pairs(g, 0, m + 1):
            if _distinct_res(g, i1, i2):
                acc.add("A", cs.p4_a(T(i1, i2)))
        return
    _pair_terms(T, g, m, k, acc, cs.p4_b, k - 1, m + 1, 1 - k)
    _pair_terms(T, g, m, k, acc, cs.p4_b, 0, m - k + 2, k - 1)
    _pair_terms(T, g, m, k, acc, cs.p4_c, k - 1, m + 1, 1 - k)
    for h in range(2, k):
        _pair_terms(T, g, m, k, acc, cs.p4_d, k - 1, m + 1, 1 - h, 1 - k)
        _pair_terms(T, g, m, k, acc, cs.p4_d, k - h, m - h + 2, h - 1, h - k)
        _pair_terms(T, g, m, k, acc, cs.p4_d, 0, m - k + 2, k - 1, k - h)
    for h in range(2, k - 1):
        for w in range(h + 1, k):
            _pair_terms(T, g, m, k, acc, cs.p4_e, k - 1, m + 1, 1 - h, 1 - w, 1 - k)


def _span_p5(T, g, m, k, acc):
    if k == 1:
        for idx in combinations(_rng(g, 0, m + 1), 4):
            if _distinct_res(g, *idx):
                acc.add("A", cs.p5_a(T(*idx)))
        return
    d = (1 - k) * g
    for idx in combinations(_rng(g, k - 1, m + 1), 4):
        if _distinct_res(g, *idx):
            t, s = T(*idx), T(*_shift(d, *idx))
            if _nz(t, s):
                acc.add("B", cs.p5_b(t, s))


# ---------------------------------------------------------------------- P6


def _hub_triples(g, r1, r23):
    """i1 over range r1, unordered {i2, i3} over range r23."""
    for i1 in r1:
        for i2, i3 in combinations(r23, 2):
            yield i1, i2, i3


def _span_p6(T, g, m, k, acc):
    ok = lambda *idx: _distinct_res(g, *idx)
    if k == 1:
        r = _rng(g, 0, m + 1)
        for i1, i2, i3 in _hub_triples(g, r, r):
            if ok(i1, i2, i3):
                t12 = T(i1, i2)
                if _nz(t12):
                    acc.add("A", cs.p6_a(t12, T(i1, i3), T(i1, i2, i3)))
        return
    full = _rng(g, 0, m + 1)
    # B: both degree-2 overlaps here, degree-3 overlap k-1 replicas away
    for lo, hi, o in ((k - 1, m + 1, 1 - k), (0, m - k + 2, k - 1)):
        r = _rng(g, lo, hi)
        for i1, i2, i3 in _hub_triples(g, r, r):
            if not ok(i1, i2, i3):
                continue
            t12, s = T(i1, i2), T(*_shift(o * g, i1, i2, i3))
            if _nz(t12, s):
                acc.add("B", cs.p6_b(t12, T(i1, i3), T(i1, i2, i3), s))
    # C: c1-c3 overlap k-1 replicas away
    for lo, hi, o in ((k - 1, m + 1, 1 - k), (0, m - k + 2, k - 1)):
        r = _rng(g, lo, hi)
        for i1, i2, i3 in product(r, full, r):
            if not ok(i1, i2, i3):
                continue
            t12, s = T(i1, i2), T(i1 + o * g, i3 + o * g)
            if _nz(t12, s):
                acc.add("C", cs.p6_c(t12, T(i1, i2, i3), s))
    # D: three replicas
    for h in range(2, k):
        terms = (
            (_rng(g, k - 1, m + 1), _rng(g, k - 1, m + 1), _rng(g, k - 1, m + h), 1 - h, 1 - k),
            (_rng(g, k - 1, m + 1), range(h - 1, (m + 1) * g), _rng(g, k - 1, m + h), 1 - k, 1 - h),
            (_rng(g, k - h, m - h + 2), _rng(g, 0, m - h + 2), _rng(g, k - h, m - h + 2), h - k, h - 1),
        )
        for r1, r2, r3, o13, o123 in terms:
            for i1, i2, i3 in product(r1, r2, r3):
                if not ok(i1, i2, i3):
                    continue
                t12 = T(i1, i2)
                s13 = T(i1 + o13 * g, i3 + o13 * g)
                u = T(*_shift(o123 * g, i1, i2, i3))
                if _nz(t12, s13, u):
                    acc.add("D", cs.p6_d(t12, s13, u))


# ---------------------------------------------------------------------- P7


def _span_p7(T, g, m, k, acc):
    def ok(i1, i2, i3):
        return (i1 - i2) % g and (i1 - i3) % g and i2 != i3

    full = _rng(g, 0, m + 1)
    if k == 1:
        for i1, i2, i3 in _hub_triples(g, full, full):
            if ok(i1, i2, i3):
                t12 = T(i1, i2)
                if _nz(t12):
                    acc.add("A", cs.p7_a(t12, T(i1, i3), T(i1, i2, i3)))
        return

    def base(i1, i2, i3):
        return T(i1, i2), T(i1, i3), T(i1, i2, i3)

    for lo, hi, o in ((k - 1, m + 1, 1 - k), (0, m - k + 2, k - 1)):
        r = _rng(g, lo, hi)
        for i1, i2, i3 in product(r, full, r):
            if not ok(i1, i2, i3):
                continue
            s = T(i1 + o * g, i3 + o * g)
            if _nz(T(i1, i2), s):
                acc.add("B", cs.p7_b(*base(i1, i2, i3), s))
    d = (1 - k) * g
    for i1, i2, i3 in product(_rng(g, k - 1, m + 1), full, _rng(g, k - 1, m + k)):
        if ok(i1, i2, i3):
            t12, s = T(i1, i2), T(i1 + d, i3 + d)
            if _nz(t12, s):
                acc.add("C", cs.p7_c(t12, s))
    r = _rng(g, k - 1, m + 1)
    for i1, i2, i3 in _hub_triples(g, r, r):
        if ok(i1, i2, i3):
            t12 = T(i1, i2)
            s12, s13, s123 = T(i1 + d, i2 + d), T(i1 + d, i3 + d), T(i1 + d, i2 + d, i3 + d)
            if _nz(t12, s13):
                acc.add("D", cs.p7_d(*base(i1, i2, i3), s12, s13, s123))
    for h in range(2, k):
        # E: both c1-c2 overlaps here, c1-c3 overlaps in two other replicas
        e_terms = (
            (_rng(g, k - 1, m + 1), _rng(g, k - 1, m + h), 1 - h, 1 - k),
            (_rng(g, k - h, m - h + 2), _rng(g, k - h, m - h + 2), h - 1, h - k),
            (_rng(g, 0, m - k + 2), _rng(g, h - k, m - k + 2), k - 1, k - h),
        )
        for r1, r3, oa, ob in e_terms:
            for i1, i2, i3 in product(r1, full, r3):
                if not ok(i1, i2, i3):
                    continue
                t12 = T(i1, i2)
                s, u = T(i1 + oa * g, i3 + oa * g), T(i1 + ob * g, i3 + ob * g)
                if _nz(t12, s, u):
                    acc.add("E", cs.p7_e(t12, s, u))
        # G: one overlap of each family here, one c1-c2 and one c1-c3 elsewhere
        g_terms = (
            (_rng(g, k - 1, m + 1), _rng(g, h - 1, m + 1), _rng(g, k - 1, m + 1), 1 - h, 1 - k),
            (_rng(g, k - h, m - h + 2), _rng(g, 0, m - h + 2), _rng(g, k - h, m + 1), h - 1, h - k),
            (_rng(g, 0, m - k + 2), _rng(g, 0, m - k + 2), _rng(g, 0, m - k + h + 1), k - 1, k - h),
        )
        for r1, r2, r3, oa, ob in g_terms:
            for i1, i2, i3 in product(r1, r2, r3):
                if not ok(i1, i2, i3):
                    continue
                s, u = T(i1 + oa * g, i2 + oa * g), T(i1 + ob * g, i3 + ob * g)
                if _nz(T(i1, i2), s, u):
                    acc.add("G", cs.p7_g(*base(i1, i2, i3), s, u))
    for h in range(2, k - 1):
        for w in range(h + 1, k):
            i_terms = (
                (_rng(g, h - 1, m + 1), _rng(g, k - 1, m + w), (1 - h, 0), (1 - w, 1), (1 - k, 1)),
                (_rng(g, w - 1, m + 1), _rng(g, k - 1, m + h), (1 - w, 0), (1 - h, 1), (1 - k, 1)),
                (_rng(g, k - 1, m + 1), _rng(g, w - 1, m + h), (1 - k, 0), (1 - h, 1), (1 - w, 1)),
            )
            for r2, r3, *shifts in i_terms:
                for i1, i2, i3 in product(_rng(g, k - 1, m + 1), r2, r3):
                    if not ok(i1, i2, i3):
                        continue
                    args = [T(i1, i2)]
                    for o, which in shifts:
                        j = i3 if which else i2
                        args.append(T(i1 + o * g, j + o * g))
                    if _nz(*args):
                        acc.add("I", cs.p7_i(*args))


# ---------------------------------------------------------------------- P8


def _span_p8(T, g, m, k, acc):
    def ok(a, b):
        return _distinct_res(g, *a, *b)

    full = _rng(g, 0, m + 1)
    if k == 1:
        for a in combinations(full, 2):
            for b in combinations(full, 2):
                if ok(a, b):
                    t12 = T(*a)
                    if _nz(t12):
                        acc.add("A", cs.p8_a(t12, T(*b), T(*a, *b)), half=True)
        return
    for lo, hi, o in ((k - 1, m + 1, 1 - k), (0, m - k + 2, k - 1)):
        r = _rng(g, lo, hi)
        for a in combinations(r, 2):
            for b in combinations(r, 2):
                if not ok(a, b):
                    continue
                t12, s = T(*a), T(*_shift(o * g, *a, *b))
                if _nz(t12, s):
                    acc.add("B", cs.p8_b(t12, T(*b), T(*a, *b), s), half=True)
    for lo, hi, o in ((k - 1, m + 1, 1 - k), (0, m - k + 2, k - 1)):
        for a in combinations(full, 2):
            for b in combinations(_rng(g, lo, hi), 2):
                if not ok(a, b):
                    continue
                t12, s = T(*a), T(*_shift(o * g, *b))
                if _nz(t12, s):
                    acc.add("C", cs.p8_c(t12, T(*a, *b), s))
    for h in range(2, k):
        d_terms = (
            (_rng(g, k - 1, m + 1), _rng(g, k - 1, m + h), 1 - h, 1 - k),
            (_rng(g, h - 1, m + 1), _rng(g, k - 1, m + h), 1 - k, 1 - h),
            (_rng(g, 0, m - h + 2), _rng(g, k - h, m - h + 2), h - k, h - 1),
        )
        for ra, rb, o34, o1234 in d_terms:
            for a in combinations(ra, 2):
                for b in combinations(rb, 2):
                    if not ok(a, b):
                        continue
                    t12 = T(*a)
                    s = T(*_shift(o34 * g, *b))
                    u = T(*_shift(o1234 * g, *a, *b))
                    if _nz(t12, s, u):
                        acc.add("D", cs.p8_d(t12, s, u))


# ---------------------------------------------------------------------- P9


def _span_p9(T, g, m, k, acc):
    def ok(i1, i2, i3, i4):
        return ((i1 - i2) % g and i1 != i3 and (i1 - i4) % g
                and (i2 - i3) % g and i2 != i4 and (i3 - i4) % g)

    full = _rng(g, 0, m + 1)
    if k == 1:
        for i1, i3 in combinations(full, 2):
            for i2, i4 in combinations(full, 2):
                if not ok(i1, i2, i3, i4):
                    continue
                t12 = T(i1, i2)
                if not _nz(t12):
                    continue
                acc.add("A", cs.p9_a(
                    t12, T(i2, i3), T(i3, i4), T(i1, i4),
                    T(i1, i2, i3), T(i1, i2, i4), T(i1, i3, i4), T(i2, i3, i4),
                    T(i1, i2, i3, i4)), half=True)
        return

    def sh(o, *idx):
        return T(*_shift(o * g, *idx))

    # B: c1-c4 overlap k-1 replicas away
    for lo, hi, o in ((k - 1, m + 1, 1 - k), (0, m - k + 2, k - 1)):
        for i1, i4 in _pairs(g, lo, hi):
            for i2, i3 in product(full, full):
                if not ok(i1, i2, i3, i4):
                    continue
                t12, s = T(i1, i2), sh(o, i1, i4)
                if _nz(t12, s):
                    acc.add("B", cs.p9_b(t12, T(i2, i3), T(i3, i4), T(i1, i2, i3),
                                    T(i2, i3, i4), T(i1, i2, i3, i4), s))
    d = 1 - k
    # C: c3-c4 and c1-c4 overlaps k-1 replicas away
    for i1, i3 in _pairs(g, k - 1, m + 1):
        for i2, i4 in product(full, _rng(g, k - 1, m + k)):
            if not ok(i1, i2, i3, i4):
                continue
            t12, s14 = T(i1, i2), sh(d, i1, i4)
            if _nz(t12, s14):
                acc.add("C", cs.p9_c(t12, T(i2, i3), T(i1, i2, i3),
                                sh(d, i3, i4), s14, sh(d, i1, i3, i4)))
    # D: c2-c3 and c1-c4 overlaps k-1 replicas away
    r = _rng(g, k - 1, m + 1)
    for i1, i4 in _pairs(g, k - 1, m + 1):
        for i2, i3 in product(r, r):
            if not ok(i1, i2, i3, i4):
                continue
            t12, s14 = T(i1, i2), sh(d, i1, i4)
            if _nz(t12, s14):
                acc.add("D", cs.p9_d(t12, T(i3, i4), T(i1, i2, i3, i4),
                                sh(d, i2, i3), s14, sh(d, i1, i2, i3, i4)), half=True)
    for h in range(2, k):
        e_terms = (
            (_rng(g, k - 1, m + 1), _rng(g, h - 1, m + 1), _rng(g, k - 1, m + h), 1 - h, 1 - k),
            (_rng(g, k - h, m + 1), _rng(g, 0, m - h + 2), _rng(g, k - h, m - h + 2), h - 1, h - k),
            (_rng(g, 0, m - k + h + 1), _rng(g, 0, m - k + 2), _rng(g, h - k, m - k + 2), k - 1, k - h),
        )
        for r1, r3, r4, o34, o14 in e_terms:
            for i1, i2, i3, i4 in product(r1, full, r3, r4):
                if not ok(i1, i2, i3, i4):
                    continue
                t12, s, u = T(i1, i2), sh(o34, i3, i4), sh(o14, i1, i4)
                if _nz(t12, s, u):
                    acc.add("E", cs.p9_e(t12, T(i2, i3), T(i1, i2, i3), s, u))
        g_terms = (
            (k - 1, m + 1, _rng(g, h - 1, m + 1), 1 - h, 1 - k),
            (k - h, m + 1, _rng(g, 0, m - h + 2), h - 1, h - k),
            (0, m - k + h + 1, _rng(g, 0, m - k + 2), k - 1, k - h),
        )
        for lo, hi, r23, o23, o14 in g_terms:
            for i1, i4 in _pairs(g, lo, hi):
                for i2, i3 in product(r23, r23):
                    if not ok(i1, i2, i3, i4):
                        continue
                    t12, s, u = T(i1, i2), sh(o23, i2, i3), sh(o14, i1, i4)
                    if _nz(t12, s, u):
                        acc.add("G", cs.p9_g(t12, T(i3, i4), T(i1, i2, i3, i4), s, u))
    for h in range(2, k - 1):
        for w in range(h + 1, k):
            i_terms = (
                (_rng(g, k - 1, m + 1), _rng(g, h - 1, m + 1), _rng(g, w - 1, m + h),
                 _rng(g, k - 1, m + w), 1 - h, 1 - w, 1 - k),
                (_rng(g, k - 1, m + 1), _rng(g, w - 1, m + 1), _rng(g, w - 1, m + h),
                 _rng(g, k - 1, m + h), 1 - w, 1 - h, 1 - k),
                (_rng(g, w - 1, m + 1), _rng(g, h - 1, m + 1), _rng(g, k - 1, m + h),
                 _rng(g, k - 1, m + w), 1 - h, 1 - k, 1 - w),
            )
            for r1, r2, r3, r4, o23, o34, o14 in i_terms:
                for i1, i2, i3, i4 in product(r1, r2, r3, r4):
                    if not ok(i1, i2, i3, i4):
                        continue
                    args = (T(i1, i2), sh(o23, i2, i3), sh(o34, i3, i4), sh(o14, i1, i4))
                    if _nz(*args):
                        acc.add("I", cs.p9_i(*args))


_SPAN_FUNCS = {
    1: _span_p1, 2: _span_p2, 3: _span_p3, 4: _span_p4, 5: _span_p5,
    6: _span_p6, 7: _span_p7, 8: _span_p8, 9: _span_p9,
}


# ------------------------------------------------------------- public API


def lookup_for(t: OverlapParams) -> Lookup:
    cache: dict[tuple, int] = {}

    def T(*idx):
        try:
            return cache[idx]
        except KeyError:
            v = cache[idx] = t_lookup(t, idx)
            return v

    return T


def span_count_x2(T: Lookup, gamma: int, m: int, ell: int, k: int):
    """Twice the number of P_ell instances of span ``k`` (int or array)."""
    pat = PATTERNS[ell]
    if not 1 <= k <= pat.max_span(m):
        return 0
    if gamma < pat.min_gamma:
        return 0
    acc = _Acc()
    _SPAN_FUNCS[ell](T, gamma, m, k, acc)
    return acc.x2


def _halve(x2):
    if isinstance(x2, np.ndarray):
        if np.any(x2 % 2):
            raise ArithmeticError("span count is not integral")
        return x2 // 2
    return x2 // 2 if x2 % 2 == 0 else Fraction(x2, 2)


def pattern_span_count(t: OverlapParams, ell: int, k: int):
    """Instances of P_ell of span ``k`` that start in a fixed replica."""
    return _halve(span_count_x2(lookup_for(t), t.gamma, t.m, ell, k))


def pattern_total(t: OverlapParams, ell: int, L: int, *, clamp: bool = False):
    """Instances of P_ell in the whole SC protograph of coupling length ``L``.

    Each span-``k`` configuration fits ``L - k + 1`` times.  The formula needs
    ``L`` at least the maximum span; with ``clamp=True`` shorter chains are
    handled by dropping spans that do not fit.
    """
    pat = PATTERNS[ell]
    chi = pat.max_span(t.m)
    if L < chi and not clamp:
        raise ValueError(f"P{ell} needs L >= {chi}, got L = {L}")
    T = lookup_for(t)
    x2 = 0
    for k in range(1, chi + 1):
        if L - k + 1 > 0:
            x2 += (L - k + 1) * span_count_x2(T, t.gamma, t.m, ell, k)
    return _halve(x2)


def census(t: OverlapParams, L: int, *, clamp: bool = False) -> dict[int, object]:
    """Totals for every pattern that can occur for this column weight."""
    return {ell: pattern_total(t, ell, L, clamp=clamp) for ell in patterns_for(t.gamma)}


def weighted_sum(totals: Mapping[int, object]) -> Fraction:
    """Sum of ``beta_ell * F_ell`` over the given pattern totals."""
    return sum((PATTERNS[ell].beta * Fraction(f) for ell, f in totals.items()), Fraction(0))


def f_sum(t: OverlapParams, L: int, *, clamp: bool = False) -> Fraction:
    return weighted_sum(census(t, L, clamp=clamp))


def round_half_up(x: Fraction) -> int:
    return int((x * 2 + 1) // 2)


@dataclass(frozen=True)
class PatternCensus:
    """Per-pattern totals, per-span counts and the weighted sum for one partition."""

    totals: dict[int, object]
    spans: dict[tuple[int, int], object]
    L: int

    @property
    def f_sum(self) -> Fraction:
        return weighted_sum(self.totals)

    @property
    def rounded(self) -> int:
        return round_half_up(self.f_sum)


def pattern_census(t: OverlapParams, L: int, *, clamp: bool = False) -> PatternCensus:
    T = lookup_for(t)
    totals, spans = {}, {}
    for ell in patterns_for(t.gamma):
        chi = PATTERNS[ell].max_span(t.m)
        if L < chi and not clamp:
            raise ValueError(f"P{ell} needs L >= {chi}, got L = {L}")
        x2 = 0
        for k in range(1, chi + 1):
            sk = span_count_x2(T, t.gamma, t.m, ell, k)
            spans[(ell, k)] = _halve(sk)
            x2 += max(L - k + 1, 0) * sk
        totals[ell] = _halve(x2)
    return PatternCensus(totals, spans, L)
