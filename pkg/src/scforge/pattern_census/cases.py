"""Per-case instance counts of the nine length-8 patterns.

Every function takes overlap counts (ints or integer numpy arrays of equal
shape) and returns the number of pattern instances for one placement of the
overlaps across replicas.  Names follow the case letters A, B, C, D, E, G, I
of each pattern; arguments are given in the order the formulas list them.
"""

from __future__ import annotations

from math import comb

import numpy as np


def positive_part(x):
    if isinstance(x, np.ndarray):
        return np.maximum(x, 0)
    return x if x > 0 else 0


def binom(n, k: int):
    """Binomial coefficient that is 0 whenever n < k (including negative n)."""
    if isinstance(n, np.ndarray):
        out = np.ones_like(n)
        for j in range(k):
            out = out * (n - j)
        out //= _factorial(k)
        return np.where(n >= k, out, 0)
    return comb(n, k) if n >= k else 0


def _factorial(k: int) -> int:
    f = 1
    for j in range(2, k + 1):
        f *= j
    return f


_pos = positive_part


# P1: 2 CNs, 2 VNs, two c1-c2 overlaps.
def p1_a(t12):
    return binom(t12, 2)


def p1_b(t12, s12):
    return t12 * s12


# P2: 2 CNs, 3 VNs.
def p2_a(t12):
    return binom(t12, 3)


def p2_b(t12, s12):
    return binom(t12, 2) * s12


def p2_c(t12, s12, u12):
    return t12 * s12 * u12


# P3: 3 CNs, 2 VNs, two c1-c2-c3 overlaps.
def p3_a(t123):
    return binom(t123, 2)


def p3_b(t123, s123):
    return t123 * s123


# P4: 2 CNs, 4 VNs.
def p4_a(t12):
    return binom(t12, 4)


def p4_b(t12, s12):
    return binom(t12, 3) * s12


def p4_c(t12, s12):
    return binom(t12, 2) * binom(s12, 2)


def p4_d(t12, s12, u12):
    return binom(t12, 2) * s12 * u12


def p4_e(t12, s12, u12, v12):
    return t12 * s12 * u12 * v12


# P5: 4 CNs, 2 VNs.
def p5_a(t1234):
    return binom(t1234, 2)


def p5_b(t1234, s1234):
    return t1234 * s1234


# P6: 3 CNs, 3 VNs; c1 is the CN joining all three VNs.
def p6_a(t12, t13, t123):
    return (t123 * _pos(t123 - 1) * _pos(t13 - 2)
            + t123 * (t12 - t123) * _pos(t13 - 1))


def _hub_pair(t12, t13, t123):
    # ordered (x in T123, y in T13 \ {x}) plus (x in T12 \ T123, y in T13)
    return t123 * _pos(t13 - 1) + (t12 - t123) * t13


def p6_b(t12, t13, t123, s123):
    return _hub_pair(t12, t13, t123) * s123


def p6_c(t12, t123, s13):
    return t123 * _pos(t12 - 1) * s13


def p6_d(t12, s13, u123):
    return t12 * s13 * u123


# P7: 3 CNs, 4 VNs; two c1-c2 and two c1-c3 overlaps.
def p7_a(t12, t13, t123):
    return (binom(t123, 2) * binom(_pos(t13 - 2), 2)
            + t123 * (t12 - t123) * binom(_pos(t13 - 1), 2)
            + binom(t12 - t123, 2) * binom(t13, 2))


def p7_b(t12, t13, t123, s13):
    return (binom(t123, 2) * _pos(t13 - 2)
            + t123 * (t12 - t123) * _pos(t13 - 1)
            + binom(t12 - t123, 2) * t13) * s13


def p7_c(t12, s13):
    return binom(t12, 2) * binom(s13, 2)


def p7_d(t12, t13, t123, s12, s13, s123):
    return _hub_pair(t12, t13, t123) * _hub_pair(s12, s13, s123)


def p7_e(t12, s13, u13):
    return binom(t12, 2) * s13 * u13


def p7_g(t12, t13, t123, s12, u13):
    return _hub_pair(t12, t13, t123) * s12 * u13


def p7_i(t12, s12, u13, v13):
    return t12 * s12 * u13 * v13


# P8: 4 CNs, 3 VNs; overlaps c1-c2, c3-c4 and c1-c2-c3-c4.
def p8_a(t12, t34, t1234):
    return (t1234 * _pos(t1234 - 1) * _pos(t34 - 2)
            + t1234 * (t12 - t1234) * _pos(t34 - 1))


def p8_b(t12, t34, t1234, s1234):
    return (t1234 * _pos(t34 - 1) + (t12 - t1234) * t34) * s1234


def p8_c(t12, t1234, s34):
    return t1234 * _pos(t12 - 1) * s34


def p8_d(t12, s34, u1234):
    return t12 * s34 * u1234


# P9: 4 CNs, 4 VNs; CN cycle c1-c2-c3-c4-c1.
def p9_a1(t12, t23, t34, t14, t123, t124, t134, t234, t1234):
    return (t1234 * _pos(t1234 - 1) * _pos(t134 - 2) * _pos(t14 - 3)
            + t1234 * _pos(t1234 - 1) * (t34 - t134) * _pos(t14 - 2)
            + t1234 * (t234 - t1234) * _pos(t134 - 1) * _pos(t14 - 2)
            + t1234 * (t234 - t1234) * _pos(t34 - t134 - 1) * _pos(t14 - 1)
            + t1234 * (t23 - t234) * _pos(t134 - 1) * _pos(t14 - 2)
            + t1234 * (t23 - t234) * (t34 - t134) * _pos(t14 - 1))


def p9_a2(t12, t23, t34, t14, t123, t124, t134, t234, t1234):
    x = t123 - t1234
    return (x * t1234 * _pos(t134 - 1) * _pos(t14 - 2)
            + x * t1234 * (t34 - t134) * _pos(t14 - 1)
            + x * (t234 - t1234) * t134 * _pos(t14 - 1)
            + x * (t234 - t1234) * _pos(t34 - t134 - 1) * t14
            + x * _pos(t23 - t234 - 1) * t134 * _pos(t14 - 1)
            + x * _pos(t23 - t234 - 1) * (t34 - t134) * t14)


def p9_a3(t12, t23, t34, t14, t123, t124, t134, t234, t1234):
    x = t124 - t1234
    return (x * t1234 * _pos(t134 - 1) * _pos(t14 - 3)
            + x * t1234 * (t34 - t134) * _pos(t14 - 2)
            + x * (t234 - t1234) * t134 * _pos(t14 - 2)
            + x * (t234 - t1234) * _pos(t34 - t134 - 1) * _pos(t14 - 1)
            + x * (t23 - t234) * t134 * _pos(t14 - 2)
            + x * (t23 - t234) * (t34 - t134) * _pos(t14 - 1))


def p9_a4(t12, t23, t34, t14, t123, t124, t134, t234, t1234):
    x = t12 - t123 - t124 + t1234
    return (x * t1234 * _pos(t134 - 1) * _pos(t14 - 2)
            + x * t1234 * (t34 - t134) * _pos(t14 - 1)
            + x * (t234 - t1234) * t134 * _pos(t14 - 1)
            + x * (t234 - t1234) * _pos(t34 - t134 - 1) * t14
            + x * (t23 - t234) * t134 * _pos(t14 - 1)
            + x * (t23 - t234) * (t34 - t134) * t14)


def p9_a(*args):
    return p9_a1(*args) + p9_a2(*args) + p9_a3(*args) + p9_a4(*args)


def p9_b(t12, t23, t34, t123, t234, t1234, s14):
    return (t1234 * _pos(t234 - 1) * _pos(t34 - 2)
            + t1234 * (t23 - t234) * _pos(t34 - 1)
            + (t123 - t1234) * t234 * _pos(t34 - 1)
            + (t123 - t1234) * _pos(t23 - t234 - 1) * t34
            + (t12 - t123) * t234 * _pos(t34 - 1)
            + (t12 - t123) * (t23 - t234) * t34) * s14


def p9_c(t12, t23, t123, s34, s14, s134):
    return ((t123 * _pos(t23 - 1) + (t12 - t123) * t23)
            * (s134 * _pos(s14 - 1) + (s34 - s134) * s14))


def p9_d(t12, t34, t1234, s23, s14, s1234):
    return ((t1234 * _pos(t34 - 1) + (t12 - t1234) * t34)
            * (s1234 * _pos(s14 - 1) + (s23 - s1234) * s14))


def p9_e(t12, t23, t123, s34, u14):
    return (t123 * _pos(t23 - 1) + (t12 - t123) * t23) * s34 * u14


def p9_g(t12, t34, t1234, s23, u14):
    return (t1234 * _pos(t34 - 1) + (t12 - t1234) * t34) * s23 * u14


def p9_i(t12, s23, u34, v14):
    return t12 * s23 * u34 * v14


CASES = {
    1: {"A": p1_a, "B": p1_b},
    2: {"A": p2_a, "B": p2_b, "C": p2_c},
    3: {"A": p3_a, "B": p3_b},
    4: {"A": p4_a, "B": p4_b, "C": p4_c, "D": p4_d, "E": p4_e},
    5: {"A": p5_a, "B": p5_b},
    6: {"A": p6_a, "B": p6_b, "C": p6_c, "D": p6_d},
    7: {"A": p7_a, "B": p7_b, "C": p7_c, "D": p7_d, "E": p7_e, "G": p7_g, "I": p7_i},
    8: {"A": p8_a, "B": p8_b, "C": p8_c, "D": p8_d},
    9: {"A": p9_a, "A1": p9_a1, "A2": p9_a2, "A3": p9_a3, "A4": p9_a4,
        "B": p9_b, "C": p9_c, "D": p9_d, "E": p9_e, "G": p9_g, "I": p9_i},
}


def case_count(ell: int, case: str, *args):
    try:
        fn = CASES[ell][case]
    except KeyError:
        raise KeyError(f"no case {case!r} for pattern P{ell}") from None
    return fn(*args)
