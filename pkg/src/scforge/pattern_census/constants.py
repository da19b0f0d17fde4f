"""Identity and per-pattern constants of the nine length-8 protograph patterns."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class PatternConstants:
    ell: int
    n_cns: int
    n_vns: int
    zeta: int              # distinct length-8 candidates per instance
    beta: Fraction         # weight in the objective
    eta: int               # max internal connections between its VNs
    wide: bool             # spans up to 2m+1 replicas instead of m+1

    @property
    def dims(self) -> tuple[int, int]:
        return self.n_cns, self.n_vns

    @property
    def min_gamma(self) -> int:
        """A pattern needs at least as many rows as it has CNs per VN column."""
        return 4 if self.ell in (5, 8) else 2

    def max_span(self, m: int) -> int:
        return 2 * m + 1 if self.wide else m + 1

    @property
    def name(self) -> str:
        return f"P{self.ell}"


def _mk(ell, rows, cols, zeta, eta, wide=False):
    beta = Fraction(1, 2) if ell == 1 else Fraction(zeta)
    return PatternConstants(ell, rows, cols, zeta, beta, eta, wide)


PATTERNS: dict[int, PatternConstants] = {
    1: _mk(1, 2, 2, 1, 0),
    2: _mk(2, 2, 3, 3, 1),
    3: _mk(3, 3, 2, 3, 0),
    4: _mk(4, 2, 4, 6, 2),
    5: _mk(5, 4, 2, 6, 0),
    6: _mk(6, 3, 3, 1, 1),
    7: _mk(7, 3, 4, 2, 2),
    8: _mk(8, 4, 3, 2, 1, wide=True),
    9: _mk(9, 4, 4, 1, 2, wide=True),
}

PATTERN_BY_DIMS = {p.dims: p.ell for p in PATTERNS.values()}


def patterns_for(gamma: int) -> list[int]:
    """Patterns that can occur for column weight ``gamma`` (P5, P8 need 4 rows)."""
    return [ell for ell, p in PATTERNS.items() if gamma >= p.min_gamma]


def pattern_of(n_cns: int, n_vns: int) -> int | None:
    return PATTERN_BY_DIMS.get((n_cns, n_vns))
