"""Closed-form and brute-force censuses of the length-8 protograph patterns."""

from .cases import binom, case_count, positive_part
from .constants import PATTERNS, PatternConstants, pattern_of, patterns_for
from .oracle import OracleCensus, brute_force_candidate_census
from .spans import (
    PatternCensus,
    census,
    f_sum,
    pattern_census,
    pattern_span_count,
    pattern_total,
    round_half_up,
    span_count_x2,
    weighted_sum,
)

__all__ = [
    "PATTERNS", "PatternConstants", "pattern_of", "patterns_for",
    "binom", "case_count", "positive_part",
    "OracleCensus", "brute_force_candidate_census",
    "PatternCensus", "census", "f_sum", "pattern_census", "pattern_span_count",
    "pattern_total", "round_half_up", "span_count_x2", "weighted_sum",
]
