"""Greedy circulant power optimization for a fixed partition.

Each iteration ranks the circulants by how much weighted active-candidate
mass passes through them, picks a few from the top of that ranking and
proposes new powers for them.  A proposal is kept only if it strictly lowers
F_SC, keeps the lifted girth at least 6 and, for column weight 3, creates no
(4, 0) objects.  Recounts after a proposal only revisit candidates that
depend on a changed circulant.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from math import lcm

import numpy as np

from .lifting import (
    CandidateSet,
    CirculantPowers,
    build_window,
    enumerate_candidates,
    scb_powers,
)
from .protograph import CodeParams, PartitionMatrix

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CpoConfig:
    subset_size: int = 3
    proposal: str = "uniform"      # "uniform" resample or "perturb" (+-1)
    budget: int = 4000             # iterations; 0 returns the starting state
    target: int = 0                # stop once F_SC <= target
    seed: int = 0
    retries_per_z: int = 8         # proposals per iteration = retries_per_z * z
    stall_switch: int = 200        # consecutive rejections before +-1 moves
    stall_stop: int = 1000         # consecutive rejections before giving up

    def __post_init__(self):
        if self.subset_size < 1:
            raise ValueError("subset_size must be at least 1")
        if self.proposal not in ("uniform", "perturb"):
            raise ValueError(f"unknown proposal rule {self.proposal!r}")
        if self.budget < 0 or self.retries_per_z < 1:
            raise ValueError("budget must be >= 0 and retries_per_z >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TraceRecord:
    iteration: int
    selected: list[tuple[int, int]]
    proposed: list[int]
    f_sc: int | Fraction
    accepted: bool
    proposals: int


@dataclass
class CpoState:
    powers: CirculantPowers
    f_sc: int | Fraction
    psi: np.ndarray
    psi_window: np.ndarray
    seed: int
    initial_f_sc: int | Fraction
    iterations: int = 0
    stop_reason: str = ""
    trace: list[TraceRecord] = field(default_factory=list, repr=False)

    def accepted(self) -> list[TraceRecord]:
        return [r for r in self.trace if r.accepted]


def weight_of_span(k: int, L: int, xi: int) -> Fraction:
    """Share of a span-``k`` window candidate in the full code."""
    if not 1 <= k <= xi:
        raise ValueError(f"span {k} outside 1..{xi}")
    return Fraction(max(L - k + 1, 0), xi - k + 1)


def _scaled_weights(cs: CandidateSet, L: int) -> tuple[np.ndarray, int]:
    """Integer candidate weights and their common denominator."""
    xi = cs.window.xi
    denom = 2 * lcm(*range(1, xi + 1))
    per_span = np.zeros(xi + 1, dtype=np.int64)
    for k in range(1, xi + 1):
        w = weight_of_span(k, L, xi) * denom
        per_span[k] = int(w)
    w = per_span[cs.span]
    return np.where(cs.pattern == 1, w // 2, w), denom


def accumulate_psi(cs: CandidateSet, active: np.ndarray, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Weighted active-candidate counts per window position and per circulant.

    Returns ``(psi_window, psi)`` as float arrays; each active candidate adds
    its span weight to every distinct window position it uses, and ``psi``
    folds window positions onto base circulants by residue.
    """
    scaled, denom = _psi_scaled(cs, active, L)
    g, k = cs.window.gamma, cs.window.kappa
    window = scaled[0].reshape(cs.window.shape) / denom
    return window, (scaled[1] / denom).reshape(g, k)


def _psi_scaled(cs: CandidateSet, active: np.ndarray, L: int):
    weights, denom = _scaled_weights(cs, L)
    ent = cs.entries[active]
    w = np.broadcast_to(weights[active][:, None], ent.shape)
    keep = ent >= 0
    size = cs.window.shape[0] * cs.window.shape[1]
    psi_w = np.bincount(ent[keep], weights=w[keep], minlength=size).astype(np.int64)
    n_base = cs.window.gamma * cs.window.kappa
    psi = np.bincount(cs.window.base_index.ravel(), weights=psi_w, minlength=n_base).astype(np.int64)
    return (psi_w, psi), denom


class _Counter:
    """Maintains activity flags and F_SC under power changes."""

    def __init__(self, cs: CandidateSet, powers: CirculantPowers, L: int, check_40: bool):
        self.cs, self.L, self.z = cs, L, powers.z
        self.check_40 = check_40
        span_w = np.maximum(L - cs.span + 1, 0)
        lifts_x2 = np.where(cs.pattern == 1, powers.z, 2 * powers.z)
        self.contrib_x2 = np.where(cs.start == 0, span_w * lifts_x2, 0)
        self.powers = powers
        self.active = cs.active_mask(powers)
        self.f_x2 = int(self.contrib_x2[self.active].sum())

    def evaluate(self, new: CirculantPowers, changed: list[int]):
        """(feasible, new F_SC x2, touched indices, new activity of touched)."""
        cs = self.cs
        if not cs.girth_ok(new):
            return False, None, None, None
        touched = np.unique(np.concatenate([cs.touching[b] for b in changed]))
        cyc = cs.cycle_mask(new, touched)
        c13, c24 = cs.chord_masks(new, touched)
        if self.check_40:
            full = cyc & c13 & c24 & (self.contrib_x2[touched] > 0)
            if full.any():
                return False, None, None, None
        act = cyc & ~c13 & ~c24
        delta = int(self.contrib_x2[touched][act].sum() - self.contrib_x2[touched][self.active[touched]].sum())
        return True, self.f_x2 + delta, touched, act

    def commit(self, new, f_x2, touched, act):
        self.powers = new
        self.f_x2 = f_x2
        self.active[touched] = act


def _number(x2: int):
    return x2 // 2 if x2 % 2 == 0 else Fraction(x2, 2)


def _state(counter: _Counter, seed, initial, iterations, reason, trace) -> CpoState:
    psi_window, psi = accumulate_psi(counter.cs, counter.active, counter.L)
    return CpoState(counter.powers, _number(counter.f_x2), psi, psi_window, seed,
                    initial, iterations, reason, trace)


def run_cpo(partition: PartitionMatrix, params: CodeParams, config: CpoConfig | None = None,
            *, initial: CirculantPowers | None = None,
            candidates: CandidateSet | None = None) -> CpoState:
    """Lower F_SC by power changes, starting from the separable powers."""
    config = config or CpoConfig()
    cs = candidates if candidates is not None else enumerate_candidates(build_window(partition, params))
    powers = initial if initial is not None else scb_powers(params)
    if not cs.girth_ok(powers):
        raise ValueError("starting powers already lift a 4-cycle")
    check_40 = params.gamma == 3
    counter = _Counter(cs, powers, params.L, check_40)
    if check_40 and np.any(cs.fully_chorded_mask(powers) & (counter.contrib_x2 > 0)):
        raise ValueError("starting powers already contain (4, 0) objects")

    rng = random.Random(config.seed)
    z, kappa = params.z, params.kappa
    initial_f = _number(counter.f_x2)
    weights, _ = _scaled_weights(cs, params.L)
    trace: list[TraceRecord] = []
    stall, it, reason = 0, 0, "budget"

    while True:
        if counter.f_x2 <= 2 * config.target:
            reason = "target"
            break
        if it >= config.budget:
            reason = "budget"
            break
        if stall >= config.stall_stop:
            reason = "stagnation"
            break
        it += 1

        psi = _rank_mass(cs, counter.active, weights)
        ranked = sorted((b for b in range(len(psi)) if psi[b] > 0), key=lambda b: (-psi[b], b))
        if not ranked:
            reason = "no active candidates"
            break
        size = max(1, config.subset_size - (stall * config.subset_size) // max(config.stall_switch, 1))
        size = min(size, len(ranked))
        first = ranked[stall % len(ranked)]
        pool = [b for b in ranked[:max(2 * size, 8)] if b != first]
        chosen = [first] + rng.sample(pool, min(size - 1, len(pool)))
        perturb = config.proposal == "perturb" or stall >= config.stall_switch

        accepted = False
        cur = counter.powers.flat
        proposed: list[int] = []
        tries = 0
        for tries in range(1, config.retries_per_z * z + 1):
            if perturb:
                proposed = [int(cur[b] + rng.choice((-1, 1))) % z for b in chosen]
            else:
                proposed = [(int(cur[b]) + rng.randrange(1, z)) % z for b in chosen]
            new = counter.powers.with_entries({divmod(b, kappa): p for b, p in zip(chosen, proposed)})
            ok, f_x2, touched, act = counter.evaluate(new, chosen)
            if ok and f_x2 < counter.f_x2:
                counter.commit(new, f_x2, touched, act)
                accepted = True
                break
        trace.append(TraceRecord(it, [divmod(b, kappa) for b in chosen], proposed,
                                 _number(counter.f_x2), accepted, tries))
        if accepted:
            stall = 0
            log.debug("iteration %d: F_SC -> %s", it, _number(counter.f_x2))
        else:
            stall += 1

    return _state(counter, config.seed, initial_f, it, reason, trace)


def _rank_mass(cs: CandidateSet, active: np.ndarray, weights: np.ndarray) -> list[int]:
    ent = cs.entry_base[active]
    w = np.broadcast_to(weights[active][:, None], ent.shape)
    keep = ent >= 0
    n_base = cs.window.gamma * cs.window.kappa
    return np.bincount(ent[keep], weights=w[keep], minlength=n_base).astype(np.int64).tolist()
