"""Step lengths, a sufficient condition for t-sets, and block-collision bounds.

A set ``Λ`` is a t-set when ``Λ ∩ (Λ + t0)`` is bounded for every
``t0 != 0``.  Finite data can never certify that, so the checks here work
on a realized prefix of blocks and report exactly which finite conditions
held.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .config import DEFAULTS
from .core import IntegerInterval, Interval, is_rational
from .matching import PointSet
from .random_construction import GeneratedSet, MonteCarloResult

__all__ = [
    "step_length",
    "BlockedSet",
    "TSetReport",
    "stl_tset_check",
    "translate_intersection",
    "translate_bound_block",
    "default_translate_probes",
    "ts_z_bound",
    "ts_z_combinatorial",
    "ts_z_event_montecarlo",
    "ts_r_pair_probability",
    "ts_r_event_montecarlo",
    "tsbd_series",
]


def _values(points):
    if isinstance(points, PointSet):
        return sorted(points.points.tolist())
    if isinstance(points, np.ndarray):
        return sorted(points.reshape(-1).tolist())
    return sorted(points)


def step_length(points):
    """Smallest distance between two distinct points; ``inf`` for fewer than two."""
    pts = _values(points)
    best = math.inf
    for a, b in zip(pts, pts[1:]):
        if b != a and b - a < best:
            best = b - a
    return best


@dataclasses.dataclass(frozen=True)
class BlockedSet:
    """Ordered blocks ``(I_k, Λ_k)`` with ``Λ_k ⊆ I_k = [lo_k, hi_k]``.

    Points are kept as given (Python ints stay exact).
    """

    blocks: tuple

    def __post_init__(self):
        out = []
        for k, (iv, pts) in enumerate(self.blocks, start=1):
            if not isinstance(iv, (Interval, IntegerInterval)):
                iv = Interval(*iv)
            vals = tuple(_values(pts))
            if vals and (vals[0] < iv.lo or vals[-1] > iv.hi):
                raise ValueError(f"block {k} has points outside its interval")
            out.append((iv, vals))
        for k, ((a, _), (b, _)) in enumerate(zip(out, out[1:]), start=1):
            if b.lo < a.hi:
                raise ValueError(f"blocks {k} and {k + 1} are out of order or overlap")
        object.__setattr__(self, "blocks", tuple(out))

    @classmethod
    def from_generated(cls, gs: GeneratedSet) -> "BlockedSet":
        return cls(tuple((gs.schedule.interval(k), blk) for k, blk in enumerate(gs.blocks_realized, start=1)))

    def __len__(self):
        return len(self.blocks)

    @property
    def gaps(self) -> tuple:
        """``lo_{k+1} - hi_k`` for consecutive blocks."""
        return tuple(b.lo - a.hi for (a, _), (b, _) in zip(self.blocks, self.blocks[1:]))

    @property
    def lengths(self) -> tuple:
        return tuple(iv.hi - iv.lo for iv, _ in self.blocks)

    @property
    def step_lengths(self) -> tuple:
        return tuple(step_length(p) for _, p in self.blocks)

    def points(self) -> tuple:
        return tuple(x for _, p in self.blocks for x in p)


@dataclasses.dataclass(frozen=True)
class TSetReport:
    """Finite-prefix check of the step-length sufficient condition.

    ``k0`` is 1-based: the first block of the longest suffix on which
    ``StL(Λ_k) > len(I_{k-1})`` holds, or ``None`` if the last block fails.
    ``gap_failures`` lists the positions ``k`` (1-based) where
    ``gap_k >= gap_{k+1}``.
    """

    passed: bool
    gaps_increasing: bool
    gap_failures: tuple
    gaps: tuple
    step_lengths: tuple
    previous_lengths: tuple
    stl_ok: tuple
    k0: Optional[int]
    stl_failures: tuple


def stl_tset_check(B: BlockedSet) -> TSetReport:
    """Check increasing gaps and ``StL(Λ_k) > len(I_{k-1})`` from some ``k0`` on.

    Unboundedness of the gaps cannot be observed on a prefix; only strict
    increase is tested.
    """
    if len(B) < 2:
        raise ValueError("need at least two blocks")
    gaps = B.gaps
    gap_fail = tuple(k for k in range(1, len(gaps)) if not gaps[k - 1] < gaps[k])
    stl = B.step_lengths
    prev = B.lengths[:-1]
    ok = tuple(s > p for s, p in zip(stl[1:], prev))
    k0 = None
    for i in range(len(ok) - 1, -1, -1):
        if not ok[i]:
            break
        k0 = i + 2
    fails = tuple(i + 2 for i, good in enumerate(ok) if not good)
    return TSetReport(
        passed=not gap_fail and k0 is not None, gaps_increasing=not gap_fail, gap_failures=gap_fail,
        gaps=gaps, step_lengths=stl, previous_lengths=prev, stl_ok=ok, k0=k0, stl_failures=fails,
    )


def translate_intersection(Lambda, t0, tol=None):
    """Points ``x`` of ``Λ`` with some ``y`` in ``Λ`` and ``|x - (y + t0)| <= tol``.

    Integer input is compared exactly (``tol`` defaults to 0) and returned
    as a tuple of ints; float input returns a :class:`PointSet`, with
    ``tol`` defaulting to a per-point roundoff allowance of
    ``64 * machine_eps * max(1, |x|, |t0|)``.
    """
    if t0 == 0:
        raise ValueError("t0 must be nonzero")
    pts = _values(Lambda)
    if all(isinstance(x, (int, np.integer)) for x in pts) and is_rational(t0):
        s = set(int(x) for x in pts)
        tol = 0 if tol is None else tol
        if tol == 0:
            return tuple(x for x in sorted(s) if x - t0 in s)
        arr = np.array(sorted(s), dtype=float)
    else:
        arr = np.array(pts, dtype=float)
    if tol is None:
        scale = np.maximum(np.maximum(1.0, np.abs(arr)), abs(float(t0)))
        tol = 64 * np.finfo(float).eps * scale
    shifted = arr + float(t0)
    idx = np.searchsorted(shifted, arr)
    near = np.full(arr.shape, np.inf)
    for j in (idx - 1, idx):
        valid = (j >= 0) & (j < shifted.size)
        jj = np.clip(j, 0, max(shifted.size - 1, 0))
        d = np.where(valid, np.abs(arr - shifted[jj]), np.inf)
        near = np.minimum(near, d)
    return PointSet(arr[near <= tol])


def translate_bound_block(B: BlockedSet, t0) -> int:
    """First block ``K`` (1-based) from which no translate collision can occur.

    ``K`` is the smallest index such that for every ``k >= K`` both the gap
    before block ``k`` and ``StL(Λ_k)`` exceed ``|t0|``.  Then
    ``Λ ∩ (Λ + t0) ⊆ Λ_1 ∪ ... ∪ Λ_{K-1}``.  Returns ``len(B) + 1`` when
    no block of the prefix qualifies (the containment is then vacuous).
    """
    if t0 == 0:
        raise ValueError("t0 must be nonzero")
    a = abs(t0)
    gaps = (None,) + B.gaps
    stl = B.step_lengths
    K = len(B) + 1
    for k in range(len(B), 1, -1):
        if gaps[k - 1] > a and stl[k - 1] > a:
            K = k
        else:
            break
    return K


def default_translate_probes(B: BlockedSet, seed=None, n_random=20) -> list:
    """``±`` step lengths, block lengths, gaps and seeded random shifts."""
    seed = DEFAULTS.seed if seed is None else seed
    base = [v for v in B.step_lengths if math.isfinite(v)] + list(B.lengths) + list(B.gaps)
    base = [v for v in base if v != 0]
    top = max((abs(float(v)) for v in base), default=1.0)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x7]))
    rand = (rng.random(n_random) * top).tolist()
    out = []
    for v in base + rand:
        if v:
            out.extend([v, -v])
    return out


def ts_z_bound(N_k, N_km1, ell) -> tuple:
    """``((ell-1) ell N_{k-1} / N_k, ell**2 N_{k-1} / N_k)``, exact for integer input."""
    if int(ell) != ell or ell < 2:
        raise ValueError("ell must be an integer >= 2")
    if N_k < ell:
        raise ValueError("need N_k >= ell")
    if N_km1 < 0:
        raise ValueError("N_{k-1} must be nonnegative")
    ell = int(ell)
    if is_rational(N_k) and is_rational(N_km1):
        base = Fraction(N_km1) / Fraction(N_k)
    else:
        base = float(N_km1) / float(N_k)
    return (ell - 1) * ell * base, ell * ell * base


def ts_z_combinatorial(N_k, N_km1, ell) -> Fraction:
    """The counting form ``(N_k+1) N_{k-1} C(N_k-1, ell-2) / C(N_k+1, ell)``."""
    N, M, ell = int(N_k), int(N_km1), int(ell)
    if ell < 2 or N < ell:
        raise ValueError("need 2 <= ell <= N_k")
    return Fraction((N + 1) * M * math.comb(N - 1, ell - 2), math.comb(N + 1, ell))


def ts_z_event_montecarlo(N_k, N_km1, ell, trials=None, seed=None) -> MonteCarloResult:
    """Frequency of ``StL(Λ) <= N_{k-1}`` for uniform ``ell``-subsets of ``{0, ..., N_k}``.

    ``bound`` is the exact middle expression of :func:`ts_z_bound`.
    """
    trials = DEFAULTS.trials if trials is None else int(trials)
    seed = DEFAULTS.seed if seed is None else seed
    if trials < 1:
        raise ValueError("trials must be >= 1")
    exact, _ = ts_z_bound(N_k, N_km1, ell)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
    hits = 0
    for _ in range(trials):
        pts = np.sort(rng.choice(int(N_k) + 1, size=int(ell), replace=False))
        hits += int(np.diff(pts).min() <= N_km1)
    p = hits / trials
    return MonteCarloResult(p, math.sqrt(p * (1 - p) / trials), trials, hits, float(exact), "sampled", 0, 0)


def ts_r_pair_probability(N_k, N_km1):
    """``P(|x - y| <= N_{k-1})`` for ``x, y`` uniform on an interval of length ``N_k``."""
    if not 0 < N_km1 <= N_k:
        raise ValueError("need 0 < N_{k-1} <= N_k")
    if is_rational(N_k) and is_rational(N_km1):
        a, b = Fraction(N_km1), Fraction(N_k)
    else:
        a, b = float(N_km1), float(N_k)
    return a * (2 * b - a) / (b * b)


def ts_r_event_montecarlo(I: Interval, ell, threshold, trials=None, seed=None) -> MonteCarloResult:
    """Frequency of ``StL(Λ) <= threshold`` for ``ell`` i.i.d. uniform points of ``I``.

    ``bound`` is ``min(1, ell**2 threshold / λ(I))``.
    """
    trials = DEFAULTS.trials if trials is None else int(trials)
    seed = DEFAULTS.seed if seed is None else seed
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lo, hi = float(I.lo), float(I.hi)
    length = hi - lo
    if length <= 0:
        raise ValueError("interval must have positive length")
    ell = int(ell)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0]))
    hits = 0
    rows = max(1, 2_000_000 // max(ell, 1))
    for s in range(0, trials, rows):
        m = min(rows, trials - s)
        if ell < 2:
            continue
        pts = np.sort(lo + length * rng.random((m, ell)), axis=1)
        hits += int((np.diff(pts, axis=1).min(axis=1) <= threshold).sum())
    p = hits / trials
    bound = min(1.0, ell * ell * float(threshold) / length)
    return MonteCarloResult(p, math.sqrt(p * (1 - p) / trials), trials, hits, bound, "sampled", 0, 0)


def tsbd_series(k_max) -> tuple:
    """Terms and partial sums of ``ell_k**2 N_{k-1} / N_k`` with ``N_k = (k!)**4``, ``ell_k = k``."""
    terms, sums, acc = [], [], Fraction(0)
    for k in range(1, int(k_max) + 1):
        term = Fraction(k * k * math.factorial(k - 1) ** 4, math.factorial(k) ** 4)
        acc += term
        terms.append(term)
        sums.append(acc)
    return tuple(terms), tuple(sums)
