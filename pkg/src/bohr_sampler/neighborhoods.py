"""Polar sets of phase-function families.

For a family ``F`` of phase polynomials, the left polar

    N◁(F, eps, a) = {t : psi_p(t) lies within eps of psi_p(a) for all p in F}

is computed in closed form when ``F`` consists of characters (a finite
union of intervals on any bounded window) and estimated on a grid for
general chirps.  ``in_P_family`` decides whether a family occupies at least
an ``eps**n`` fraction of a window.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Optional

import numpy as np

from ._validation import as_phase, check_eps
from .config import DEFAULTS
from .core import (
    IntegerInterval,
    Interval,
    IntervalUnion,
    PhasePolynomial,
    angular_distance,
    as_exact,
    eval_phase,
    is_rational,
)

__all__ = [
    "FunctionFamily",
    "NeighborhoodResult",
    "character_carrier",
    "n_left_exact",
    "n_left_grid",
    "n_left_integer",
    "n_left",
    "in_P_family",
    "p_family_report",
    "membership",
    "n_right_check",
]

_CHUNK = 1 << 20


class FunctionFamily(Sequence):
    """Finite family of distinct phase polynomials.

    Members may be given as :class:`PhasePolynomial`, as coefficient
    sequences, or as bare numbers (read as character frequencies).
    """

    def __init__(self, members=()):
        members = tuple(as_phase(m) for m in members)
        if len(set(members)) != len(members):
            raise ValueError("family members must be distinct")
        self._members = members

    @classmethod
    def characters(cls, *taus) -> "FunctionFamily":
        return cls(PhasePolynomial.character(t) for t in taus)

    def __getitem__(self, i):
        return self._members[i]

    def __len__(self):
        return len(self._members)

    def __eq__(self, other):
        return isinstance(other, FunctionFamily) and set(self._members) == set(other._members)

    def __hash__(self):
        return hash(frozenset(self._members))

    def __repr__(self):
        return f"FunctionFamily({list(self._members)!r})"

    @property
    def is_character_family(self) -> bool:
        return all(p.is_character_like for p in self._members)

    @property
    def is_exact(self) -> bool:
        return all(p.is_exact for p in self._members)

    def sup_derivative(self, lo, hi) -> float:
        return max((p.sup_derivative(lo, hi) for p in self._members), default=0.0)


def as_family(F) -> FunctionFamily:
    return F if isinstance(F, FunctionFamily) else FunctionFamily(F)


@dataclasses.dataclass(frozen=True)
class NeighborhoodResult:
    """Carrier and measure of ``N◁(F, eps, a)`` restricted to a window.

    ``carrier`` is an :class:`IntervalUnion` on ℝ and a sorted tuple of
    integers on ℤ.  ``exact`` is true for closed-form and enumeration
    results; grid estimates carry their ``step`` and an ``error_bound`` on
    ``|measure - true measure|``.
    """

    carrier: object
    measure: object
    exact: bool
    step: Optional[float] = None
    error_bound: float = 0.0


def character_carrier(tau, eps, a, I: Interval) -> IntervalUnion:
    """``{t in I : tau*(t - a) mod 1 in (-eps, eps)}`` as an interval union."""
    if tau == 0:
        raise ValueError("zero frequency: the condition is vacuous and must be handled by the caller")
    period = 1 / abs(tau)
    half = eps * period
    m_lo = math.floor((I.lo - a - half) / period)
    m_hi = math.ceil((I.hi - a + half) / period)
    pairs = []
    for m in range(m_lo, m_hi + 1):
        c = a + m * period
        lo, hi = max(c - half, I.lo), min(c + half, I.hi)
        if lo < hi:
            pairs.append((lo, hi))
    return IntervalUnion(tuple(pairs))


def _all_rational(*xs) -> bool:
    return all(is_rational(x) for x in xs)


def n_left_exact(F, eps, a, I: Interval, exact=None) -> NeighborhoodResult:
    """Closed-form ``N◁(F, eps, a) ∩ I`` for a family of characters.

    Parameters
    ----------
    F : FunctionFamily
        Degree-one phase polynomials with nonzero frequency.  Constant
        terms cancel in the neighborhood condition and are ignored.
    eps : real in (0, 1/2)
    a : real
        Anchor point.
    I : Interval
    exact : bool, optional
        Force rational arithmetic (inputs converted with
        :func:`~bohr_sampler.core.as_exact`) or float arithmetic.  By default
        arithmetic is rational iff every input is rational.
    """
    F = as_family(F)
    check_eps(eps, upper=0.5)
    if not F.is_character_family:
        raise ValueError("closed form needs degree-one phases; use n_left_grid for chirps")
    taus = [p.frequency for p in F]
    if any(t == 0 for t in taus):
        raise ValueError("zero frequency in family: condition is vacuous")
    if exact is None:
        exact = _all_rational(eps, a, I.lo, I.hi, *taus)
    if exact:
        taus = [as_exact(t) for t in taus]
        eps, a, I = as_exact(eps), as_exact(a), I.exact()
    else:
        taus = [float(t) for t in taus]
        eps, a, I = float(eps), float(a), Interval(float(I.lo), float(I.hi))
    carrier = IntervalUnion((I,))
    for tau in taus:
        if carrier.is_empty:
            break
        carrier = carrier.intersect(character_carrier(tau, eps, a, I))
    return NeighborhoodResult(carrier=carrier, measure=carrier.total_length, exact=True)


def membership(F, eps, a, t) -> np.ndarray:
    """Boolean mask of ``t in N◁(F, eps, a)`` for a float array ``t``."""
    F = as_family(F)
    t = np.asarray(t, dtype=float)
    mask = np.ones(t.shape, dtype=bool)
    for p in F:
        ref = float(eval_phase(p, a))
        mask &= angular_distance(eval_phase(p, t), ref) < eps
    return mask


def _crossing_bound(F, I) -> int:
    # Each member changes membership at most twice per unit of phase swept.
    total = 0
    for p in F:
        lip = p.sup_derivative(I.lo, I.hi)
        total += 2 * (math.ceil(lip * float(I.length)) + 1)
    return total


def n_left_grid(F, eps, a, I: Interval, step, check_step=True) -> NeighborhoodResult:
    """Grid estimate of ``N◁(F, eps, a) ∩ I`` for arbitrary chirps.

    The window is cut into ``ceil(len/step)`` equal cells and each cell is
    classified by its midpoint.  ``error_bound`` is the cell width times an
    upper bound on the number of membership changes.
    """
    F = as_family(F)
    check_eps(eps)
    if not step > 0:
        raise ValueError("grid step must be positive")
    lo, hi = float(I.lo), float(I.hi)
    length = hi - lo
    if check_step and len(F):
        lip = F.sup_derivative(lo, hi)
        if lip > 0 and step > eps / (10 * lip):
            raise ValueError(
                f"grid step {step} too coarse: need step <= eps/(10*sup|p'|) = {eps / (10 * lip):.3g}"
            )
    if length == 0:
        return NeighborhoodResult(IntervalUnion.empty(), 0.0, exact=False, step=step)
    n = max(1, math.ceil(length / step))
    cell = length / n
    masks = []
    for start in range(0, n, _CHUNK):
        idx = np.arange(start, min(n, start + _CHUNK), dtype=float)
        masks.append(membership(F, float(eps), float(a), lo + (idx + 0.5) * cell))
    mask = np.concatenate(masks)
    count = int(mask.sum())
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    carrier = IntervalUnion(
        tuple((lo + s * cell, min(hi, lo + e * cell)) for s, e in zip(starts, stops))
    )
    return NeighborhoodResult(
        carrier=carrier,
        measure=count * cell,
        exact=False,
        step=cell,
        error_bound=cell * _crossing_bound(F, I),
    )


def n_left_integer(F, eps, a, I: IntegerInterval, exact=None) -> NeighborhoodResult:
    """Exact enumeration of ``N◁(F, eps, a) ∩ I`` on the integers."""
    F = as_family(F)
    check_eps(eps, upper=0.5)
    if I.cardinality > DEFAULTS.int_enum_cap:
        raise ValueError(f"integer interval of {I.cardinality} points exceeds enumeration cap")
    if exact is None:
        exact = F.is_exact and _all_rational(eps, a) and I.cardinality <= 100_000
    if exact:
        fam = [p.exact() for p in F]
        e, aa = as_exact(eps), as_exact(a)
        refs = [eval_phase(p, aa) for p in fam]
        points = tuple(
            t for t in I if all(angular_distance(eval_phase(p, t), r) < e for p, r in zip(fam, refs))
        )
    else:
        t = np.arange(I.lo, I.hi + 1, dtype=float)
        points = tuple(int(x) for x in t[membership(F, float(eps), float(a), t)])
    return NeighborhoodResult(carrier=points, measure=len(points), exact=True)


def _default_step(F, eps, I):
    lip = F.sup_derivative(I.lo, I.hi)
    step = float(I.length) / 200_000 if I.length else 1.0
    if lip > 0:
        step = min(step, float(eps) / (10 * lip))
    return step


def n_left(F, eps, a, I, step=None, exact=None) -> NeighborhoodResult:
    """Dispatch to the ℤ, closed-form or grid computation of ``N◁ ∩ I``.

    The closed form covers characters with ``eps < 1/2``; larger radii go
    to the grid estimate, whose error bound keeps verdicts conservative.
    """
    F = as_family(F)
    if isinstance(I, IntegerInterval):
        return n_left_integer(F, eps, a, I, exact=exact)
    if not len(F):
        return NeighborhoodResult(IntervalUnion((I,)), I.length, exact=True)
    if F.is_character_family and all(p.frequency != 0 for p in F) and eps < 0.5:
        return n_left_exact(F, eps, a, I, exact=exact)
    if step is None:
        step = _default_step(F, eps, I)
    return n_left_grid(F, eps, a, I, step)


def in_P_family(F, I, n, eps, a=0, step=None, exact=None) -> bool:
    """Whether ``λ(N◁(F, eps, a) ∩ I) >= eps**n λ(I)``.

    Grid estimates are used one-sidedly: the verdict is true only if the
    estimate minus its error bound clears the threshold, so a true verdict
    can be relied upon.
    """
    F = as_family(F)
    if len(F) != n:
        raise ValueError(f"family has {len(F)} members, expected n={n}")
    res = n_left(F, eps, a, I, step=step, exact=exact)
    size = I.cardinality if isinstance(I, IntegerInterval) else I.length
    if res.exact and isinstance(res.measure, Fraction):
        return res.measure >= as_exact(eps) ** n * as_exact(size)
    threshold = float(eps) ** n * float(size)
    return float(res.measure) - res.error_bound >= threshold


def p_family_report(F, I, n, eps, probes, step=None, exact=None) -> dict:
    """Per-anchor 𝔓-membership on a finite probe set of anchors ``a``.

    The quantifier "for all a" can only be checked on finitely many
    anchors; the report lists each one so coverage is explicit.
    """
    per_a = [(a, in_P_family(F, I, n, eps, a=a, step=step, exact=exact)) for a in probes]
    return {
        "passed": all(ok for _, ok in per_a),
        "per_anchor": per_a,
        "n_probes": len(per_a),
    }


def n_right_check(phi, I: Interval, eps, step) -> bool:
    """Conservative test that ``psi_phi`` maps ``I`` into ``V_eps``.

    Passes iff the grid sup of the angular distance to 1 stays below
    ``eps - step * sup|phi'|``, which rules out excursions between grid
    points.
    """
    phi = as_phase(phi)
    if not step > 0:
        raise ValueError("grid step must be positive")
    lo, hi = float(I.lo), float(I.hi)
    n = int(math.floor((hi - lo) / step))
    t = np.concatenate((lo + step * np.arange(n + 1, dtype=float), [hi]))
    sup = float(np.max(angular_distance(eval_phase(phi, t), 0.0)))
    return sup < float(eps) - step * phi.sup_derivative(lo, hi)
