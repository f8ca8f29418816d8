"""Continuous discrepancy, Weyl integrals and strong linear independence.

The trajectory of a phase vector ``x(t) = (p_1(t), ..., p_n(t))`` on the
torus is compared with Haar measure over a finite family of axis-parallel
boxes.  The sup over *all* boxes is not computable, so
:func:`discrepancy_estimate` is a lower bound for the true continuous
discrepancy, good enough to falsify and to follow trends in ``T``.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_phase, check_times
from .config import DEFAULTS
from .core import Interval, PhasePolynomial, as_exact, eval_phase, is_rational, wrap
from .exceptions import IndependenceError
from .neighborhoods import as_family, n_left

__all__ = [
    "IndependenceVerdict",
    "is_strongly_independent",
    "WeylResult",
    "weyl_integral",
    "BoxFamily",
    "DiscrepancyEstimate",
    "discrepancy_estimate",
    "find_L",
    "PhaseEmbedding",
]


def _phase_vector(x) -> tuple:
    comps = tuple(as_phase(p) for p in x)
    if not comps:
        raise ValueError("phase vector needs at least one component")
    return comps


@dataclasses.dataclass(frozen=True)
class IndependenceVerdict:
    """Result of a strong-independence test.

    ``exact`` tells whether the verdict is a decision (rational input) or
    only "no violation up to ``bound``" (irrational input).  ``witness`` is
    an integer vector ``h`` with ``sum h_j p_j`` constant, when one exists.
    """

    independent: bool
    exact: bool
    witness: Optional[tuple] = None
    bound: Optional[int] = None

    def __bool__(self):
        return self.independent


def _rational_kernel(rows, n):
    """One nonzero integer kernel vector of a rational matrix, or None."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    f = free[0]
    vec = [Fraction(0)] * n
    vec[f] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -m[i][f]
    lcm = 1
    for v in vec:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, abs(v))
    ints = [v // g for v in ints]
    if next(v for v in ints if v != 0) < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def is_strongly_independent(polys, lattice_bound=10, tol=1e-9) -> IndependenceVerdict:
    """Whether no nonzero integer combination of ``polys`` is constant.

    Rational coefficients: exact decision by rational elimination on the
    non-constant coefficient rows.  Otherwise every ``h`` with
    ``|h_j| <= lattice_bound`` is searched, with relative tolerance ``tol``.
    """
    polys = _phase_vector(polys)
    n = len(polys)
    deg = max(p.degree() for p in polys)
    if all(p.is_exact for p in polys):
        rows = [[as_exact(p.coefficient(r)) for p in polys] for r in range(1, deg + 1)]
        h = _rational_kernel(rows, n) if rows else tuple([1] + [0] * (n - 1))
        return IndependenceVerdict(independent=h is None, exact=True, witness=h)
    C = np.array([[float(p.coefficient(r)) for r in range(1, deg + 1)] for p in polys])
    if C.size == 0:
        return IndependenceVerdict(False, exact=True, witness=tuple([1] + [0] * (n - 1)))
    rng = range(-lattice_bound, lattice_bound + 1)
    scale = np.abs(C).sum(axis=1)
    for block in _lattice_blocks(rng, n):
        H = np.asarray(block, dtype=float)
        vals = np.abs(H @ C).max(axis=1)
        thresh = tol * (1 + np.abs(H) @ scale)
        hits = np.flatnonzero(vals <= thresh)
        for i in hits:
            h = tuple(int(v) for v in block[i])
            if any(h):
                if next(v for v in h if v != 0) < 0:
                    h = tuple(-v for v in h)
                return IndependenceVerdict(False, exact=False, witness=h, bound=lattice_bound)
    return IndependenceVerdict(True, exact=False, bound=lattice_bound)


def _lattice_blocks(rng, n, size=200_000):
    it = itertools.product(rng, repeat=n)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


class WeylResult(NamedTuple):
    value: complex
    error_bound: float
    step: float


def _combine(x, h) -> PhasePolynomial:
    q = PhasePolynomial(())
    for hj, p in zip(h, x):
        q = q + int(hj) * p
    return q


def weyl_integral(x, h, T, tau=0.0, quad_step=None) -> WeylResult:
    """Average ``(1/T) * integral_0^T exp(2*pi*i * h.x(t + tau)) dt``.

    Composite midpoint rule.  ``quad_step`` must satisfy
    ``quad_step <= 1 / (20 * sup|q'|)`` on ``[tau, tau + T]`` with
    ``q = sum_j h_j p_j``; it defaults to that limit.  The error bound is
    the midpoint-rule remainder ``step**2 / 24 * sup|g''|`` of the
    integrand ``g = exp(2*pi*i*q)``.
    """
    x = _phase_vector(x)
    h = tuple(int(v) for v in h)
    if len(h) != len(x):
        raise ValueError("h must have one entry per component")
    if not any(h):
        raise ValueError("h must be nonzero")
    if not T > 0:
        raise ValueError("T must be positive")
    q = _combine(x, h)
    lo, hi = float(tau), float(tau) + float(T)
    lip = q.sup_derivative(lo, hi)
    limit = 1 / (20 * lip) if lip > 0 else float(T)
    if quad_step is None:
        quad_step = limit
    elif quad_step > limit * (1 + 1e-12):
        raise ValueError(f"quad_step {quad_step} exceeds 1/(20 sup|q'|) = {limit:.3g}")
    n = max(1, math.ceil(float(T) / quad_step))
    cell = float(T) / n
    total = 0j
    for s in range(0, n, 1 << 20):
        idx = np.arange(s, min(n, s + (1 << 20)), dtype=float)
        total += np.exp(2j * np.pi * eval_phase(q, lo + (idx + 0.5) * cell)).sum()
    curv = q.derivative().sup_derivative(lo, hi)
    err = cell**2 / 24 * (2 * math.pi * curv + 4 * math.pi**2 * lip**2)
    return WeylResult(complex(total / n), err, cell)


@dataclasses.dataclass(frozen=True)
class BoxFamily:
    """Axis-parallel boxes on the torus spanned by per-axis breakpoints.

    Every arc between two breakpoints is a candidate side; 0 is always a
    breakpoint.  With ``wrap`` the arcs passing through 0 are included too,
    so the family is closed under complement on each axis.
    """

    breakpoints: tuple
    wrap: bool = True

    def __post_init__(self):
        axes = []
        for bp in self.breakpoints:
            pts = sorted(set(float(b) for b in bp) | {0.0})
            if pts[0] < 0 or pts[-1] >= 1:
                raise ValueError("breakpoints must lie in [0, 1)")
            axes.append(tuple(pts))
        object.__setattr__(self, "breakpoints", tuple(axes))

    @classmethod
    def dyadic(cls, n_axes, level=None, wrap=True) -> "BoxFamily":
        """All boxes with dyadic sides of resolution ``2**-level``."""
        if level is None:
            level = DEFAULTS.dyadic_level if n_axes <= 2 else min(DEFAULTS.dyadic_level, 3)
        m = 2**level
        return cls(tuple(tuple(k / m for k in range(m)) for _ in range(n_axes)), wrap=wrap)

    @property
    def n_axes(self) -> int:
        return len(self.breakpoints)

    def arcs(self, axis):
        """Arc membership matrix over cells and arc lengths for one axis."""
        edges = np.array(self.breakpoints[axis] + (1.0,))
        m = edges.size - 1
        widths = np.diff(edges)
        rows, lengths = [], []
        for i in range(m):
            for j in range(i + 1, m + 1):
                row = np.zeros(m)
                row[i:j] = 1
                rows.append(row)
                lengths.append(edges[j] - edges[i])
                if self.wrap and i > 0 and j < m:
                    rows.append(1 - row)
                    lengths.append(1 - (edges[j] - edges[i]))
        return np.array(rows), np.array(lengths), widths

    @property
    def n_boxes(self) -> int:
        return int(np.prod([self.arcs(d)[0].shape[0] for d in range(self.n_axes)]))


class DiscrepancyEstimate(NamedTuple):
    value: float
    error_bound: float
    step: float
    n_boxes: int


def discrepancy_estimate(x, T, tau=0.0, boxes=None, step=None) -> DiscrepancyEstimate:
    """Lower estimate of the continuous discrepancy of ``x(t + tau)`` on ``[0, T]``.

    The sojourn fraction of each box is measured on midpoints of a grid
    of spacing ``step`` (default ``DEFAULTS.sojourn_step``).
    ``error_bound`` bounds the sampling error of the sojourn fractions:
    every crossing of a box face misclassifies at most one grid cell.
    """
    x = _phase_vector(x)
    n = len(x)
    if n > 3:
        raise ValueError("discrepancy estimation supports at most 3 components")
    if not T > 0:
        raise ValueError("T must be positive")
    if boxes is None:
        boxes = BoxFamily.dyadic(n)
    if boxes.n_axes != n:
        raise ValueError("box family dimension does not match the phase vector")
    step = DEFAULTS.sojourn_step if step is None else step
    lo = float(tau)
    N = max(1, math.ceil(float(T) / step))
    cell = float(T) / N
    arcs = [boxes.arcs(d) for d in range(n)]
    shape = tuple(w.size for _, _, w in arcs)
    hist = np.zeros(int(np.prod(shape)))
    edges = [np.array(boxes.breakpoints[d]) for d in range(n)]
    for s in range(0, N, 1 << 20):
        idx = np.arange(s, min(N, s + (1 << 20)), dtype=float)
        t = lo + (idx + 0.5) * cell
        cells = [np.searchsorted(edges[d], eval_phase(x[d], t), side="right") - 1 for d in range(n)]
        flat = np.ravel_multi_index(cells, shape)
        hist += np.bincount(flat, minlength=hist.size)
    H = hist.reshape(shape) / N
    if n == 1:
        A, L, _ = arcs[0]
        value = float(np.abs(A @ H - L).max())
    elif n == 2:
        (A0, L0, _), (A1, L1, _) = arcs
        value = float(np.abs(A0 @ H @ A1.T - np.outer(L0, L1)).max())
    else:
        (A0, L0, _), (A1, L1, _), (A2, L2, _) = arcs
        vol12 = np.outer(L1, L2)
        value = 0.0
        for row, l0 in zip(A0, L0):
            plane = np.tensordot(row, H, axes=1)
            value = max(value, float(np.abs(A1 @ plane @ A2.T - l0 * vol12).max()))
    crossings = sum(2 * (float(T) * p.sup_derivative(lo, lo + float(T)) + 1) for p in x)
    err = crossings * cell / float(T)
    return DiscrepancyEstimate(value, err, cell, boxes.n_boxes)


def find_L(F, gamma, probes_tau, T_grid, eps_list, probes_a=(0.0,), lattice_bound=10,
           step=None) -> Optional[float]:
    """Empirical interval length after which every probed window is well filled.

    Returns the smallest ``T`` in ``T_grid`` such that for every probed
    window start ``tau``, anchor ``a`` and radius ``delta`` with
    ``(2*delta)**n > gamma``::

        λ(N◁(F, delta, a) ∩ [tau, tau + T)) >= ((2*delta)**n - gamma) * T

    or ``None`` when no grid value passes.  This is an estimate from
    finitely many probes, not a certified constant.

    Raises
    ------
    IndependenceError
        If the phases of ``F`` are not strongly linearly independent.
    """
    F = as_family(F)
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    verdict = is_strongly_independent(list(F), lattice_bound=lattice_bound)
    if not verdict.independent:
        raise IndependenceError(f"family is not strongly independent: witness {verdict.witness}")
    n = len(F)
    deltas = [d for d in eps_list if (2 * d) ** n - gamma > 0]
    for T in sorted(T_grid):
        ok = True
        for tau in probes_tau:
            I = Interval(tau, tau + T)
            for a in probes_a:
                for d in deltas:
                    res = n_left(F, d, a, I, step=step)
                    if isinstance(res.measure, Fraction) and all(is_rational(v) for v in (d, gamma, T)):
                        need = ((2 * as_exact(d)) ** n - as_exact(gamma)) * as_exact(T)
                        good = res.measure >= need
                    else:
                        need = ((2 * float(d)) ** n - float(gamma)) * float(T)
                        good = float(res.measure) - res.error_bound >= need
                    if not good:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return T
    return None


class PhaseEmbedding(TransformerMixin, BaseEstimator):
    """Map times ``t`` to torus coordinates ``(p_1(t), ..., p_n(t)) mod 1``.

    Parameters
    ----------
    phases : sequence of PhasePolynomial or coefficient sequences
    """

    def __init__(self, phases=()):
        self.phases = phases

    def fit(self, X, y=None):
        self.phases_ = _phase_vector(self.phases)
        check_times(X)
        self.n_features_in_ = 1
        self.n_features_out_ = len(self.phases_)
        return self

    def transform(self, X):
        check_is_fitted(self, "phases_")
        t = check_times(X)
        return np.stack([eval_phase(p, t) for p in self.phases_], axis=1)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "phases_")
        return np.array([f"phase{j}" for j in range(self.n_features_out_)], dtype=object)
