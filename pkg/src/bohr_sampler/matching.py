"""Matching sets, sampling inequalities and coefficient reconstruction.

A point set is an ``(F, I, eps)``-matching set when every anchor of ``I``
has a companion in the set at which all members of ``F`` take values within
``eps`` of their values at the anchor.  Matching sets satisfy a sampling
inequality with constant ``(6*pi + 2) * eps`` for trigonometric polynomials
whose phases factor through ``F``; :func:`mat_to_samp_certificate` checks
that inequality on random polynomials.

:class:`TrigRegressor` fits the coefficients of a finite phase expansion
from samples, which is the finite-dimensional face of uniqueness: a
well-conditioned design matrix on a set means no nonzero combination of
those phases vanishes there.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_phase, check_eps, check_times, check_values
from .config import DEFAULTS
from .core import Interval, PhasePolynomial, angular_distance, eval_phase
from .exceptions import HypothesisError, RankDeficiencyError
from .neighborhoods import FunctionFamily, as_family, n_right_check

__all__ = [
    "MATCHING_TO_SAMPLING_FACTOR",
    "TrigPolynomial",
    "PointSet",
    "MatchingReport",
    "SamplingReport",
    "CertificateReport",
    "ReconstructionResult",
    "default_probes",
    "is_matching_set",
    "sup_norm_estimate",
    "sampling_inequality_check",
    "mat_to_samp_certificate",
    "random_trig_polynomial",
    "reconstruct_coefficients",
    "TrigRegressor",
]

MATCHING_TO_SAMPLING_FACTOR = 6 * math.pi + 2


class TrigPolynomial:
    """Finite combination ``sum_j alpha_j * psi_{p_j}`` with distinct phases."""

    def __init__(self, terms):
        terms = [(complex(c), as_phase(p)) for c, p in terms]
        phases = [p for _, p in terms]
        if len(set(phases)) != len(phases):
            raise ValueError("phases must be pairwise distinct")
        self.terms = tuple(terms)

    @classmethod
    def from_arrays(cls, coefficients, phases) -> "TrigPolynomial":
        return cls(zip(coefficients, phases))

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def phases(self) -> FunctionFamily:
        return FunctionFamily(p for _, p in self.terms)

    @property
    def a_norm(self) -> float:
        """Absolute coefficient sum, the norm of the summable-coefficient algebra."""
        return float(sum(abs(c) for c, _ in self.terms))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for c, p in self.terms:
            out += c * np.exp(2j * np.pi * eval_phase(p, t))
        return out

    def lipschitz_bound(self, lo, hi) -> float:
        return 2 * math.pi * sum(abs(c) * p.sup_derivative(lo, hi) for c, p in self.terms)

    def __repr__(self):
        return f"TrigPolynomial({list(self.terms)!r})"


class PointSet:
    """Sorted, duplicate-free finite subset of ℝ or ℤ.

    ``block_index`` optionally tags each point with the block it was drawn
    from.
    """

    def __init__(self, points=(), block_index=None):
        pts = np.asarray(points, dtype=float).reshape(-1)
        if block_index is None:
            pts, idx = np.unique(pts), None
        else:
            blocks = np.asarray(block_index, dtype=int).reshape(-1)
            if blocks.shape != pts.shape:
                raise ValueError("block_index must align with points")
            pts, first = np.unique(pts, return_index=True)
            idx = blocks[first]
            idx.setflags(write=False)
        pts.setflags(write=False)
        self.points = pts
        self.block_index = idx

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)

    def __eq__(self, other):
        return isinstance(other, PointSet) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"PointSet(n={len(self)})"

    def restrict(self, lo, hi) -> "PointSet":
        keep = (self.points >= lo) & (self.points <= hi)
        idx = None if self.block_index is None else self.block_index[keep]
        return PointSet(self.points[keep], idx)

    def union(self, other) -> "PointSet":
        return PointSet(np.concatenate((self.points, np.asarray(other, dtype=float))))


def _as_points(Lambda) -> np.ndarray:
    if isinstance(Lambda, PointSet):
        return Lambda.points
    return np.unique(np.asarray(Lambda, dtype=float).reshape(-1))


def default_probes(I: Interval, seed=None, n_grid=None, n_random=None) -> np.ndarray:
    """Uniform grid plus seeded uniform points in ``I`` (probe anchors)."""
    n_grid = DEFAULTS.probe_grid if n_grid is None else n_grid
    n_random = DEFAULTS.probe_random if n_random is None else n_random
    seed = DEFAULTS.seed if seed is None else seed
    lo, hi = float(I.lo), float(I.hi)
    grid = np.linspace(lo, hi, n_grid, endpoint=False) if n_grid else np.empty(0)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9E3779B9]))
    return np.concatenate((grid, lo + (hi - lo) * rng.random(n_random)))


@dataclasses.dataclass
class MatchingReport:
    """Outcome of a matching check on a finite probe set.

    ``witnesses[i]`` is the chosen companion of ``probes[i]`` (NaN on
    failure); ``gaps[i]`` is its largest angular deviation over the family.
    """

    passed: bool
    probes: np.ndarray
    per_probe: np.ndarray
    witnesses: np.ndarray
    gaps: np.ndarray
    eps: float
    family: FunctionFamily

    @property
    def coverage(self) -> dict:
        return {"family": [list(p.coefficients) for p in self.family],
                "eps": float(self.eps), "n_probes": int(self.probes.shape[0])}

    @property
    def n_failed(self) -> int:
        return int((~self.per_probe).sum())


def is_matching_set(Lambda, F, probes, eps) -> MatchingReport:
    """Check the matching property of ``Lambda`` at each probe anchor.

    For every probe ``a`` the companion chosen is the point of ``Lambda``
    minimizing the largest deviation ``max_p d_a(psi_p(x), psi_p(a))``;
    the probe passes when that deviation is below ``eps``.
    """
    F = as_family(F)
    check_eps(eps)
    pts = _as_points(Lambda)
    probes = np.asarray(probes, dtype=float).reshape(-1)
    if probes.size == 0:
        raise ValueError("probe set must be nonempty")
    k = probes.shape[0]
    if pts.size == 0:
        return MatchingReport(False, probes, np.zeros(k, bool), np.full(k, np.nan),
                              np.full(k, np.inf), eps, F)
    own = np.stack([eval_phase(p, pts) for p in F], axis=1) if len(F) else np.zeros((pts.size, 0))
    ref = np.stack([eval_phase(p, probes) for p in F], axis=1) if len(F) else np.zeros((k, 0))
    best_gap = np.empty(k)
    best_idx = np.empty(k, dtype=int)
    chunk = max(1, 4_000_000 // max(pts.size, 1))
    for s in range(0, k, chunk):
        sl = slice(s, min(k, s + chunk))
        dev = np.zeros((sl.stop - sl.start, pts.size))
        for j in range(own.shape[1]):
            np.maximum(dev, angular_distance(own[None, :, j], ref[sl, None, j]), out=dev)
        best_idx[sl] = np.argmin(dev, axis=1)
        best_gap[sl] = dev[np.arange(dev.shape[0]), best_idx[sl]]
    ok = best_gap < eps
    witnesses = np.where(ok, pts[best_idx], np.nan)
    return MatchingReport(bool(ok.all()), probes, ok, witnesses, best_gap, eps, F)


def sup_norm_estimate(f: TrigPolynomial, I: Interval, step) -> float:
    """Grid maximum of ``|f|`` on ``I``.

    The grid includes both endpoints with spacing at most ``step``; the
    true sup exceeds the estimate by at most ``f.lipschitz_bound * step / 2``.
    """
    if not step > 0:
        raise ValueError("grid step must be positive")
    lo, hi = float(I.lo), float(I.hi)
    n = max(1, math.ceil((hi - lo) / step))
    best = 0.0
    for s in range(0, n + 1, 1 << 20):
        idx = np.arange(s, min(n + 1, s + (1 << 20)), dtype=float)
        t = lo + (hi - lo) * idx / n
        best = max(best, float(np.max(np.abs(f(t)))))
    return best


@dataclasses.dataclass
class SamplingReport:
    lhs: float
    rhs: float
    margin: float
    passed: bool
    grid_tolerance: float


def sampling_inequality_check(f: TrigPolynomial, Lambda, I: Interval, eps, step) -> SamplingReport:
    """Evaluate ``||f|_I||_inf <= eps * ||f||_A + ||f|_Lambda||_inf``.

    The verdict allows a relative roundoff of ``1e-12`` (unimodular terms
    evaluate to ``1 + ulp``); ``margin`` is reported unadjusted.
    """
    pts = _as_points(Lambda)
    if pts.size and (pts.min() < float(I.lo) or pts.max() > float(I.hi)):
        raise ValueError("sampling set must lie inside the window")
    lhs = sup_norm_estimate(f, I, step)
    on_set = float(np.max(np.abs(f(pts)))) if pts.size else 0.0
    rhs = float(eps) * f.a_norm + on_set
    tol = f.lipschitz_bound(I.lo, I.hi) * step / 2
    return SamplingReport(lhs=lhs, rhs=rhs, margin=rhs - lhs, passed=lhs <= rhs + 1e-12 * max(1.0, rhs),
                          grid_tolerance=tol)


def random_trig_polynomial(J, rng, max_terms=8) -> TrigPolynomial:
    """Random polynomial over ``J``: 1..max_terms distinct phases, unit-disc coefficients."""
    J = as_family(J)
    n_terms = int(rng.integers(1, min(max_terms, len(J)) + 1))
    chosen = rng.choice(len(J), size=n_terms, replace=False)
    coefs = np.sqrt(rng.random(n_terms)) * np.exp(2j * np.pi * rng.random(n_terms))
    return TrigPolynomial.from_arrays(coefs, [J[int(i)] for i in chosen])


@dataclasses.dataclass
class CertificateReport:
    constant: float
    trials: int
    margins: np.ndarray
    worst_margin: float
    tolerance: float
    falsified: bool
    passed: bool
    factorization: list
    matching: MatchingReport


def mat_to_samp_certificate(Lambda, F, J, I: Interval, eps, trials, seed,
                            probes=None, step=None) -> CertificateReport:
    """Randomized check that a matching set samples polynomials over ``J``.

    The premises are gated first: ``Lambda`` must match ``F`` on the probe
    anchors, and each member of ``J`` must factor as a member of ``F``
    times a phase mapping ``I`` into ``V_eps``.  If either fails a
    :class:`HypothesisError` is raised.  Then ``trials`` random polynomials
    over ``J`` are tested against the inequality with constant
    ``(6*pi + 2) * eps``; trial ``i`` uses the stream seeded by ``(seed, i)``.
    """
    F, J = as_family(F), as_family(J)
    check_eps(eps)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    step = DEFAULTS.sup_step if step is None else step
    if probes is None:
        probes = default_probes(I, seed=seed)
    match = is_matching_set(Lambda, F, probes, eps)
    if not match.passed:
        raise HypothesisError(f"not a matching set: {match.n_failed} probe anchors unmatched")
    factorization = []
    for phi in J:
        for psi in F:
            kappa = phi - psi
            lip = kappa.sup_derivative(I.lo, I.hi)
            nr_step = step if lip == 0 else min(step, float(eps) / (4 * lip))
            if kappa.is_zero or n_right_check(kappa, I, eps, nr_step):
                factorization.append((phi, psi))
                break
        else:
            raise HypothesisError(f"{phi!r} does not factor through the family on this window")
    constant = MATCHING_TO_SAMPLING_FACTOR * float(eps)
    margins = np.empty(trials)
    tol = 0.0
    for i in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        f = random_trig_polynomial(J, rng)
        rep = sampling_inequality_check(f, Lambda, I, constant, step)
        margins[i] = rep.margin
        tol = max(tol, rep.grid_tolerance)
    worst = float(margins.min())
    return CertificateReport(
        constant=constant, trials=trials, margins=margins, worst_margin=worst,
        tolerance=tol, falsified=worst < -tol, passed=worst >= 0,
        factorization=factorization, matching=match,
    )


@dataclasses.dataclass
class ReconstructionResult:
    coefficients: np.ndarray
    condition_number: float
    rank: int
    residual: float


class TrigRegressor(BaseEstimator):
    """Least-squares fit of a finite phase expansion to complex samples.

    Parameters
    ----------
    phases : sequence of PhasePolynomial
        The phases ``p_j`` of the model ``sum_j alpha_j exp(2*pi*i*p_j(t))``.
    rcond : float
        Singular values below ``rcond * s_max`` count as zero when deciding
        the rank.

    Attributes
    ----------
    coef_ : ndarray of complex, shape (n_phases,)
    condition_number_ : float
        Ratio of extreme singular values of the design matrix.
    rank_ : int
    singular_values_ : ndarray

    Notes
    -----
    The solve goes through the SVD of the design matrix; the normal
    equations are never formed.
    """

    def __init__(self, phases=(), rcond=DEFAULTS.rcond):
        self.phases = phases
        self.rcond = rcond

    def _family(self):
        return as_family(self.phases)

    def design_matrix(self, X) -> np.ndarray:
        t = check_times(X)
        fam = self._family()
        if not len(fam):
            return np.zeros((t.shape[0], 0), dtype=complex)
        return np.exp(2j * np.pi * np.stack([eval_phase(p, t) for p in fam], axis=1))

    def fit(self, X, y):
        A = self.design_matrix(X)
        m, n = A.shape
        v = check_values(y, m, name="y")
        if n == 0:
            raise ValueError("no phases to fit")
        if m < n:
            raise RankDeficiencyError(f"{m} samples cannot determine {n} coefficients", rank=m)
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
        cond = float(s[0] / s[-1]) if s[-1] > 0 else math.inf
        rank = int(np.sum(s > self.rcond * s[0]))
        if rank < n:
            raise RankDeficiencyError(
                f"design matrix has rank {rank} < {n}: uniqueness fails on this set",
                rank=rank, condition_number=cond,
            )
        self.coef_ = Vh.conj().T @ ((U.conj().T @ v) / s)
        self.singular_values_ = s
        self.condition_number_ = cond
        self.rank_ = rank
        self.residual_ = float(np.linalg.norm(A @ self.coef_ - v))
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "coef_")
        return self.design_matrix(X) @ self.coef_


def reconstruct_coefficients(samples, phases, rcond=DEFAULTS.rcond) -> ReconstructionResult:
    """Recover coefficients from ``(t, value)`` samples of a phase expansion.

    Raises
    ------
    RankDeficiencyError
        When there are fewer samples than phases or the design matrix is
        numerically rank deficient.
    """
    samples = list(samples)
    if not samples:
        raise RankDeficiencyError("no samples", rank=0)
    t = np.array([s[0] for s in samples], dtype=float)
    v = np.array([s[1] for s in samples], dtype=complex)
    reg = TrigRegressor(phases=phases, rcond=rcond).fit(t, v)
    return ReconstructionResult(reg.coef_, reg.condition_number_, reg.rank_, reg.residual_)
