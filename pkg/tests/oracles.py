"""Independent reference computations used by the tests.

Nothing here imports the package; each oracle recomputes a quantity from
first principles by a different route than the implementation.
"""

import itertools
import math
from fractions import Fraction

import numpy as np


def _dist_to_int(x: Fraction) -> Fraction:
    r = x - math.floor(x)
    return min(r, 1 - r)


def polar_measure_breakpoints(taus, eps, a, lo, hi) -> Fraction:
    """Exact measure of ``{t in [lo, hi) : ||tau (t - a)|| < eps for all tau}``.

    Every boundary of the set is a solution of ``tau (t - a) = m ± eps``;
    between consecutive boundaries membership is constant, so testing the
    midpoint of each piece in rational arithmetic gives the measure.
    """
    taus = [Fraction(t) for t in taus]
    eps, a, lo, hi = Fraction(eps), Fraction(a), Fraction(lo), Fraction(hi)
    cuts = {lo, hi}
    for tau in taus:
        s = abs(tau)
        u_lo, u_hi = s * (lo - a), s * (hi - a)
        for m in range(math.floor(u_lo) - 1, math.ceil(u_hi) + 2):
            for off in (-eps, eps):
                t = a + (m + off) / s
                if lo < t < hi:
                    cuts.add(t)
    pts = sorted(cuts)
    total = Fraction(0)
    for x, y in zip(pts, pts[1:]):
        mid = (x + y) / 2
        if all(_dist_to_int(tau * (mid - a)) < eps for tau in taus):
            total += y - x
    return total


def polar_measure_grid(taus, eps, a, lo, hi, step) -> float:
    """Midpoint-rule count of the same set."""
    n = int(round((hi - lo) / step))
    t = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    ok = np.ones(n, dtype=bool)
    for tau in taus:
        u = float(tau) * (t - float(a))
        ok &= np.abs(u - np.round(u)) < float(eps)
    return ok.mean() * (hi - lo)


def polar_count_integers(taus, eps, a, lo, hi) -> int:
    """Count integers ``t`` in ``[lo, hi]`` in the polar set, exactly."""
    taus = [Fraction(x) for x in taus]
    return sum(all(_dist_to_int(tau * (t - Fraction(a))) < Fraction(eps) for tau in taus)
               for t in range(lo, hi + 1))


def ts_z_probability_enumerated(N, M, ell) -> Fraction:
    """``P(StL <= M)`` for a uniform ``ell``-subset of ``{0..N}``, by enumeration."""
    hits = total = 0
    for c in itertools.combinations(range(N + 1), ell):
        total += 1
        hits += min(b - a for a, b in zip(c, c[1:])) <= M
    return Fraction(hits, total)


def pair_probability_geometric(N, M) -> Fraction:
    """``P(|x - y| <= M)`` on ``[0, N]^2`` as one minus the two corner triangles."""
    N, M = Fraction(N), Fraction(M)
    return 1 - (N - M) ** 2 / N**2


def aest_bound_direct(N, n, eps, ell) -> float:
    return math.comb(N, n) * (1 - eps**n) ** ell


def chirp_grid_bruteforce(t, n):
    """Every coefficient vector ``(j_r / t**(r+1))_r`` with ``-t**(r+2) <= j_r < t**(r+2)``."""
    ranges = []
    for r in range(n + 1):
        m = t ** (r + 2)
        ranges.append([Fraction(j, t ** (r + 1)) for j in range(-m, m)])
    return list(itertools.product(*ranges))


def lstsq_reference(t, v, phases):
    """Least squares through numpy's SVD solver on the design matrix."""
    A = np.exp(2j * np.pi * np.outer(t, phases))
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    return coef
