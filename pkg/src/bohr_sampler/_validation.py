"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

from numbers import Real

import numpy as np
from sklearn.utils import check_array

from .core import Interval, IntegerInterval, PhasePolynomial, as_exact


def check_times(t, name="t"):
    """Return sample locations as a finite 1-D float array.

    Accepts a 1-D array-like, or a single-column 2-D array as produced by
    scikit-learn pipelines.
    """
    arr = check_array(t, ensure_2d=False, dtype=np.float64)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must be 1-D or a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    return arr


def check_values(v, n, name="values"):
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.shape[0] != n:
        raise ValueError(f"{name} has {arr.shape[0]} entries, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_eps(eps, upper=None, name="eps"):
    if not isinstance(eps, Real) or not eps > 0:
        raise ValueError(f"{name} must be a positive real, got {eps!r}")
    if upper is not None and not eps < upper:
        raise ValueError(f"{name} must be below {upper}, got {eps!r}")
    return eps


def check_positive_int(x, name, minimum=1):
    if int(x) != x or x < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {x!r}")
    return int(x)


def check_interval(I):
    if isinstance(I, (Interval, IntegerInterval)):
        return I
    lo, hi = I
    return Interval(lo, hi)


def as_phase(p):
    """Coerce a phase polynomial, a coefficient sequence or a bare frequency."""
    if isinstance(p, PhasePolynomial):
        return p
    if isinstance(p, Real):
        return PhasePolynomial.character(p)
    return PhasePolynomial(tuple(p))


def parse_scalar(text, exact=True):
    """Parse ``"3/7"``, ``"0.25"`` or ``"sqrt(2)"`` from the command line.

    Rational spellings become Fractions when ``exact`` is set; ``sqrt(x)``
    always yields a float.
    """
    text = text.strip()
    if text.startswith("sqrt(") and text.endswith(")"):
        return float(np.sqrt(float(parse_scalar(text[5:-1], exact=False))))
    if text.startswith("-sqrt(") and text.endswith(")"):
        return -float(np.sqrt(float(parse_scalar(text[6:-1], exact=False))))
    if exact:
        try:
            return as_exact(text)
        except (ValueError, ZeroDivisionError):
            pass
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)
