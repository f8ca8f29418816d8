"""Circle metric, phase polynomials and interval carriers.

Points of the circle group are represented by their angle in turns, a real
number in ``[0, 1)``.  A phase polynomial ``p`` stands for the unimodular
function ``t -> exp(2*pi*i*p(t))``; evaluating it on the circle means
reducing ``p(t)`` modulo one.

Scalars may be ``int``, :class:`fractions.Fraction` or ``float``.  Exact
inputs stay exact through every operation here, which is what the
character-bound verifiers rely on.  Functions that accept arrays work on
float64 numpy arrays.
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "wrap",
    "angular_distance",
    "in_ball",
    "eval_phase",
    "as_exact",
    "is_rational",
    "PhasePolynomial",
    "character",
    "Interval",
    "IntegerInterval",
    "IntervalUnion",
    "union_intersect",
]


def is_rational(x) -> bool:
    """True for ints and Fractions (not for floats, not for bool)."""
    return isinstance(x, Rational) and not isinstance(x, bool)


def as_exact(x) -> Fraction:
    """Convert a scalar to a Fraction.

    Floats are read through their shortest decimal representation, so
    ``as_exact(0.1) == Fraction(1, 10)``.  Strings such as ``"3/7"`` or
    ``"0.25"`` are accepted.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} exactly")
        return Fraction(repr(float(x)))
    return Fraction(x)


def wrap(x):
    """Reduce modulo one into ``[0, 1)``.

    Floating round-off that would produce exactly ``1.0`` is mapped to 0.
    """
    if isinstance(x, np.ndarray):
        r = np.mod(x, 1.0)
        r[r >= 1.0] = 0.0
        return r
    r = x % 1
    if r >= 1:
        r = 0 * r
    return r


def angular_distance(x, y):
    """Angular distance ``min(|x-y|, 1-|x-y|)`` between circle points.

    Inputs are points in turns; they are reduced modulo one first, so any
    real representatives may be passed.  The result lies in ``[0, 1/2]``.
    """
    d = wrap(x - y)
    if isinstance(d, np.ndarray):
        return np.minimum(d, 1.0 - d)
    return min(d, 1 - d)


def in_ball(x, center, eps):
    """Membership of ``x`` in ``center * V_eps`` (open ball of radius eps)."""
    return angular_distance(x, center) < eps


@dataclasses.dataclass(frozen=True)
class PhasePolynomial:
    """Real polynomial ``p`` standing for the phase function ``exp(2*pi*i*p)``.

    Parameters
    ----------
    coefficients : sequence of scalars
        ``a_0, a_1, ..., a_n`` in increasing degree.  Trailing zeros are
        dropped, so equal polynomials compare equal.
    """

    coefficients: tuple = ()

    def __post_init__(self):
        coefs = list(self.coefficients)
        for c in coefs:
            if not isinstance(c, Real):
                raise TypeError(f"coefficient {c!r} is not a real number")
        while coefs and coefs[-1] == 0:
            coefs.pop()
        object.__setattr__(self, "coefficients", tuple(coefs))

    @classmethod
    def character(cls, tau) -> "PhasePolynomial":
        return cls((0, tau))

    def degree(self) -> int:
        return max(len(self.coefficients) - 1, 0)

    def coefficient(self, r):
        return self.coefficients[r] if r < len(self.coefficients) else 0

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def is_character_like(self) -> bool:
        """Degree at most one; the constant cancels in every neighborhood."""
        return len(self.coefficients) <= 2

    @property
    def frequency(self):
        """Linear coefficient; the frequency ``tau`` of a character."""
        return self.coefficient(1)

    @property
    def is_exact(self) -> bool:
        return all(is_rational(c) for c in self.coefficients)

    def exact(self) -> "PhasePolynomial":
        return PhasePolynomial(tuple(as_exact(c) for c in self.coefficients))

    def float_coefficients(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients], dtype=float)

    def __call__(self, t):
        """Value ``p(t)`` by Horner's rule (not reduced mod 1)."""
        if isinstance(t, np.ndarray) or isinstance(t, (list, tuple)):
            t = np.asarray(t, dtype=float)
            out = np.zeros_like(t)
            for c in self.float_coefficients()[::-1]:
                out = out * t + c
            return out
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def derivative(self) -> "PhasePolynomial":
        return PhasePolynomial(
            tuple(r * c for r, c in enumerate(self.coefficients) if r > 0)
        )

    def sup_abs_bound(self, lo, hi) -> float:
        """Upper bound for ``sup |p|`` on ``[lo, hi]`` from coefficient sizes."""
        m = max(abs(float(lo)), abs(float(hi)))
        return float(sum(abs(float(c)) * m**r for r, c in enumerate(self.coefficients)))

    def sup_derivative(self, lo, hi) -> float:
        """Upper bound for ``sup |p'|`` on ``[lo, hi]``."""
        return self.derivative().sup_abs_bound(lo, hi)

    def __add__(self, other):
        if not isinstance(other, PhasePolynomial):
            other = PhasePolynomial((other,))
        n = max(len(self.coefficients), len(other.coefficients))
        return PhasePolynomial(
            tuple(self.coefficient(r) + other.coefficient(r) for r in range(n))
        )

    __radd__ = __add__

    def __neg__(self):
        return PhasePolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, PhasePolynomial):
            return NotImplemented
        return PhasePolynomial(tuple(scalar * c for c in self.coefficients))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if all(is_rational(c) for c in self.coefficients) and is_rational(scalar):
            return PhasePolynomial(tuple(Fraction(c) / scalar for c in self.coefficients))
        return PhasePolynomial(tuple(c / scalar for c in self.coefficients))

    def __repr__(self):
        return f"PhasePolynomial({list(self.coefficients)!r})"


def character(tau) -> PhasePolynomial:
    """The character ``chi_tau(t) = exp(2*pi*i*tau*t)`` as a phase polynomial."""
    return PhasePolynomial.character(tau)


def eval_phase(p: PhasePolynomial, t):
    """Circle point ``p(t) mod 1`` of the phase function ``psi_p`` at ``t``."""
    return wrap(p(t))


@dataclasses.dataclass(frozen=True, order=True)
class Interval:
    """Closed-open real interval ``[lo, hi)``."""

    lo: Real
    hi: Real

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    @property
    def length(self):
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x < self.hi

    def shift(self, c) -> "Interval":
        return Interval(self.lo + c, self.hi + c)

    def scale(self, c) -> "Interval":
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return Interval(self.lo * c, self.hi * c)

    def exact(self) -> "Interval":
        return Interval(as_exact(self.lo), as_exact(self.hi))


@dataclasses.dataclass(frozen=True)
class IntegerInterval:
    """Integer interval ``{lo, ..., hi}`` with counting measure."""

    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise TypeError("integer interval endpoints must be integers")
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "hi", int(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    @property
    def cardinality(self) -> int:
        return self.hi - self.lo + 1

    length = cardinality

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi and x == int(x)

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))


def _normalize(pairs: Iterable) -> tuple:
    spans = sorted((lo, hi) for lo, hi in pairs if lo < hi)
    merged = []
    for lo, hi in spans:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple(Interval(lo, hi) for lo, hi in merged)


@dataclasses.dataclass(frozen=True)
class IntervalUnion:
    """Finite union of disjoint closed-open intervals.

    Parts are kept sorted; overlapping or touching parts are merged on
    construction, so two unions describing the same set compare equal.
    """

    parts: tuple = ()

    def __post_init__(self):
        pairs = [(p.lo, p.hi) if isinstance(p, Interval) else tuple(p) for p in self.parts]
        object.__setattr__(self, "parts", _normalize(pairs))

    @classmethod
    def from_pairs(cls, pairs) -> "IntervalUnion":
        return cls(tuple(pairs))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @property
    def total_length(self):
        return sum((p.length for p in self.parts), 0)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def pairs(self):
        return [(p.lo, p.hi) for p in self.parts]

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        a, b = self.parts, other.parts
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i].lo, b[j].lo)
            hi = min(a[i].hi, b[j].hi)
            if lo < hi:
                out.append((lo, hi))
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return IntervalUnion(tuple(out))

    __and__ = intersect

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.pairs() + other.pairs())

    __or__ = union

    def clip(self, interval: Interval) -> "IntervalUnion":
        return self.intersect(IntervalUnion((interval,)))

    def shift(self, c) -> "IntervalUnion":
        return IntervalUnion(tuple((p.lo + c, p.hi + c) for p in self.parts))

    def scale(self, c) -> "IntervalUnion":
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return IntervalUnion(tuple((p.lo * c, p.hi * c) for p in self.parts))

    def __contains__(self, x) -> bool:
        k = bisect.bisect_right([p.lo for p in self.parts], x) - 1
        return k >= 0 and x < self.parts[k].hi

    def contains_array(self, x) -> np.ndarray:
        """Vectorized membership for a float array."""
        x = np.asarray(x, dtype=float)
        if not self.parts:
            return np.zeros(x.shape, dtype=bool)
        los = np.array([float(p.lo) for p in self.parts])
        his = np.array([float(p.hi) for p in self.parts])
        k = np.searchsorted(los, x, side="right") - 1
        ok = k >= 0
        kk = np.where(ok, k, 0)
        return ok & (x < his[kk])

    def covers(self, interval: Interval) -> bool:
        """True iff ``interval`` is contained in the union."""
        if interval.length == 0:
            return True
        k = bisect.bisect_right([p.lo for p in self.parts], interval.lo) - 1
        return k >= 0 and interval.hi <= self.parts[k].hi


def union_intersect(a: IntervalUnion, b: IntervalUnion) -> IntervalUnion:
    """Exact set intersection of two interval unions."""
    return a.intersect(b)
