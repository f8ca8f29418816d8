"""Exact verification of measure bounds for rational and lacunary character families.

Everything on the rational path runs in :class:`fractions.Fraction`
arithmetic.  The witness construction is replayed literally: for every
residue multi-index an integer is located, a witness interval of length
``eps`` next to it is proposed, and containment in the exact carrier of
``N◁(F, eps) ∩ I`` is verified rather than assumed.  Certification of the
measure inequality rests on the exact carrier itself, so a witness that
cannot be placed is reported instead of silently counted.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import Interval, IntervalUnion, PhasePolynomial, as_exact, is_rational
from .exceptions import HypothesisError
from .neighborhoods import FunctionFamily, character_carrier, in_P_family, membership, n_left_exact

__all__ = [
    "RationalCharacterFamily",
    "Witness",
    "BlockCertificate",
    "WitnessReport",
    "ReductionReport",
    "LacunaryReport",
    "eqint_check",
    "eqint_case",
    "mfetnei1_witnesses",
    "mfetnei_reduce",
    "mfetneisimpl_reduce",
    "sparse_lacunary_interval",
]


@dataclasses.dataclass(frozen=True)
class RationalCharacterFamily:
    """Characters with frequencies ``q_1/p_1 < ... < q_n/p_n``, all positive.

    Parameters
    ----------
    fractions : sequence of (q, p) pairs of positive integers
        Kept as given; ``values`` and ``denominators`` use reduced form.
    """

    fractions: tuple

    def __post_init__(self):
        pairs = []
        for q, p in self.fractions:
            if int(q) != q or int(p) != p or q <= 0 or p <= 0:
                raise ValueError(f"fraction ({q}, {p}) must have positive integer parts")
            pairs.append((int(q), int(p)))
        if not pairs:
            raise ValueError("family must be nonempty")
        vals = [Fraction(q, p) for q, p in pairs]
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise ValueError("fractions must be strictly increasing")
        object.__setattr__(self, "fractions", tuple(pairs))

    @classmethod
    def from_values(cls, values) -> "RationalCharacterFamily":
        fr = [as_exact(v) for v in values]
        return cls(tuple((f.numerator, f.denominator) for f in fr))

    @property
    def n(self) -> int:
        return len(self.fractions)

    @property
    def values(self) -> tuple:
        return tuple(Fraction(q, p) for q, p in self.fractions)

    @property
    def is_reduced(self) -> bool:
        return all(math.gcd(q, p) == 1 for q, p in self.fractions)

    @property
    def denominators(self) -> tuple:
        return tuple(v.denominator for v in self.values)

    @property
    def numerators(self) -> tuple:
        return tuple(v.numerator for v in self.values)

    @property
    def block_length(self) -> int:
        """Product of the reduced denominators of all but the last member."""
        return math.prod(self.denominators[:-1])

    def family(self) -> FunctionFamily:
        return FunctionFamily(PhasePolynomial.character(v) for v in self.values)

    def scaled(self, c) -> "RationalCharacterFamily":
        return RationalCharacterFamily.from_values(v * as_exact(c) for v in self.values)


def _as_family(F) -> RationalCharacterFamily:
    if isinstance(F, RationalCharacterFamily):
        return F
    items = list(F)
    if items and all(isinstance(x, tuple) and len(x) == 2 for x in items):
        return RationalCharacterFamily(tuple(items))
    return RationalCharacterFamily.from_values(items)


def _check_eps(eps) -> Fraction:
    e = as_exact(eps)
    if not 0 < e < Fraction(1, 2):
        raise HypothesisError(f"eps must lie in (0, 1/2), got {eps}")
    return e


def eqint_check(ps, eps) -> tuple:
    """Both sides of ``eps * (prod_k (2*floor(p_k*eps) + 1) + 1) >= 2 * eps**n * N``.

    ``ps`` lists ``p_1, ..., p_{n-1}`` so ``n = len(ps) + 1``.
    Returns ``(lhs, rhs, holds)`` in exact arithmetic.
    """
    e = as_exact(eps)
    ps = [int(p) for p in ps]
    lhs = e * (math.prod(2 * math.floor(p * e) + 1 for p in ps) + 1)
    rhs = 2 * e ** (len(ps) + 1) * math.prod(ps)
    return lhs, rhs, lhs >= rhs


def _cmp_sqrt_threshold(x: Fraction) -> int:
    """Sign of ``x - 1/(2 - sqrt 2)``, decided without irrational arithmetic."""
    # x (2 - sqrt 2) vs 1  <=>  2x - 1 vs sqrt(2) x, both sides compared after squaring
    u = 2 * x - 1
    if u <= 0:
        return -1
    d = u * u - 2 * x * x
    return (d > 0) - (d < 0)


def eqint_case(ps, eps) -> str:
    """Which branch of the case analysis for the witness-length inequality applies.

    ``"two_large"`` when two indices have ``p*eps >= 1/(2 - sqrt 2)``,
    ``"one_moderate"`` when some ``1 <= p*eps <= 1/(2 - sqrt 2)``, and
    ``"at_most_one_large"`` otherwise.  The irrational threshold is
    compared after squaring, so the test is exact.
    """
    e = as_exact(eps)
    xs = [int(p) * e for p in ps]
    if sum(_cmp_sqrt_threshold(x) >= 0 for x in xs) >= 2:
        return "two_large"
    if any(x >= 1 and _cmp_sqrt_threshold(x) <= 0 for x in xs):
        return "one_moderate"
    return "at_most_one_large"


@dataclasses.dataclass(frozen=True)
class Witness:
    """Integer ``z`` for residue multi-index ``index`` and its witness interval.

    ``side`` is ``"left"``, ``"right"`` or ``"both"`` when the proposed
    interval lies in the carrier, and ``"none"`` when neither side does.
    ``clipped`` marks intervals cut back to the block.
    """

    index: tuple
    z: int
    side: str
    interval: Optional[Interval]
    clipped: bool = False


@dataclasses.dataclass(frozen=True)
class BlockCertificate:
    block: Interval
    witnesses: tuple
    unrealized: tuple
    accumulated_length: Fraction
    carrier_measure: Fraction
    threshold: Fraction

    @property
    def certified(self) -> bool:
        return self.carrier_measure >= self.threshold


@dataclasses.dataclass(frozen=True)
class WitnessReport:
    """Outcome of the witness construction on every full block of ``I``.

    Attributes
    ----------
    witnesses : tuple of Witness
        All witnesses of all blocks, in block order.
    intervals : IntervalUnion
        Union of the verified witness intervals.
    accumulated_length : Fraction
        Total length of verified witness intervals, counted per witness.
    length_target : Fraction
        ``eps * (prod_k (2*floor(p_k*eps) + 1) + 1)`` per block.
    carrier : IntervalUnion
        Exact ``N◁(F, eps) ∩ I``.
    certified : bool
        Every block carries at least ``2 eps**n N`` and the window at least
        ``eps**n λ(I)``, both measured on the exact carrier.
    """

    family: RationalCharacterFamily
    eps: Fraction
    window: Interval
    N: int
    blocks: tuple
    witnesses: tuple
    intervals: IntervalUnion
    accumulated_length: Fraction
    length_target: Fraction
    carrier: IntervalUnion
    carrier_measure: Fraction
    window_threshold: Fraction
    certified: bool

    @property
    def all_witnesses_placed(self) -> bool:
        return all(w.side != "none" and not w.clipped for w in self.witnesses)


def _offset(z, fr: Fraction) -> Fraction:
    # signed representative of fr*z mod 1 in [-1/2, 1/2)
    r = (fr * z) % 1
    return r - 1 if r >= Fraction(1, 2) else r


def _block_witnesses(fam: RationalCharacterFamily, eps: Fraction, block: Interval,
                     carrier: IntervalUnion):
    vals = fam.values[:-1]
    ps = fam.denominators[:-1]
    index_sets = []
    for p in ps:
        f = math.floor(p * eps)
        index_sets.append(sorted(set(range(0, f + 1)) | set(range(p - f, p))))
    first = {}
    z = math.ceil(block.lo)
    while z < block.hi:
        key = tuple(int((v * z) % 1 * p) for v, p in zip(vals, ps))
        first.setdefault(key, z)
        z += 1
    witnesses, unrealized = [], []
    for idx in itertools.product(*index_sets):
        if idx not in first:
            unrealized.append(idx)
            continue
        z = first[idx]
        left, right = Interval(z - eps, z), Interval(z, z + eps)
        if not any(idx):
            cand = [("both", Interval(z - eps, z + eps))]
        else:
            # Positive offsets are reached from the left, negative ones from the right.
            order = ("left", "right") if sum(_offset(z, v) for v in vals) > 0 else ("right", "left")
            cand = [(s, left if s == "left" else right) for s in order]
        chosen = Witness(idx, z, "none", None)
        for side, iv in cand:
            lo, hi = max(iv.lo, block.lo), min(iv.hi, block.hi)
            cut = Interval(lo, hi)
            if carrier.covers(cut):
                chosen = Witness(idx, z, side, cut, clipped=(cut != iv))
                break
        witnesses.append(chosen)
    return witnesses, unrealized


def mfetnei1_witnesses(F, eps, I: Interval) -> WitnessReport:
    """Replay the witness construction for ``q_1/p_1 < ... < q_n/p_n = 1``.

    Parameters
    ----------
    F : RationalCharacterFamily or sequence of (q, p) pairs or rationals
        Members are reduced before use, which can only shrink ``N``.
    eps : rational in (0, 1/2)
    I : Interval
        Window of length at least ``N = p_1 ... p_{n-1}``.

    Returns
    -------
    WitnessReport

    Raises
    ------
    HypothesisError
        Last fraction not equal to 1, ``eps`` outside ``(0, 1/2)`` or
        ``λ(I) < N``.
    """
    fam = _as_family(F)
    if fam.values[-1] != 1:
        raise HypothesisError("the largest frequency must equal 1; rescale with mfetnei_reduce")
    e = _check_eps(eps)
    I = I.exact()
    N = fam.block_length
    if I.length < N:
        raise HypothesisError(f"window length {I.length} is below p_1...p_(n-1) = {N}")
    n = fam.n
    chars = fam.family()
    n_blocks = int(I.length // N)
    blocks = []
    all_w = []
    for b in range(n_blocks):
        block = Interval(I.lo + b * N, I.lo + (b + 1) * N)
        carrier = n_left_exact(chars, e, 0, block, exact=True).carrier
        ws, missing = _block_witnesses(fam, e, block, carrier)
        acc = sum((w.interval.length for w in ws if w.interval is not None), Fraction(0))
        blocks.append(BlockCertificate(block, tuple(ws), tuple(missing), acc,
                                       carrier.total_length, 2 * e**n * N))
        all_w.extend(ws)
    total = n_left_exact(chars, e, 0, I, exact=True)
    threshold = e**n * I.length
    intervals = IntervalUnion(tuple(w.interval for w in all_w if w.interval is not None))
    lhs, _, _ = eqint_check(fam.denominators[:-1], e)
    return WitnessReport(
        family=fam, eps=e, window=I, N=N, blocks=tuple(blocks), witnesses=tuple(all_w),
        intervals=intervals,
        accumulated_length=sum((b.accumulated_length for b in blocks), Fraction(0)),
        length_target=lhs, carrier=total.carrier, carrier_measure=total.measure,
        window_threshold=threshold,
        certified=all(b.certified for b in blocks) and total.measure >= threshold,
    )


@dataclasses.dataclass(frozen=True)
class ReductionReport:
    """Result of a rescaling reduction; truthy iff the family is in 𝔓.

    ``scaling_identity`` records whether the carrier computed on ``I``
    equals the rescaled-problem carrier mapped back, in exact arithmetic.
    """

    verdict: bool
    threshold: Fraction
    scale: Fraction
    scaling_identity: bool
    witness_report: WitnessReport

    def __bool__(self):
        return self.verdict


def _reduce(fam: RationalCharacterFamily, eps, I: Interval, scale: Fraction, threshold) -> ReductionReport:
    e = _check_eps(eps)
    I = I.exact()
    if I.length < threshold:
        raise HypothesisError(f"window length {I.length} is below the required {threshold}")
    scaled_fam = fam.scaled(1 / scale)
    scaled_I = I.scale(scale)
    rep = mfetnei1_witnesses(scaled_fam, e, scaled_I)
    direct = n_left_exact(fam.family(), e, 0, I, exact=True).carrier
    identity = rep.carrier.scale(1 / scale) == direct
    verdict = in_P_family(fam.family(), I, fam.n, e, exact=True)
    return ReductionReport(verdict, Fraction(threshold), scale, identity, rep)


def mfetnei_reduce(F, eps, I: Interval) -> ReductionReport:
    """𝔓-membership of a general rational family by rescaling to top frequency 1.

    Requires ``λ(I) >= p_1 ... p_n * q_n**(n-2)`` (reduced fractions).
    """
    fam = _as_family(F)
    qs, ps = fam.numerators, fam.denominators
    threshold = Fraction(math.prod(ps)) * Fraction(qs[-1]) ** (fam.n - 2)
    return _reduce(fam, eps, I, fam.values[-1], threshold)


def mfetneisimpl_reduce(F, eps, I: Interval) -> ReductionReport:
    """Shorter-window variant for a family ``q_j/p`` with one common denominator.

    Requires ``λ(I) >= p * q_n**(n-2)``; the common denominator is read
    from the fractions as given, before reduction.
    """
    fam = _as_family(F)
    dens = {p for _, p in fam.fractions}
    if len(dens) != 1:
        raise HypothesisError(f"fractions must share one denominator, got {sorted(dens)}")
    p = dens.pop()
    qn = fam.fractions[-1][0]
    threshold = Fraction(p) * Fraction(qn) ** (fam.n - 2)
    return _reduce(fam, eps, I, fam.values[-1], threshold)


@dataclasses.dataclass(frozen=True)
class LacunaryReport:
    """Nested-interval construction for a lacunary character family.

    ``interval`` is the last link ``I_n`` of the chain actually built;
    ``nominal_length`` is ``(2 eps)**n / tau_1``.  ``length_matches`` tells
    whether they agree.  ``contained`` is exact containment of ``I_n`` in
    the carrier of ``N◁(F, eps) ∩ I``; ``points_verified`` repeats the
    check by evaluating the characters at interior sample points of ``I_n``.
    ``p_family`` is the 𝔓 verdict from the exact carrier measure.
    """

    interval: Optional[Interval]
    chain: tuple
    nominal_length: object
    achieved_length: object
    length_matches: bool
    chain_complete: bool
    contained: bool
    points_verified: bool
    p_family: bool
    n_blocks: int
    block_lengths: tuple


def sparse_lacunary_interval(taus, eps, I: Interval, tol=1e-12) -> LacunaryReport:
    """Build the chain ``I ⊇ I_1 ⊇ ... ⊇ I_n`` for ``tau_{j+1}/tau_j > 1/(2 eps)``.

    ``I_k`` is the longest component of ``I_{k-1} ∩ chi_{tau_k}^{-1}(V_eps)``,
    starting from ``I_0 = I``.  The same construction is repeated on each
    of the ``floor(tau_1 λ(I))`` blocks of length ``1/tau_1``; a block that
    begins inside an arc can only offer split pieces of it.

    Raises
    ------
    HypothesisError
        Ratio condition violated (strictly), ``eps`` outside ``(0, 1/2)``,
        nonpositive or non-increasing frequencies, or ``λ(I) < 1/tau_1``.
    """
    taus = list(taus)
    if not taus or any(not t > 0 for t in taus):
        raise HypothesisError("frequencies must be positive")
    if any(a >= b for a, b in zip(taus, taus[1:])):
        raise HypothesisError("frequencies must be strictly increasing")
    if not 0 < eps < 0.5:
        raise HypothesisError(f"eps must lie in (0, 1/2), got {eps}")
    exact = all(is_rational(x) for x in taus + [eps, I.lo, I.hi])
    if exact:
        taus = [as_exact(t) for t in taus]
        eps, I = as_exact(eps), I.exact()
    for a, b in zip(taus, taus[1:]):
        if not b * 2 * eps > a:
            raise HypothesisError(f"ratio {b}/{a} does not exceed 1/(2 eps)")
    period = 1 / taus[0]
    if I.length < period:
        raise HypothesisError(f"window length {I.length} is below 1/tau_1 = {period}")
    n = len(taus)
    nominal = (2 * eps) ** n / taus[0]
    family = FunctionFamily.characters(*taus)
    n_blocks = int(I.length // period) if exact else int(math.floor(float(I.length) * float(taus[0]) + 1e-12))

    def chain_on(block):
        links = [block]
        cur = block
        for tau in taus:
            comps = character_carrier(tau, eps, 0, cur).parts
            if not comps:
                return links, False
            cur = max(comps, key=lambda c: c.length)
            links.append(cur)
        return links, True

    chain, complete = chain_on(I)
    block_lengths = []
    for b in range(n_blocks):
        links, ok = chain_on(Interval(I.lo + b * period, I.lo + (b + 1) * period))
        block_lengths.append(links[-1].length if ok else 0)
    last = chain[-1] if complete else None
    achieved = last.length if last is not None else 0
    matches = achieved == nominal if exact else abs(float(achieved) - float(nominal)) <= tol
    carrier = n_left_exact(family, eps, 0, I, exact=exact).carrier
    contained = last is not None and carrier.covers(last)
    if last is not None:
        lo, hi = float(last.lo), float(last.hi)
        # Cell midpoints: endpoints sit on the boundary of the open arc.
        pts = lo + (hi - lo) * (np.arange(100) + 0.5) / 100
        points_ok = bool(membership(family, float(eps), 0.0, pts).all())
    else:
        points_ok = False
    return LacunaryReport(
        interval=last, chain=tuple(chain), nominal_length=nominal, achieved_length=achieved,
        length_matches=bool(matches), chain_complete=complete, contained=contained,
        points_verified=points_ok, p_family=in_P_family(family, I, n, eps, exact=exact),
        n_blocks=n_blocks, block_lengths=tuple(block_lengths),
    )
