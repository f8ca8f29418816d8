"""Random sampling sets: probability bounds, schedules and generators.

The generators draw ``ell_k`` points in each block ``I_k``.  On ℝ the
points are i.i.d. uniform; on ℤ they form a uniform ``ell_k``-subset.
Every block has its own random stream derived from ``(seed, k)``, so any
prefix of a schedule regenerates bit for bit.
"""

from __future__ import annotations

import bisect
import dataclasses
import itertools
import json
import math
import random
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .config import DEFAULTS
from .core import IntegerInterval, Interval, PhasePolynomial, angular_distance, as_exact, eval_phase, is_rational
from .exceptions import GridTooLargeError, ScheduleError
from .matching import PointSet
from .neighborhoods import FunctionFamily, as_family, in_P_family, membership

__all__ = [
    "aest_bound",
    "MonteCarloResult",
    "event_A_montecarlo",
    "EventBResult",
    "event_B_montecarlo",
    "firtsglobal_threshold",
    "bd_r_ell_threshold",
    "ChirpGrid",
    "chirp_grid",
    "Block",
    "SamplingSchedule",
    "GeneratedSet",
    "generate",
    "schedule_bd",
    "dominates_log",
    "DependenceReduction",
]


def _stream(seed, *keys) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def aest_bound(N, n, eps, ell) -> tuple:
    """``(C(N, n) (1 - eps**n)**ell, (N e / n)**n (1 - eps**n)**ell)``.

    Upper bounds for the probability that ``ell`` uniform points miss the
    polar of some qualifying ``n``-subset of an ``N``-element family.
    """
    if int(N) != N or int(n) != n or not 1 <= n <= N:
        raise ValueError(f"need integers 1 <= n <= N, got n={n}, N={N}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if int(ell) != ell or ell < 0:
        raise ValueError(f"ell must be a nonnegative integer, got {ell}")
    miss = (1 - float(eps) ** n) ** int(ell)
    return math.comb(int(N), int(n)) * miss, (N * math.e / n) ** n * miss


@dataclasses.dataclass(frozen=True)
class MonteCarloResult:
    """Empirical failure frequency with its binomial standard error.

    ``mode`` is ``"enumerated"`` when every ``n``-subset of the family was
    classified and ``"sampled"`` when a seeded subset of them was.
    """

    estimate: float
    sigma: float
    trials: int
    failures: int
    bound: Optional[float]
    mode: str
    n_families: int
    n_qualifying: int

    def within_bound(self, k=3.0) -> bool:
        return self.bound is None or self.estimate <= self.bound + k * self.sigma


def _draw(I, ell, rng, trials) -> np.ndarray:
    if isinstance(I, IntegerInterval):
        size = I.cardinality
        if ell > size:
            raise ValueError(f"cannot draw {ell} distinct integers from {size}")
        if ell == 0:
            return np.empty((trials, 0))
        if size > 2**53:
            raise ValueError("integer window too large for float evaluation")
        out = np.empty((trials, ell))
        rows = max(1, 4_000_000 // size)
        for s in range(0, trials, rows):
            # the ell smallest of size uniform keys index a uniform ell-subset
            keys = rng.random((min(rows, trials - s), size))
            out[s:s + keys.shape[0]] = I.lo + np.argpartition(keys, ell - 1, axis=1)[:, :ell]
        return out
    lo, hi = float(I.lo), float(I.hi)
    return lo + (hi - lo) * rng.random((trials, ell))


def _qualifying(Delta: FunctionFamily, I, n, eps, a, rng, cap) -> tuple:
    total = math.comb(len(Delta), n)
    if total <= cap:
        combos = list(itertools.combinations(range(len(Delta)), n))
        mode = "enumerated"
    else:
        seen = set()
        while len(seen) < cap:
            seen.add(tuple(sorted(rng.choice(len(Delta), size=n, replace=False).tolist())))
        combos = sorted(seen)
        mode = "sampled"
    keep = [c for c in combos if in_P_family([Delta[i] for i in c], I, n, eps, a=a)]
    return keep, mode, len(combos)


def _failures(I, Delta, n, ell, eps, a, trials, seed, block=0, cap=None):
    Delta = as_family(Delta)
    cap = DEFAULTS.family_cap if cap is None else cap
    rng_f = _stream(seed, block, 1)
    if n > len(Delta):
        keep, mode, n_fam = [], "enumerated", 0
    else:
        keep, mode, n_fam = _qualifying(Delta, I, n, eps, a, rng_f, cap)
    if not keep:
        return np.zeros(trials, dtype=bool), mode, n_fam, 0
    pts = _draw(I, ell, _stream(seed, block, 0), trials)
    members = sorted({i for c in keep for i in c})
    fail = np.zeros(trials, dtype=bool)
    masks = {}
    for j in members:
        p = Delta[j]
        ref = float(eval_phase(p, float(a)))
        masks[j] = angular_distance(eval_phase(p, pts), ref) < eps
    for c in keep:
        hit = masks[c[0]].copy()
        for j in c[1:]:
            hit &= masks[j]
        fail |= ~hit.any(axis=1)
    return fail, mode, n_fam, len(keep)


def event_A_montecarlo(I, Delta, n, ell, eps, a=0.0, trials=None, seed=None,
                       family_cap=None) -> MonteCarloResult:
    """Frequency with which ``ell`` random points miss some qualifying polar.

    A family ``F ⊆ Delta`` of size ``n`` qualifies when it is in
    ``𝔓_{I,a,n,eps}``.  A trial fails when some qualifying ``F`` has
    ``Λ ∩ N◁(F, eps, a) = ∅``.  Points are i.i.d. uniform on an interval
    of ℝ and a uniform ``ell``-subset on ℤ.  ``bound`` is the binomial
    bound of :func:`aest_bound` with ``N = |Delta|``.
    """
    trials = DEFAULTS.trials if trials is None else int(trials)
    seed = DEFAULTS.seed if seed is None else seed
    if trials < 1:
        raise ValueError("trials must be >= 1")
    Delta = as_family(Delta)
    fail, mode, n_fam, n_q = _failures(I, Delta, n, ell, eps, a, trials, seed, cap=family_cap)
    p = float(fail.mean())
    bound = None
    if 1 <= n <= len(Delta) and 0 < eps < 1:
        bound = aest_bound(len(Delta), n, eps, ell)[0]
    return MonteCarloResult(p, math.sqrt(p * (1 - p) / trials), trials, int(fail.sum()),
                            bound, mode, n_fam, n_q)


def firtsglobal_threshold(L_k, k, n, eps, gamma) -> int:
    """Smallest integer ``ell`` with ``ell - n log(L_k)/eps**n > -(1+gamma) log k / log(1 - eps**n)``."""
    if not L_k >= 1:
        raise ValueError("L_k must be >= 1")
    if int(k) != k or k < 2:
        raise ValueError("k must be an integer >= 2")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    e = float(eps) ** n
    rhs = n * math.log(L_k) / e - (1 + gamma) * math.log(k) / math.log1p(-e)
    return math.floor(rhs) + 1


def bd_r_ell_threshold(t_k, n, m, N) -> int:
    """Smallest integer ``ell`` placing block ``k`` in the index set for ``(N, m)``.

    ``ell >= (n+1) m N**m log 2 + [m N**m (n+4)(n+1)/2 - 2/log(1 - N**-m)] log t_k``.
    ``N = 1`` would divide by ``log 0`` and is rejected.
    """
    if not t_k > 1:
        raise ValueError("t_k must exceed 1")
    for name, v in (("n", n), ("m", m)):
        if int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer")
    if int(N) != N or N < 2:
        raise ValueError("N must be an integer >= 2")
    w = m * N**m
    val = (n + 1) * w * math.log(2) + (w * (n + 4) * (n + 1) / 2 - 2 / math.log1p(-float(N) ** -m)) * math.log(t_k)
    return math.ceil(val)


class ChirpGrid:
    """Polynomials ``sum_r j_r / t**(r+1) x**r`` with ``-floor(t**(r+2)) <= j_r < floor(t**(r+2))``.

    Enumeration is lazy and refused above ``cap`` members; :meth:`sample`
    and :meth:`nearest` work at any size.
    """

    def __init__(self, t, n, cap=None):
        if not t >= 1:
            raise ValueError("t must be >= 1")
        if int(n) != n or n < 0:
            raise ValueError("n must be a nonnegative integer")
        self.t = t
        self.n = int(n)
        self.cap = DEFAULTS.grid_cap if cap is None else cap
        self.exact = is_rational(t)
        tt = as_exact(t) if self.exact else float(t)
        self._scales = tuple(tt ** (r + 1) for r in range(self.n + 1))
        self.index_bounds = tuple(math.floor(tt ** (r + 2)) for r in range(self.n + 1))

    @property
    def cardinality(self) -> int:
        return math.prod(2 * b for b in self.index_bounds)


    @property
    def cardinality_bound(self):
        """``2**(n+1) t**((n+1)(n+4)/2)``, exact for rational ``t``."""
        e = (self.n + 1) * (self.n + 4) // 2
        tt = as_exact(self.t) if self.exact else float(self.t)
        return 2 ** (self.n + 1) * tt**e

    def member(self, j) -> PhasePolynomial:
        if len(j) != self.n + 1:
            raise ValueError("need one index per degree")
        for r, (jr, b) in enumerate(zip(j, self.index_bounds)):
            if not -b <= jr < b:
                raise ValueError(f"index j_{r}={jr} outside [-{b}, {b})")
        return PhasePolynomial(tuple(int(jr) / s if not self.exact else Fraction(int(jr)) / s
                                     for jr, s in zip(j, self._scales)))

    def __iter__(self):
        if self.cardinality > self.cap:
            raise GridTooLargeError(f"grid has {self.cardinality} members, above cap {self.cap}")
        for j in itertools.product(*(range(-b, b) for b in self.index_bounds)):
            yield self.member(j)

    def nearest_index(self, p) -> tuple:
        p = p if isinstance(p, PhasePolynomial) else PhasePolynomial(tuple(p))
        if p.degree() > self.n:
            raise ValueError("polynomial degree exceeds the grid degree")
        out = []
        for r, (s, b) in enumerate(zip(self._scales, self.index_bounds)):
            j = round(p.coefficient(r) * s)
            out.append(int(min(max(j, -b), b - 1)))
        return tuple(out)

    def nearest(self, p) -> PhasePolynomial:
        """Grid member obtained by rounding each coefficient, clipped to the index range."""
        return self.member(self.nearest_index(p))

    def sample(self, size, rng) -> list:
        return [self.member(tuple(int(rng.integers(-b, b)) for b in self.index_bounds))
                for _ in range(size)]

    def sup_distance_bound(self, p) -> float:
        """``sum_r |a_r - q_r| t**r`` for the nearest member ``q``: bounds ``sup |p - q|`` on ``[-t, t]``."""
        q = self.nearest(p)
        t = float(self.t)
        p = p if isinstance(p, PhasePolynomial) else PhasePolynomial(tuple(p))
        return float(sum(abs(float(p.coefficient(r)) - float(q.coefficient(r))) * t**r
                         for r in range(self.n + 1)))


def chirp_grid(t_k, n, cap=None) -> ChirpGrid:
    return ChirpGrid(t_k, n, cap=cap)


@dataclasses.dataclass(frozen=True)
class Block:
    """One block ``I_k = [lo, hi]`` of a schedule with sample size ``ell``."""

    lo: object
    hi: object
    ell: int

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def t(self):
        return max(abs(self.lo), abs(self.hi))

    def interval(self, group):
        return IntegerInterval(self.lo, self.hi) if group == "Z" else Interval(self.lo, self.hi)


def _encode(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def _decode(x):
    if isinstance(x, str):
        f = Fraction(x)
        return int(f) if f.denominator == 1 else f
    return x


@dataclasses.dataclass(frozen=True)
class SamplingSchedule:
    """Blocks ``(I_k, ell_k)``, ``k = 1, 2, ...``, on the group ``"R"`` or ``"Z"``."""

    kind: str
    blocks: tuple
    group: str = "R"
    params: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.group not in ("R", "Z"):
            raise ValueError("group must be 'R' or 'Z'")
        for k, b in enumerate(self.blocks, start=1):
            if b.lo > b.hi:
                raise ValueError(f"block {k} has lo > hi")
            if int(b.ell) != b.ell or b.ell < 0:
                raise ValueError(f"block {k} has invalid ell {b.ell}")
            if self.group == "Z" and (int(b.lo) != b.lo or int(b.hi) != b.hi):
                raise ValueError(f"block {k} needs integer endpoints on Z")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def __len__(self):
        return len(self.blocks)

    def interval(self, k):
        """Window of block ``k`` (1-based)."""
        return self.blocks[k - 1].interval(self.group)

    @property
    def t(self) -> tuple:
        return tuple(b.t for b in self.blocks)

    @property
    def gaps(self) -> tuple:
        return tuple(b2.lo - b1.hi for b1, b2 in zip(self.blocks, self.blocks[1:]))

    def t_dominates_index(self) -> bool:
        """``t_k >= k`` on the whole prefix."""
        return all(b.t >= k for k, b in enumerate(self.blocks, start=1))

    def diagnostics(self, cs=(1, 2, 3)) -> dict:
        """Finite-prefix surrogates of the asymptotic schedule hypotheses."""
        lengths = [float(b.length) for b in self.blocks]
        return {
            "t_k_ge_k": self.t_dominates_index(),
            "max_block_length": max(lengths) if lengths else 0.0,
            "block_length_increasing": all(a < b for a, b in zip(lengths, lengths[1:])),
            "dominates_log": dominates_log([b.ell for b in self.blocks], [float(b.t) for b in self.blocks], cs),
        }

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.group,
            "params": {k: _encode(v) if isinstance(v, (int, float, Fraction)) else v
                       for k, v in sorted(self.params.items())},
            "blocks": [{"lo": _encode(b.lo), "hi": _encode(b.hi), "ell": int(b.ell)} for b in self.blocks],
        }

    @classmethod
    def from_dict(cls, d) -> "SamplingSchedule":
        blocks = tuple(Block(_decode(b["lo"]), _decode(b["hi"]), int(b["ell"])) for b in d["blocks"])
        params = {k: _decode(v) if isinstance(v, str) and _is_number(v) else v
                  for k, v in d.get("params", {}).items()}
        return cls(d["kind"], blocks, d.get("group", "R"), params)


def _is_number(s) -> bool:
    try:
        Fraction(s)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def dominates_log(ells, ts, cs=(1, 2, 3)) -> dict:
    """For each ``c``: does some block in the second half of the prefix have ``ell > c log t``?

    A finite stand-in for ``ell_k != O(log t_k)``; blocks with ``t <= e``
    are skipped.
    """
    pairs = [(l, t) for l, t in zip(ells, ts) if t > math.e]
    tail = pairs[len(pairs) // 2:]
    return {c: any(l > c * math.log(t) for l, t in tail) for c in cs}


def _ell_rule(rule, t, k):
    if callable(rule):
        return int(rule(t, k))
    if rule == "log2":
        return max(1, math.ceil(math.log(t) ** 2)) if t > 1 else 1
    if rule == "log":
        return max(1, math.ceil(math.log(t))) if t > 1 else 1
    if isinstance(rule, str) and rule.startswith("const:"):
        return int(rule.split(":", 1)[1])
    if isinstance(rule, str) and rule.startswith("power:"):
        return max(1, math.ceil(float(t) ** float(rule.split(":", 1)[1])))
    raise ValueError(f"unknown ell rule {rule!r}")


def schedule_bd(kind, k_max=None, ell="log2", group=None, kmax_cap=None, **params) -> SamplingSchedule:
    """Build a block schedule.

    Parameters
    ----------
    kind : {"tsbd", "bd-r", "bd-z"}
        ``"tsbd"``: ``I_k = [(k!)**4, 2 (k!)**4]`` and ``ell_k = k``, on ℝ
        or, with ``group="Z"``, on ℤ.  ``"bd-r"`` / ``"bd-z"``: contiguous
        blocks ``[k(k-1)/2, k(k+1)/2]`` of length ``k`` on ℝ / ℤ, unless
        ``lengths`` is given.
    k_max : int
        Number of blocks.
    ell : str, callable or sequence
        Sample-size rule for the BD kinds: ``"log2"`` (``ceil(log(t)**2)``),
        ``"log"``, ``"const:c"``, ``"power:x"``, a callable ``(t, k) -> int``
        or an explicit list.
    kmax_cap : int, optional
        Largest TSBD ``k_max`` materialized (default ``DEFAULTS.tsbd_kmax_cap``).

    Raises
    ------
    ScheduleError
        ``k_max`` above the cap for TSBD, or invalid parameters.
    """
    kind = kind.lower()
    if k_max is None:
        k_max = 6 if kind == "tsbd" else 20
    if int(k_max) != k_max or k_max < 1:
        raise ScheduleError("k_max must be a positive integer")
    k_max = int(k_max)
    if kind == "tsbd":
        cap = DEFAULTS.tsbd_kmax_cap if kmax_cap is None else kmax_cap
        if k_max > cap:
            raise ScheduleError(f"k_max={k_max} exceeds the materialization cap {cap}")
        g = group or "R"
        blocks = tuple(Block(math.factorial(k) ** 4, 2 * math.factorial(k) ** 4, k)
                       for k in range(1, k_max + 1))
        return SamplingSchedule("tsbd", blocks, g, {"k_max": k_max})
    if kind in ("bd-r", "bd-z"):
        g = group or ("Z" if kind == "bd-z" else "R")
        lengths = params.get("lengths")
        lengths = list(range(1, k_max + 1)) if lengths is None else list(lengths)
        if len(lengths) < k_max:
            raise ScheduleError("not enough block lengths for k_max")
        blocks, lo = [], 0
        for k in range(1, k_max + 1):
            hi = lo + lengths[k - 1]
            t = max(abs(lo), abs(hi))
            if isinstance(ell, (list, tuple)):
                e = int(ell[k - 1])
            else:
                e = _ell_rule(ell, t, k)
            if g == "Z":
                e = min(e, hi - lo + 1)
            blocks.append(Block(lo, hi, max(1, e)))
            lo = hi
        rule = ell if isinstance(ell, str) else "explicit"
        return SamplingSchedule(kind, tuple(blocks), g, {"k_max": k_max, "ell": rule})
    raise ScheduleError(f"unknown schedule kind {kind!r}")


@dataclasses.dataclass(frozen=True)
class GeneratedSet:
    """Realized random blocks ``Λ_k`` of a schedule.

    ``blocks_realized[k-1]`` is a sorted tuple of floats on ℝ and of Python
    ints on ℤ (exact however large).
    """

    schedule: SamplingSchedule
    seed: int
    blocks_realized: tuple

    @property
    def k_max(self) -> int:
        return len(self.blocks_realized)

    def points(self) -> np.ndarray:
        return np.array(sorted(float(x) for blk in self.blocks_realized for x in blk))

    def point_set(self) -> PointSet:
        pts, idx = [], []
        for k, blk in enumerate(self.blocks_realized, start=1):
            pts.extend(float(x) for x in blk)
            idx.extend([k] * len(blk))
        return PointSet(pts, idx)

    def count_up_to(self, T) -> int:
        flat = sorted(x for blk in self.blocks_realized for x in blk)
        return bisect.bisect_right(flat, T)

    def as_dict(self) -> dict:
        sched = self.schedule.as_dict()
        sched["blocks"] = sched["blocks"][: self.k_max]
        enc = (lambda x: str(x)) if self.schedule.group == "Z" else float
        return {
            **sched,
            "seed": int(self.seed),
            "points": [[enc(x) for x in blk] for blk in self.blocks_realized],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d) -> "GeneratedSet":
        sched = SamplingSchedule.from_dict(d)
        conv = int if sched.group == "Z" else float
        blocks = tuple(tuple(conv(x) for x in blk) for blk in d["points"])
        return cls(sched, int(d["seed"]), blocks)

    @classmethod
    def from_json(cls, text) -> "GeneratedSet":
        return cls.from_dict(json.loads(text))


def _draw_block(block: Block, group, seed, k):
    if group == "Z":
        size = block.hi - block.lo + 1
        if block.ell > size:
            raise ValueError(f"block {k}: ell={block.ell} exceeds the {size} integers available")
        state = np.random.SeedSequence([int(seed), k]).generate_state(4)
        rnd = random.Random(int.from_bytes(np.asarray(state, dtype=np.uint32).tobytes(), "little"))
        return tuple(sorted(rnd.sample(range(block.lo, block.hi + 1), block.ell)))
    lo, hi = float(block.lo), float(block.hi)
    u = _stream(seed, k).random(block.ell)
    return tuple(sorted((lo + (hi - lo) * u).tolist()))


def generate(schedule: SamplingSchedule, seed=None, k_max=None) -> GeneratedSet:
    """Draw ``Λ_k`` for ``k = 1..k_max`` (default: every block).

    Block ``k`` uses its own stream seeded by ``(seed, k)``.
    """
    seed = DEFAULTS.seed if seed is None else int(seed)
    k_max = len(schedule) if k_max is None else int(k_max)
    if not 1 <= k_max <= len(schedule):
        raise ValueError(f"k_max must lie in 1..{len(schedule)}")
    blocks = tuple(_draw_block(schedule.blocks[k - 1], schedule.group, seed, k) for k in range(1, k_max + 1))
    return GeneratedSet(schedule, seed, blocks)


@dataclasses.dataclass(frozen=True)
class EventBResult:
    """Joint success frequency over blocks ``k0..K`` plus per-block detail.

    ``aest_tail`` is ``sum_k (L_k e/n)**n (1 - eps**n)**ell_k`` over the
    same blocks, the quantity whose finiteness drives the almost-sure
    statement.
    """

    success: float
    sigma: float
    trials: int
    k0: int
    per_block: tuple
    aest_tail: float


def event_B_montecarlo(schedule: SamplingSchedule, deltas, n, eps, a=0.0, trials=None, seed=None,
                       k0=1, k_max=None, family_cap=None) -> EventBResult:
    """Frequency with which every block ``k0..k_max`` lands in its success event.

    ``deltas`` is a sequence of families (one per block) or a callable
    ``k -> family``.  Trial ``i`` of block ``k`` uses row ``i`` of the
    stream seeded by ``(seed, k)``, so blocks are independent.
    """
    trials = DEFAULTS.trials if trials is None else int(trials)
    seed = DEFAULTS.seed if seed is None else seed
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k_max = len(schedule) if k_max is None else k_max
    get = deltas if callable(deltas) else (lambda k: deltas[k - 1])
    ok = np.ones(trials, dtype=bool)
    per, tail = [], 0.0
    for k in range(k0, k_max + 1):
        block = schedule.blocks[k - 1]
        Delta = as_family(get(k))
        I = schedule.interval(k)
        fail, mode, n_fam, n_q = _failures(I, Delta, n, block.ell, eps, a, trials, seed, block=k,
                                           cap=family_cap)
        ok &= ~fail
        p = float(fail.mean())
        bound = aest_bound(len(Delta), n, eps, block.ell)[0] if 1 <= n <= len(Delta) and eps < 1 else None
        if 1 <= n <= len(Delta) and eps < 1:
            tail += aest_bound(len(Delta), n, eps, block.ell)[1]
        per.append(MonteCarloResult(p, math.sqrt(p * (1 - p) / trials), trials, int(fail.sum()),
                                    bound, mode, n_fam, n_q))
    s = float(ok.mean())
    return EventBResult(s, math.sqrt(s * (1 - s) / trials), trials, k0, tuple(per), tail)


@dataclasses.dataclass(frozen=True)
class DependenceReduction:
    """Rational dependence ``p_j = C_j - sum_i (Z_ij / Q) p_i`` on a base family.

    Parameters
    ----------
    base : sequence of PhasePolynomial
        Strongly independent ``p_1..p_m``.
    Z : sequence of integer sequences
        ``Z[j][i]`` is the coefficient of ``p_i`` in dependent member ``j``.
    Q : int
        Common positive denominator.
    C : sequence of real
        Constants ``C_j``.

    Notes
    -----
    A point matching the scaled base ``p_i / Q`` to within ``eps / M``
    matches every dependent member to within ``eps`` when
    ``M >= max_j sum_i |Z_ij|``.  It matches each base member ``p_i``
    itself only to within ``Q eps / M``, so :meth:`reduced_eps` divides
    by ``max(M, Q)``.
    """

    base: tuple
    Z: tuple
    Q: int
    C: tuple

    def __post_init__(self):
        base = tuple(p if isinstance(p, PhasePolynomial) else PhasePolynomial(tuple(p)) for p in self.base)
        Z = tuple(tuple(int(z) for z in row) for row in self.Z)
        if int(self.Q) != self.Q or self.Q < 1:
            raise ValueError("Q must be a positive integer")
        if any(len(row) != len(base) for row in Z):
            raise ValueError("each Z row needs one entry per base member")
        if len(self.C) != len(Z):
            raise ValueError("need one constant per dependent member")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "Q", int(self.Q))
        object.__setattr__(self, "C", tuple(self.C))

    @property
    def M(self) -> int:
        return max((sum(abs(z) for z in row) for row in self.Z), default=0)

    def dependents(self) -> tuple:
        out = []
        for row, c in zip(self.Z, self.C):
            p = PhasePolynomial((c,))
            for z, b in zip(row, self.base):
                p = p - b * Fraction(z, self.Q) if b.is_exact else p - b * (z / self.Q)
            out.append(p)
        return tuple(out)

    def family(self) -> FunctionFamily:
        return FunctionFamily(self.base + self.dependents())

    def reduced_family(self) -> FunctionFamily:
        return FunctionFamily(b / self.Q for b in self.base)

    def reduced_eps(self, eps):
        return eps / max(self.M, self.Q, 1)

    def transfer(self, x, a, eps) -> tuple:
        """``(premise, conclusion)``: ``x ∈ N◁(F̃, eps~, a)`` and ``x ∈ N◁(F, eps, a)``.

        The implication premise ⟹ conclusion is what the reduction
        guarantees; a pair ``(True, False)`` would falsify it.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        prem = membership(self.reduced_family(), float(self.reduced_eps(eps)), float(a), x)
        concl = membership(self.family(), float(eps), float(a), x)
        return prem, concl
