import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from bohr_sampler.core import IntegerInterval, Interval, PhasePolynomial
from bohr_sampler.exceptions import GridTooLargeError, ScheduleError
from bohr_sampler.random_construction import (
    Block,
    DependenceReduction,
    GeneratedSet,
    SamplingSchedule,
    aest_bound,
    bd_r_ell_threshold,
    chirp_grid,
    dominates_log,
    event_A_montecarlo,
    event_B_montecarlo,
    firtsglobal_threshold,
    generate,
    schedule_bd,
)

from oracles import aest_bound_direct, chirp_grid_bruteforce


def test_aest_examples():
    b, s = aest_bound(4, 2, 0.5, 20)
    assert b == pytest.approx(0.75**20 * 6) and round(b, 5) == 0.01903
    assert b == pytest.approx(aest_bound_direct(4, 2, 0.5, 20))
    assert aest_bound(3, 3, 0.4, 7)[0] == pytest.approx((1 - 0.4**3) ** 7)
    with pytest.raises(ValueError):
        aest_bound(2, 3, 0.5, 1)


@given(st.integers(1, 12), st.integers(1, 12), st.floats(0.01, 0.99), st.integers(0, 200))
def test_aest_binomial_below_stirling_and_decreasing(N, n, eps, ell):
    if n > N:
        return
    b, s = aest_bound(N, n, eps, ell)
    assert b <= s * (1 + 1e-12)
    assert aest_bound(N, n, eps, ell + 1)[0] < b or b == 0


def test_event_A_single_character_exact_probability():
    res = event_A_montecarlo(Interval(0, 1), [1], 1, 3, 0.25, trials=20000, seed=3)
    assert res.mode == "enumerated" and res.n_qualifying == 1
    assert abs(res.estimate - 0.5**3) <= 4 * math.sqrt(0.125 * 0.875 / 20000)
    res = event_A_montecarlo(Interval(0, 1), [1], 1, 20, 0.25, trials=10000, seed=3)
    assert res.within_bound() and res.bound == pytest.approx(0.75**20)


def test_event_A_trivial_cases():
    empty = event_A_montecarlo(Interval(0, Fr(1, 100)), [1], 1, 5, 0.25, a=0.5, trials=100, seed=0)
    assert empty.estimate == 0 and empty.n_qualifying == 0
    all_fail = event_A_montecarlo(Interval(0, 1), [1], 1, 0, 0.25, trials=100, seed=0)
    assert all_fail.estimate == 1


def test_event_A_on_integers():
    res = event_A_montecarlo(IntegerInterval(0, 11), [Fr(1, 4)], 1, 2, 0.3, trials=20000, seed=1)
    # 9 of 12 integers are in the polar; both draws outside: C(3,2)/C(12,2)
    p = 3 / 66
    assert abs(res.estimate - p) <= 4 * math.sqrt(p * (1 - p) / 20000)


def test_firtsglobal_examples():
    assert firtsglobal_threshold(128, 10, 1, 0.5, 1) == 17
    rhs = -2 * math.log(10) / math.log(0.5)
    assert firtsglobal_threshold(1, 10, 1, 0.5, 1) == math.floor(rhs) + 1
    a = [firtsglobal_threshold(50, 7, 2, 0.3, g) for g in (0.5, 1, 2, 4)]
    assert a == sorted(a)


@given(st.floats(1, 1e6), st.integers(2, 1000), st.integers(1, 3), st.floats(0.05, 0.95), st.floats(0.01, 5))
def test_firtsglobal_is_minimal(L, k, n, eps, gamma):
    ell = firtsglobal_threshold(L, k, n, eps, gamma)
    e = eps**n

    def ok(x):
        return x - n * math.log(L) / e > -(1 + gamma) * math.log(k) / math.log1p(-e)

    assert ok(ell) and not ok(ell - 1 - 1e-9 * abs(ell))


def test_bd_r_threshold_formula_and_growth():
    val = 2 * 2 * math.log(2) + (2 * 5 * 2 / 2 - 2 / math.log(0.5)) * math.log(10)
    assert bd_r_ell_threshold(10, 1, 1, 2) == math.ceil(val)
    with pytest.raises(ValueError):
        bd_r_ell_threshold(10, 1, 1, 1)
    ratios = [bd_r_ell_threshold(t, 1, 1, 2) / math.log(t) for t in (1e3, 1e6, 1e12)]
    assert max(ratios) / min(ratios) < 1.5


def test_chirp_grid_examples():
    g = chirp_grid(2, 1)
    assert g.cardinality == 128 == g.cardinality_bound
    members = {tuple(p.coefficient(r) for r in range(2)) for p in g}
    assert members == set(chirp_grid_bruteforce(2, 1))
    assert sorted(p.coefficient(0) for p in chirp_grid(3, 0)) == [Fr(j, 3) for j in range(-9, 9)]
    with pytest.raises(GridTooLargeError):
        next(iter(chirp_grid(10, 3)))


@given(st.integers(1, 6), st.integers(0, 2), st.integers(0, 10_000))
def test_grid_density_on_coefficient_box(t, n, seed):
    g = chirp_grid(t, n)
    assert g.cardinality <= g.cardinality_bound
    rng = np.random.default_rng(seed)
    p = PhasePolynomial(tuple(rng.uniform(-t, t, n + 1)))
    q = g.nearest(p)
    x = np.linspace(-t, t, 2001)
    sup = np.abs(p(x) - q(x)).max()
    assert sup <= g.sup_distance_bound(p) + 1e-9
    assert g.sup_distance_bound(p) <= (n + 1) / t + 1e-12


def test_tsbd_schedule_example():
    s = schedule_bd("tsbd", 3)
    b = s.blocks[2]
    assert (b.lo, b.hi, b.ell) == (1296, 2592, 3)
    with pytest.raises(ScheduleError):
        schedule_bd("tsbd", 13)
    big = schedule_bd("tsbd", 12)
    assert big.blocks[-1].lo == math.factorial(12) ** 4


def test_log_domination_surrogate():
    assert all(schedule_bd("bd-r", 40, ell="log2").diagnostics()["dominates_log"].values())
    flags = schedule_bd("bd-r", 40, ell="log").diagnostics()["dominates_log"]
    assert not flags[2] and not flags[3]
    assert dominates_log([1, 1], [10, 100]) == {1: False, 2: False, 3: False}


def test_generate_deterministic_and_in_blocks():
    s = schedule_bd("tsbd", 6)
    a, b = generate(s, 42), generate(s, 42)
    assert a == b and a != generate(s, 43)
    for blk, pts in zip(s.blocks, a.blocks_realized):
        assert len(pts) == blk.ell and all(blk.lo <= x <= blk.hi for x in pts)
    z = generate(schedule_bd("tsbd", 6, group="Z"), 9)
    assert all(isinstance(x, int) for blk in z.blocks_realized for x in blk)
    assert GeneratedSet.from_json(z.to_json()) == z


def test_integer_block_forced_full():
    s = SamplingSchedule("bd-z", (Block(0, 9, 10),), "Z")
    assert generate(s, 0).blocks_realized[0] == tuple(range(10))
    with pytest.raises(ValueError):
        generate(SamplingSchedule("bd-z", (Block(0, 9, 11),), "Z"), 0)


def test_generated_points_uniform_ks():
    s = SamplingSchedule("bd-r", (Block(0, 1, 1), Block(5, 9, 3)), "R")
    draws = np.array([generate(s, seed).blocks_realized[1] for seed in range(3000)]).ravel()
    assert stats.kstest((draws - 5) / 4, "uniform").pvalue > 1e-3


def test_event_B_regimes():
    sched = SamplingSchedule("bd-r", tuple(Block(k, k + 1, firtsglobal_threshold(2, k + 1, 1, 0.25, 1))
                                           for k in range(1, 5)), "R")
    res = event_B_montecarlo(sched, lambda k: [1, 2], 1, 0.25, trials=2000, seed=5)
    for r in res.per_block:
        assert r.within_bound()
    assert math.isfinite(res.aest_tail)
    thin = SamplingSchedule("bd-r", tuple(Block(k, k + 1, 1) for k in range(1, 5)), "R")
    res = event_B_montecarlo(thin, lambda k: [1, 2, 3, 5], 1, 0.25, trials=2000, seed=5)
    assert all(r.estimate > 0.5 for r in res.per_block)
    empty = SamplingSchedule("bd-r", (Block(0, Fr(1, 100), 3),), "R")
    res = event_B_montecarlo(empty, [[1]], 1, 0.25, a=0.5, trials=100, seed=0)
    assert res.success == 1


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 4), st.floats(0.05, 0.45))
def test_dependence_reduction_transfer(z1, z2, Q, eps):
    base = [PhasePolynomial((0, 1)), PhasePolynomial((0, 0, math.sqrt(2)))]
    red = DependenceReduction(base, [[z1, z2]], Q, [0.3])
    x = np.linspace(-5, 5, 2001)
    prem, concl = red.transfer(x, 0.7, eps)
    assert not np.any(prem & ~concl)


def test_schedule_json_roundtrip_big_ints():
    s = schedule_bd("tsbd", 12)
    d = s.as_dict()
    assert isinstance(d["blocks"][-1]["lo"], str)
    assert SamplingSchedule.from_dict(d) == s
