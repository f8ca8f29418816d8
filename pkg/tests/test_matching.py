import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone

from bohr_sampler.core import Interval, PhasePolynomial
from bohr_sampler.exceptions import HypothesisError, RankDeficiencyError
from bohr_sampler.matching import (
    MATCHING_TO_SAMPLING_FACTOR,
    PointSet,
    TrigPolynomial,
    TrigRegressor,
    default_probes,
    is_matching_set,
    mat_to_samp_certificate,
    random_trig_polynomial,
    reconstruct_coefficients,
    sampling_inequality_check,
    sup_norm_estimate,
)

from oracles import lstsq_reference


def test_point_set_sorted_unique():
    ps = PointSet([3, 1, 2, 1])
    np.testing.assert_array_equal(ps.points, [1, 2, 3])
    assert len(ps.restrict(1.5, 3)) == 2


def test_matching_examples():
    probes = np.array([0.1, 0.37, 2.9])
    rep = is_matching_set(probes, [1, 2], probes, 0.05)
    assert rep.passed
    np.testing.assert_allclose(rep.witnesses, probes)
    assert not is_matching_set([0.0], [1], [0.5], 0.1).passed
    rep = is_matching_set([0.0, 0.52], [1, 2], [0.5], 0.1)
    assert rep.passed and rep.witnesses[0] == 0.52
    assert rep.gaps[0] == pytest.approx(0.04)


def test_matching_empty_set_fails():
    assert not is_matching_set([], [1], [0.1, 0.2], 0.1).passed


pts = st.lists(st.floats(0, 20, allow_nan=False), min_size=1, max_size=30)


@given(pts, pts, st.floats(0.01, 0.49))
def test_witness_gap_and_monotonicity(lam, extra, eps):
    probes = default_probes(Interval(0, 20), seed=3, n_grid=50, n_random=50)
    F = [1, Fr(1, 3)]
    rep = is_matching_set(lam, F, probes, eps)
    for a, x, ok in zip(rep.probes, rep.witnesses, rep.per_probe):
        if ok:
            gap = max(min((p * (x - a)) % 1, 1 - (p * (x - a)) % 1) for p in (1.0, 1 / 3))
            assert gap < eps + 1e-12
    bigger = is_matching_set(lam + extra, F, probes, eps)
    assert np.all(bigger.per_probe >= rep.per_probe)


def test_sup_norm_examples():
    one = TrigPolynomial([(1, PhasePolynomial(()))])
    assert sup_norm_estimate(one, Interval(0, 3), 1e-3) == pytest.approx(1.0)
    f = TrigPolynomial([(1, PhasePolynomial((0, 1))), (-1, PhasePolynomial(()))])
    assert sup_norm_estimate(f, Interval(0, 1), 1e-3) == pytest.approx(2.0, abs=1e-5)
    assert sup_norm_estimate(TrigPolynomial([]), Interval(0, 1), 1e-3) == 0.0


def test_sampling_examples():
    zero = TrigPolynomial([])
    rep = sampling_inequality_check(zero, [0.5], Interval(0, 1), 0.1, 1e-3)
    assert rep.passed and rep.margin == 0
    chi = TrigPolynomial([(1, PhasePolynomial((0, 1)))])
    rep = sampling_inequality_check(chi, [0, 0.25, 0.5, 0.75], Interval(0, 1), 0.0, 1e-3)
    assert rep.passed and rep.lhs == pytest.approx(1) and rep.rhs == pytest.approx(1)
    with pytest.raises(ValueError):
        sampling_inequality_check(chi, [2.0], Interval(0, 1), 0.1, 1e-3)


@given(st.integers(0, 10_000))
def test_a_norm_dominates_sup(seed):
    rng = np.random.default_rng(seed)
    f = random_trig_polynomial([1, 2, math.sqrt(2), Fr(1, 3)], rng)
    assert sup_norm_estimate(f, Interval(0, 5), 1e-2) <= f.a_norm + 1e-12


def test_factor_constant():
    assert abs(MATCHING_TO_SAMPLING_FACTOR * 0.05 - (0.3 * math.pi + 0.1)) < 1e-12
    assert abs(MATCHING_TO_SAMPLING_FACTOR - (6 * math.pi + 2)) < 1e-15


def test_certificate_passes_on_matching_set():
    I = Interval(0, 10)
    lam = np.linspace(0, 10, 4001)
    rep = mat_to_samp_certificate(lam, [1, math.sqrt(2)], [1, math.sqrt(2)], I, 0.05, 20, seed=1,
                                  probes=default_probes(I, seed=1, n_grid=200, n_random=200))
    assert rep.passed and not rep.falsified


def test_certificate_gate_raises():
    with pytest.raises(HypothesisError):
        mat_to_samp_certificate([0.0], [1], [1], Interval(0, 1), 0.05, 5, seed=0)


def test_reconstruct_examples():
    t = np.arange(8) / 8
    res = reconstruct_coefficients(zip(t, 2 * np.exp(2j * np.pi * t)), [1])
    np.testing.assert_allclose(res.coefficients, [2])
    assert res.condition_number == pytest.approx(1.0)
    res = reconstruct_coefficients(zip(t, np.zeros(8)), [1, 2])
    np.testing.assert_allclose(res.coefficients, 0, atol=1e-14)
    with pytest.raises(RankDeficiencyError):
        reconstruct_coefficients([(0.0, 1.0)], [1, 2])


@given(st.integers(0, 10_000))
def test_reconstruct_matches_numpy_lstsq(seed):
    rng = np.random.default_rng(seed)
    phases = [1.0, math.sqrt(2), 0.5, math.pi]
    t = np.sort(rng.random(40) * 30)
    coef = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v = np.exp(2j * np.pi * np.outer(t, phases)) @ coef + 1e-3 * rng.standard_normal(40)
    res = reconstruct_coefficients(zip(t, v), phases)
    np.testing.assert_allclose(res.coefficients, lstsq_reference(t, v, phases), atol=1e-9)


def test_regressor_is_sklearn_estimator():
    reg = TrigRegressor(phases=[1, 2])
    assert clone(reg).get_params()["phases"] == [1, 2]
    t = np.linspace(0, 3, 30)
    y = np.exp(2j * np.pi * t) - 0.5j * np.exp(4j * np.pi * t)
    reg.fit(t, y)
    np.testing.assert_allclose(reg.coef_, [1, -0.5j], atol=1e-12)
    np.testing.assert_allclose(reg.predict(t), y, atol=1e-12)
