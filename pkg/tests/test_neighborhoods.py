from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bohr_sampler.core import IntegerInterval, Interval, IntervalUnion, PhasePolynomial
from bohr_sampler.neighborhoods import (
    FunctionFamily,
    in_P_family,
    membership,
    n_left,
    n_left_exact,
    n_left_grid,
    n_left_integer,
    n_right_check,
    p_family_report,
)

from oracles import polar_count_integers, polar_measure_breakpoints, polar_measure_grid

freqs = st.fractions(min_value=Fr(1, 12), max_value=4, max_denominator=12)
families = st.lists(freqs, min_size=1, max_size=3, unique=True)
radii = st.sampled_from([Fr(1, 10), Fr(1, 5), Fr(1, 4), Fr(1, 3), Fr(2, 5)])
anchors = st.fractions(min_value=-3, max_value=3, max_denominator=10)


def test_single_character_examples():
    r = n_left_exact([2], Fr(1, 10), 0, Interval(0, 1))
    assert r.exact and r.measure == Fr(1, 5)
    assert r.carrier == IntervalUnion(((0, Fr(1, 20)), (Fr(9, 20), Fr(11, 20)), (Fr(19, 20), 1)))
    assert n_left_exact([1], Fr(1, 4), 0, Interval(0, 1)).measure == Fr(1, 2)


def test_two_character_example_matches_breakpoint_oracle():
    r = n_left_exact([Fr(1, 2), 1], Fr(1, 4), 0, Interval(0, 2))
    assert r.measure == Fr(1, 2)
    assert r.measure == polar_measure_breakpoints([Fr(1, 2), 1], Fr(1, 4), 0, 0, 2)


def test_exact_path_rejects_bad_inputs():
    with pytest.raises(ValueError):
        n_left_exact([0], 0.1, 0, Interval(0, 1))
    with pytest.raises(ValueError):
        n_left_exact([1], 0.5, 0, Interval(0, 1))
    with pytest.raises(ValueError):
        n_left_exact([PhasePolynomial((0, 0, 1))], 0.1, 0, Interval(0, 1))


def test_grid_examples():
    r = n_left_grid([PhasePolynomial((0, 0, 1))], 0.5, 0, Interval(0, 1), 1e-4)
    assert not r.exact and abs(r.measure - 1.0) < 1e-3
    assert abs(n_left_grid([2], 0.1, 0, Interval(0, 1), 1e-5).measure - 0.2) < 1e-3
    assert n_left_grid([], 0.3, 0, Interval(0, 3), 1e-2).measure == pytest.approx(3)
    with pytest.raises(ValueError):
        n_left_grid([1], 0.1, 0, Interval(0, 1), 0)


def test_dispatcher_routes_half_radius_to_grid():
    r = n_left([1], 0.5, 0, Interval(0, 1))
    assert not r.exact and r.measure == pytest.approx(1.0, abs=1e-3)


def test_integer_examples():
    assert n_left_integer([Fr(1, 4)], Fr(3, 10), 0, IntegerInterval(0, 7)).carrier == (0, 1, 3, 4, 5, 7)
    assert n_left_integer([], Fr(1, 4), 0, IntegerInterval(0, 9)).measure == 10
    assert n_left_integer([Fr(1, 2)], Fr(1, 10), 0, IntegerInterval(0, 9)).measure == 5


@given(families, radii, anchors)
def test_integer_path_matches_enumeration(taus, eps, a):
    a = int(a)
    got = n_left_integer(taus, eps, a, IntegerInterval(-5, 30)).measure
    assert got == polar_count_integers(taus, eps, a, -5, 30)


def test_p_family_examples():
    assert in_P_family([1], Interval(0, 1), 1, Fr(1, 4))
    assert not in_P_family([1], Interval(0, Fr(1, 100)), 1, Fr(1, 4), a=Fr(1, 2))
    assert in_P_family([], Interval(0, 1), 0, Fr(1, 4))
    rep = p_family_report([1], Interval(0, 1), 1, Fr(1, 4), [0, Fr(1, 3)])
    assert rep["passed"] and rep["n_probes"] == 2


def test_n_right_examples():
    assert n_right_check(PhasePolynomial(()), Interval(0, 1), 0.1, 1e-3)
    assert not n_right_check(PhasePolynomial((0, 1)), Interval(0, 1), 0.1, 1e-3)
    assert n_right_check(PhasePolynomial((0, 0.01)), Interval(0, 1), 0.1, 1e-3)


@given(families, radii, anchors)
def test_exact_matches_breakpoint_oracle(taus, eps, a):
    got = n_left_exact(taus, eps, a, Interval(-1, 5)).measure
    assert got == polar_measure_breakpoints(taus, eps, a, -1, 5)


@given(families, radii, anchors)
def test_exact_and_grid_agree(taus, eps, a):
    exact = n_left_exact(taus, eps, a, Interval(0, 4)).measure
    step = 1e-4
    crossings = sum(2 * (4 * float(t) + 2) for t in taus)
    assert abs(polar_measure_grid(taus, eps, a, 0, 4, step) - float(exact)) <= 2 * step * crossings


@given(families, radii, anchors)
def test_translation_covariance(taus, eps, a):
    I = Interval(Fr(-1), Fr(3))
    shifted = n_left_exact(taus, eps, 0, I.shift(-a)).carrier.shift(a)
    assert n_left_exact(taus, eps, a, I).carrier == shifted


@given(families, radii, radii, anchors)
def test_monotone_in_radius_and_family(taus, e1, e2, a):
    lo, hi = min(e1, e2), max(e1, e2)
    I = Interval(0, 3)
    small = n_left_exact(taus, lo, a, I).carrier
    big = n_left_exact(taus, hi, a, I).carrier
    assert (small & big) == small
    sub = n_left_exact(taus[:1], lo, a, I).carrier
    assert (small & sub) == small
    assert small.total_length <= I.length


def test_membership_matches_carrier():
    I = Interval(0, 5)
    carrier = n_left_exact([Fr(1, 3), Fr(3, 4)], Fr(1, 5), Fr(1, 7), I).carrier
    t = np.random.default_rng(0).random(4000) * 5
    np.testing.assert_array_equal(membership([Fr(1, 3), Fr(3, 4)], 0.2, 1 / 7, t), carrier.contains_array(t))


def test_family_rejects_duplicates():
    with pytest.raises(ValueError):
        FunctionFamily.characters(1, 1)
