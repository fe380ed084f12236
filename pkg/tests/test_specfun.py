import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate

from nanofiber_emission.specfun import (
    HalfInteger, bessel_derivative, bessel_j, bessel_k, bessel_y, clebsch_gordan, hankel,
    wigner_3j, wigner_6j,
)


# -- independent oracles -----------------------------------------------------

def j_integral(l, x):
    """Bessel's integral: J_l(x) = (1/pi) int_0^pi cos(l t - x sin t) dt."""
    val, _ = integrate.quad(lambda t: math.cos(l * t - x * math.sin(t)), 0, math.pi,
                            epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / math.pi


def k_integral(l, x):
    """K_l(x) = int_0^inf exp(-x cosh t) cosh(l t) dt."""
    t_max = math.acosh(800 / x + 1)  # integrand below exp(-700) beyond
    val, _ = integrate.quad(
        lambda t: 0.5 * (math.exp(-x * math.cosh(t) + l * t) + math.exp(-x * math.cosh(t) - l * t)),
        0, t_max, epsabs=0, epsrel=1e-13, limit=400)
    return val


def j_series(l, x, terms=60):
    return sum((-1) ** s * (x / 2) ** (2 * s + l) / (math.factorial(s) * math.factorial(s + l))
               for s in range(terms))


def six_j_from_3j(j1, j2, j3, j4, j5, j6):
    """6j as a contraction of four 3j symbols over all projections."""
    def ms(j):
        tj = HalfInteger.of(j).twice_value
        return [Fraction(t, 2) for t in range(-tj, tj + 1, 2)]

    total = 0.0
    js = [Fraction(HalfInteger.of(j).twice_value, 2) for j in (j1, j2, j3, j4, j5, j6)]
    for m1, m2, m4, m5 in itertools.product(ms(j1), ms(j2), ms(j4), ms(j5)):
        m3 = -m1 - m2
        for m6 in ms(j6):
            if abs(m3) > js[2]:
                continue
            s = sum(j - m for j, m in zip(js, (m1, m2, m3, m4, m5, m6)))
            sign = -1 if int(s) % 2 else 1
            total += sign * (wigner_3j(js[0], js[1], js[2], -m1, -m2, -m3)
                             * wigner_3j(js[0], js[4], js[5], m1, -m5, m6)
                             * wigner_3j(js[3], js[1], js[5], m4, m2, -m6)
                             * wigner_3j(js[3], js[4], js[2], -m4, m5, m3))
    return total


# -- Bessel ------------------------------------------------------------------

def test_bessel_j_origin_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_first_root_of_j0_from_series_bisection():
    lo, hi = 2.0, 3.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if j_series(0, lo) * j_series(0, mid) <= 0:
            hi = mid
        else:
            lo = mid
    assert abs(lo - 2.404826) < 1e-6
    assert abs(bessel_j(0, lo)) < 1e-12


def test_negative_order_reflection():
    x = np.linspace(0.1, 20, 50)
    for l in range(1, 6):
        assert np.allclose(bessel_j(-l, x), (-1) ** l * bessel_j(l, x), rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("l", [0, 1, 2, 5])
def test_bessel_j_matches_integral_oracle(l):
    xs = np.linspace(0.1, 50, 100)
    ours = bessel_j(l, xs)
    oracle = np.array([j_integral(l, x) for x in xs])
    # relative where the value is not near a zero crossing
    assert np.all(np.abs(ours - oracle) <= 1e-9 * np.maximum(np.abs(oracle), 1e-3))


@pytest.mark.parametrize("l", [0, 1, 3])
def test_bessel_k_matches_integral_oracle(l):
    xs = np.linspace(0.05, 30, 100)
    ours = bessel_k(l, xs)
    oracle = np.array([k_integral(l, x) for x in xs])
    assert np.allclose(ours, oracle, rtol=1e-9, atol=0)


def test_bessel_k_reference_values():
    assert abs(bessel_k(1, 1.0) - 0.6019072) < 1e-6
    assert abs(bessel_k(1, 1.0) - k_integral(1, 1.0)) < 1e-12
    assert bessel_k(0, 30.0) < 1e-13
    xs = np.linspace(0.1, 20, 200)
    vals = bessel_k(2, xs)
    assert np.all(vals > 0) and np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_bessel_k_domain(x):
    with pytest.raises(ValueError):
        bessel_k(0, x)


def test_bessel_recurrence():
    xs = np.linspace(0.1, 40, 400)
    for l in range(0, 11):
        lhs = bessel_j(l - 1, xs) + bessel_j(l + 1, xs)
        rhs = 2 * l / xs * bessel_j(l, xs)
        scale = np.maximum(np.abs(bessel_j(l - 1, xs)), np.abs(bessel_j(l + 1, xs)))
        assert np.all(np.abs(lhs - rhs) <= 1e-10 * scale + 1e-300)


def test_hankel_identities():
    xs = np.linspace(0.2, 30, 60)
    for l in (0, 1, 4, -3):
        h1, h2 = hankel(1, l, xs), hankel(2, l, xs)
        assert np.all(np.abs(h1 + h2 - 2 * bessel_j(l, xs)) <= 1e-13 * np.abs(h1))
        assert np.allclose(h1, np.conj(h2), rtol=1e-15, atol=0)


def test_hankel_domain_and_kind():
    with pytest.raises(ValueError):
        hankel(1, 0, 0.0)
    with pytest.raises(ValueError):
        hankel(3, 0, 1.0)


def test_wronskian():
    xs = np.linspace(0.3, 30, 80)
    for l in (0, 1, 2, 7):
        w = bessel_j(l, xs) * bessel_derivative("Y", l, xs) - bessel_derivative("J", l, xs) * bessel_y(l, xs)
        assert np.allclose(w, 2 / (math.pi * xs), rtol=1e-10)


def test_derivative_identities():
    xs = np.linspace(0.1, 15, 40)
    assert np.allclose(bessel_derivative("J", 0, xs), -bessel_j(1, xs), rtol=1e-14, atol=1e-16)
    assert np.allclose(bessel_derivative("K", 0, xs), -bessel_k(1, xs), rtol=1e-14)
    assert abs(bessel_derivative("K", 0, 1.0) + 0.6019072) < 1e-6
    h = bessel_derivative("H1", 2, xs)
    assert np.allclose(h, bessel_derivative("J", 2, xs) + 1j * bessel_derivative("Y", 2, xs))


def test_derivative_against_step_halving_difference():
    x, l = 2.0, 2
    estimates = []
    for step in (1e-2, 5e-3, 2.5e-3):
        d1 = (bessel_j(l, x + step) - bessel_j(l, x - step)) / (2 * step)
        estimates.append(d1)
    # Richardson on the last pair removes the O(step^2) term
    extrap = (4 * estimates[2] - estimates[1]) / 3
    assert abs(extrap - bessel_derivative("J", l, x)) < 1e-8


def test_unknown_family():
    with pytest.raises(ValueError):
        bessel_derivative("Q", 0, 1.0)


# -- Wigner symbols -----------------------------------------------------------

def test_halfinteger_round_trip():
    assert HalfInteger.of(1.5).twice_value == 3
    assert HalfInteger.of(Fraction(-1, 2)).twice_value == -1
    assert float(HalfInteger(5)) == 2.5
    with pytest.raises(ValueError):
        HalfInteger.of(0.3)


def test_3j_selection_and_closed_forms():
    assert wigner_3j(1, 1, 1, 0, 1, 0) == 0.0
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0
    assert abs(wigner_3j(1, 1, 0, 0, 0, 0) + 1 / math.sqrt(3)) < 1e-15
    for tj in range(0, 7):
        j = Fraction(tj, 2)
        for tm in range(-tj, tj + 1, 2):
            m = Fraction(tm, 2)
            expected = (-1) ** int(j - m) / math.sqrt(2 * j + 1)
            assert abs(wigner_3j(j, j, 0, m, -m, 0) - expected) < 1e-14


def test_3j_rejects_bad_projection():
    with pytest.raises(ValueError):
        wigner_3j(1, 1, 1, 2, -1, -1)


def _half_range(tj):
    return [Fraction(t, 2) for t in range(-tj, tj + 1, 2)]


def test_3j_orthogonality_exhaustive():
    for tj1, tj2 in itertools.product(range(0, 7), repeat=2):
        for tj3 in range(abs(tj1 - tj2), min(tj1 + tj2, 6) + 1, 2):
            j1, j2, j3 = (Fraction(t, 2) for t in (tj1, tj2, tj3))
            for m3 in _half_range(tj3):
                total = sum((2 * j3 + 1) * wigner_3j(j1, j2, j3, m1, m2, m3) ** 2
                            for m1 in _half_range(tj1) for m2 in _half_range(tj2))
                assert abs(total - 1) < 1e-12


@st.composite
def valid_3j(draw):
    tj1 = draw(st.integers(0, 8))
    tj2 = draw(st.integers(0, 8))
    tj3 = draw(st.sampled_from(list(range(abs(tj1 - tj2), tj1 + tj2 + 1, 2))))
    tm1 = draw(st.sampled_from(list(range(-tj1, tj1 + 1, 2))))
    tm2 = draw(st.sampled_from(list(range(-tj2, tj2 + 1, 2))))
    assume(abs(tm1 + tm2) <= tj3)
    js = tuple(Fraction(t, 2) for t in (tj1, tj2, tj3))
    ms = (Fraction(tm1, 2), Fraction(tm2, 2), Fraction(-tm1 - tm2, 2))
    return js, ms


@settings(max_examples=200, deadline=None)
@given(valid_3j())
def test_3j_permutation_symmetry(case):
    (j1, j2, j3), (m1, m2, m3) = case
    value = wigner_3j(j1, j2, j3, m1, m2, m3)
    assert abs(wigner_3j(j2, j3, j1, m2, m3, m1) - value) < 1e-13
    assert abs(wigner_3j(j3, j1, j2, m3, m1, m2) - value) < 1e-13
    sign = -1 if int(j1 + j2 + j3) % 2 else 1
    assert abs(wigner_3j(j2, j1, j3, m2, m1, m3) - sign * value) < 1e-13
    assert abs(wigner_3j(j1, j2, j3, -m1, -m2, -m3) - sign * value) < 1e-13


def test_6j_reference_via_3j_contraction():
    assert abs(wigner_6j(1, 1, 1, 1, 1, 1) - 1 / 6) < 1e-12
    assert abs(six_j_from_3j(1, 1, 1, 1, 1, 1) - 1 / 6) < 1e-12
    for args in [(1.5, 1.5, 1, 1, 0.5, 1.5), (1.5, 3, 1.5, 2, 0.5, 1), (2, 1, 1, 1, 2, 1)]:
        assert abs(wigner_6j(*args) - six_j_from_3j(*args)) < 1e-12


def test_6j_one_zero_argument():
    for tj1, tj2 in itertools.product(range(0, 7), repeat=2):
        for tj3 in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
            j1, j2, j3 = (Fraction(t, 2) for t in (tj1, tj2, tj3))
            sign = -1 if int(j1 + j2 + j3) % 2 else 1
            expected = sign / math.sqrt((2 * j2 + 1) * (2 * j3 + 1))
            assert abs(wigner_6j(j1, j2, j3, 0, j3, j2) - expected) < 1e-13


def test_6j_triangle_violation():
    assert wigner_6j(1, 1, 3, 1, 1, 1) == 0.0
    assert wigner_6j(0.5, 0.5, 1, 3, 1, 1) == 0.0


def test_clebsch_gordan_completeness():
    # sum over total j of |<1 m1 1 m2|j m>|^2 is 1
    for m1, m2 in itertools.product((-1, 0, 1), repeat=2):
        total = sum(clebsch_gordan(1, m1, 1, m2, j, m1 + m2) ** 2 for j in (0, 1, 2) if abs(m1 + m2) <= j)
        assert abs(total - 1) < 1e-14
    assert abs(clebsch_gordan(1, 1, 1, 1, 2, 2) - 1) < 1e-15
