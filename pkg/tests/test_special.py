import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import _quiet_quad, li_quadrature
from primerem.errors import DomainError, SingularityError
from primerem.special import (
    ei,
    li,
    li_antiderivative,
    li_array,
    weight,
    weight_antiderivative,
)

# frozen from the principal-value quadrature oracle in tests/oracles.py
LI_2 = 1.0451637801174951
LI_10 = 6.165599504787302
LI_100 = 30.126141584079637
LI_ROOT = 1.4513692348833802


def test_li_frozen_values():
    assert li(2).value == pytest.approx(LI_2, rel=1e-12)
    assert li(10).value == pytest.approx(LI_10, rel=1e-12)
    assert li(100).value == pytest.approx(LI_100, rel=1e-12)
    assert li(2).value == pytest.approx(1.045163780, abs=1e-9)


def test_li_root_between_1_4_and_1_5():
    assert li(1.4).value < 0 < li(1.5).value
    assert abs(li(LI_ROOT).value) < 1e-13


@pytest.mark.parametrize("x", [0.0, -3.0])
def test_li_domain(x):
    with pytest.raises(DomainError):
        li(x)


def test_li_singularity():
    with pytest.raises(SingularityError):
        li(1.0)
    with pytest.raises(SingularityError):
        ei(0.0)


def test_li_branches_against_mpmath():
    # series (u <= 40), asymptotic (u > 40), E1 series and continued fraction (x < 1)
    for x in [1e-30, 1e-5, 0.2, 0.5, 0.9, 0.999, 1.001, 1.2, 3.0, 1e3, 1e9, 1e12, 1e17, 2.4e17, 1e18, 1e25, 1e40]:
        ref = float(mpmath.li(x))
        assert li(x).value == pytest.approx(ref, rel=2e-14, abs=1e-15), x


def test_li_error_estimate_invariant():
    for x in np.geomspace(2, 1e12, 40):
        v = li(float(x))
        assert 0 <= v.abs_error <= 1e-12 * max(1.0, abs(v.value))
        assert abs(v.value - float(mpmath.li(float(x)))) <= max(v.abs_error, 1e-15 * abs(v.value))


def test_li_strictly_increasing():
    xs = np.geomspace(1.0001, 1e15, 3000)
    assert np.all(np.diff(li_array(xs)) > 0)


def test_li_array_matches_scalar():
    xs = np.array([2.0, 17.5, 1e6, 0.3])
    assert li_array(xs).tolist() == [li(x).value for x in xs]


def test_li_quadrature_oracle_random_points():
    rng = random.Random(11)
    for _ in range(15):
        x = math.exp(rng.uniform(math.log(2), math.log(1e6)))
        assert li(x).value == pytest.approx(li_quadrature(x), rel=1e-11)


def _central(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def _assert_second_order(f, fprime, fthird, x, scale):
    """Central differences: error = h^2 f'''/6 + O(h^4) + roundoff."""
    errs = []
    for h in (1e-2, 1e-3, 1e-4):
        err = abs(_central(f, x, h) - fprime)
        predicted = h * h * abs(fthird) / 6
        roundoff = 16 * np.finfo(float).eps * scale / h
        assert abs(err - predicted) <= 0.05 * predicted + roundoff, (h, err, predicted)
        errs.append(err)
    order = math.log10(errs[0] / errs[1])
    assert 1.9 < order < 2.1


def test_li_antiderivative_finite_difference():
    x = 10.0
    # L''' = li'' = -1/(x ln^2 x)
    _assert_second_order(li_antiderivative, li(x).value, -1 / (x * math.log(x) ** 2), x,
                         abs(li_antiderivative(x)))


def test_li_antiderivative_against_quadrature():
    ref = _quiet_quad(lambda t: li_quadrature(t), 2, 10, epsrel=1e-13)[0]
    assert li_antiderivative(10) - li_antiderivative(2) == pytest.approx(ref, rel=1e-9)


def test_li_antiderivative_deterministic_and_domain():
    assert li_antiderivative(123.456) == li_antiderivative(123.456)
    with pytest.raises(DomainError):
        li_antiderivative(1.5)


def test_weight_antiderivative_at_e_squared():
    s = 0.5 + 0.3
    assert weight_antiderivative(math.e**2, 0.3) == pytest.approx(-math.exp(-2 * s) / s**2, rel=1e-15)


def test_weight_antiderivative_finite_difference():
    x, d = 50.0, 0.3
    mpmath.mp.dps = 40
    w_mp = lambda t: (mpmath.log(t) - 2) * t ** (-mpmath.mpf(3) / 2 - mpmath.mpf(d))  # noqa: E731
    w2 = float(mpmath.diff(w_mp, x, 2))
    _assert_second_order(lambda t: weight_antiderivative(t, d), weight(x, d), w2, x,
                         abs(weight_antiderivative(x, d)))


def test_weight_antiderivative_against_quadrature():
    a, b, d = 2.0, 100.0, 0.5
    ref = _quiet_quad(lambda t: (math.log(t) - 2) * t ** (-1.5 - d), a, b, epsrel=1e-13)[0]
    got = weight_antiderivative(b, d) - weight_antiderivative(a, d)
    assert got == pytest.approx(ref, rel=1e-12)


@given(st.floats(0.01, 0.5), st.floats(1e3, 1e12))
@settings(max_examples=50, deadline=None)
def test_weight_antiderivative_vanishes_at_infinity(d, x):
    w1 = abs(weight_antiderivative(x, d))
    w2 = abs(weight_antiderivative(10 * x, d))
    assert w2 < w1
    assert abs(weight_antiderivative(1e300, d)) < 1e-3


def test_weight_domain():
    with pytest.raises(DomainError):
        weight_antiderivative(1.0, 0.3)
    with pytest.raises(DomainError):
        weight_antiderivative(5.0, -0.6)
