import math

import numpy as np
import pytest

from primerem.errors import DomainError
from primerem.quadrature import gauss_kronrod


def test_polynomials_exact_up_to_degree_22():
    # K15 integrates degree <= 22 exactly on one interval
    for deg in range(0, 23, 3):
        r = gauss_kronrod(lambda x: x**deg, 0.0, 1.0, rel_tol=1e-14)
        assert r.value == pytest.approx(1 / (deg + 1), rel=1e-14)


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (np.sin, 0.0, math.pi, 2.0),
        (np.exp, -3.0, 4.0, math.exp(4) - math.exp(-3)),
        (lambda x: 1 / (1 + x * x), -50.0, 50.0, 2 * math.atan(50.0)),
        (np.sqrt, 0.0, 1.0, 2 / 3),
    ],
)
def test_reported_error_covers_actual(f, a, b, exact):
    r = gauss_kronrod(f, a, b, rel_tol=1e-10)
    assert r.converged
    assert abs(r.value - exact) <= max(r.abs_error, 1e-15 * abs(exact))
    assert abs(r.value - exact) <= 1e-9 * abs(exact)


def test_breakpoints_handle_step_functions():
    r = gauss_kronrod(np.floor, 0.0, 10.0, breakpoints=np.arange(1, 10))
    assert r.value == pytest.approx(45.0, rel=1e-15)
    assert r.intervals == 10


def test_empty_and_reversed():
    assert gauss_kronrod(np.sin, 1.0, 1.0).value == 0.0
    with pytest.raises(DomainError):
        gauss_kronrod(np.sin, 2.0, 1.0)


def test_deterministic():
    f = lambda x: np.log(x) / (1 + x)  # noqa: E731
    assert gauss_kronrod(f, 1e-6, 7.0, 1e-11) == gauss_kronrod(f, 1e-6, 7.0, 1e-11)
