import math

import numpy as np
import pytest

from roughspace import DomainError
from roughspace.quadrature import (cell_power_integral, centred_cell_power_integral,
                                   gauss_legendre, interval_power_integral, log_midpoint_nodes,
                                   rectangle_power_integral)
from roughspace.reports import loglog_slope, refine_ratio, safe_ratio


def brute_rect(e, lo, hi, m=1200):
    xs = lo[0] + (np.arange(m) + 0.5) * (hi[0] - lo[0]) / m
    ys = lo[1] + (np.arange(m) + 0.5) * (hi[1] - lo[1]) / m
    X, Y = np.meshgrid(xs, ys)
    return float((np.hypot(X, Y) ** e).sum() * (hi[0] - lo[0]) * (hi[1] - lo[1]) / m ** 2)


def test_interval_power_integral():
    assert interval_power_integral(-0.5, -1.0, 1.0) == pytest.approx(4.0)
    assert interval_power_integral(1.0, 1.0, 2.0) == pytest.approx(1.5)
    assert interval_power_integral(0.0, 2.0, 1.0) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        interval_power_integral(-1.0, 0.0, 1.0)


def test_centred_cell_in_one_dimension():
    h, a = 0.01, 0.3
    assert centred_cell_power_integral(1, a - 1, h) == pytest.approx(2 * (h / 2) ** a / a)


@pytest.mark.parametrize("e", [-1.5, -0.5, 0.0, 1.0])
def test_rectangle_power_integral_away_from_origin(e):
    lo, hi = (0.3, -0.2), (0.9, 0.4)
    assert rectangle_power_integral(e, lo, hi) == pytest.approx(brute_rect(e, lo, hi), rel=1e-5)


def test_centred_square_matches_polar_formula():
    # Over [-1,1]^2 with e = 0 the integral is the area.
    assert centred_cell_power_integral(2, 0.0, 2.0) == pytest.approx(4.0)
    e = -1.0
    # int over the unit square [-1/2,1/2]^2 of 1/|z| = 4 ln(1 + sqrt 2).
    assert centred_cell_power_integral(2, e, 1.0) == pytest.approx(4 * math.log(1 + math.sqrt(2)))
    with pytest.raises(DomainError):
        centred_cell_power_integral(2, -2.0, 1.0)


def test_cell_power_integral_dispatch():
    assert cell_power_integral(1, 0.0, [0.0], [2.0]) == pytest.approx(2.0)
    assert cell_power_integral(2, 0.0, [0.0, 0.0], [1.0, 2.0]) == pytest.approx(2.0)


def test_gauss_legendre_is_exact_for_polynomials():
    assert gauss_legendre(lambda x: x ** 7 - x, -1.0, 3.0) == pytest.approx(
        (3 ** 8 - 1) / 8 - (9 - 1) / 2)


def test_log_midpoint_rule():
    t, w = log_midpoint_nodes(0.01, 1.0)
    assert t.size == 256 and w.sum() == pytest.approx(0.99)
    assert np.dot(w, 1 / t) == pytest.approx(math.log(100), rel=1e-4)


def test_report_helpers():
    assert np.array_equal(safe_ratio(np.array([0.0, 1.0]), np.array([0.0, 2.0])), [0.0, 0.5])
    assert math.isinf(safe_ratio(np.array([1.0]), np.array([0.0]))[0])
    assert refine_ratio(2.0, 3.0) == 1.5
    assert refine_ratio(0.0, 0.0) == 1.0
    assert loglog_slope([1, 2, 4], [3, 12, 48]) == pytest.approx(2.0)
