import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_ball_cells
from roughspace import Ball, DomainError, ball_measure, box_domain, disk_domain, dyadic_radii
from roughspace.grid import (Grid, dyadic_radii_from, lattice_ball_measure, lattice_centers,
                             maximal_radii, truncated_ball_cells)


@pytest.mark.parametrize("n,r,want", [(1, 1.0, 2.0), (2, 1.0, math.pi), (2, 0.5, math.pi / 4)])
def test_ball_measure_values(n, r, want):
    assert ball_measure(n, r) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_ball_measure_rejects_nonpositive_radius(r):
    with pytest.raises(DomainError):
        ball_measure(2, r)


@given(st.floats(1e-3, 1e3), st.sampled_from([1, 2]))
def test_ball_measure_doubling_is_exact(r, n):
    assert ball_measure(n, 2 * r) == 2 ** n * ball_measure(n, r)


def test_grid_invariants():
    with pytest.raises(DomainError):
        Grid(1, (0.0,), (1.0,), 3)
    with pytest.raises(DomainError):
        Grid(3, (0, 0, 0), (1, 1, 1), 4)
    g = Grid(1, (0.0,), (1.0,), 10)
    c = g.centers()[:, 0]
    assert g.h == pytest.approx(0.1)
    assert np.all((c > 0) & (c < 1))


def test_centres_are_symmetric_about_the_midpoint():
    E = box_domain(-1.0, 1.0, 400)
    x = E.points[:, 0]
    assert np.array_equal(x, -x[::-1])


def test_truncated_ball_examples():
    E = box_domain(0.0, 1.0, 100)
    inside = truncated_ball_cells(E, Ball([0.5], 0.05))
    assert inside.tolist() == list(range(45, 55))
    assert truncated_ball_cells(E, Ball([0.5], 2 * E.diam)).size == E.size
    first = E.points[0]
    assert truncated_ball_cells(E, Ball(first, E.h / 2)).tolist() == [0]


def test_truncated_ball_matches_brute_force_in_2d():
    E = disk_domain(0.0, 0.0, 1.0, 30)
    for k in (0, 100, 350):
        x = E.points[k]
        for r in (0.05, 0.2, 0.77):
            got = truncated_ball_cells(E, Ball(x, r)).tolist()
            assert got == brute_ball_cells(E.points, x, r)


def test_truncated_ball_centre_outside_domain():
    E = disk_domain(0.0, 0.0, 1.0, 20)
    with pytest.raises(DomainError):
        truncated_ball_cells(E, Ball([0.99, 0.99], 0.1))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 0.5), st.floats(0.01, 0.5), st.integers(0, 399))
def test_truncated_ball_monotone_in_radius(r1, r2, k):
    E = box_domain(0.0, 1.0, 400)
    lo, hi = sorted((r1, r2))
    a = set(truncated_ball_cells(E, Ball(E.points[k], lo)).tolist())
    b = set(truncated_ball_cells(E, Ball(E.points[k], hi)).tolist())
    assert a <= b


def test_interior_ball_measure_close_to_continuum():
    E = box_domain((-1.0, -1.0), (1.0, 1.0), 200)
    x = E.points[E.locate([0.0, 0.0])]
    for r in (0.1, 0.3, 0.6):
        count = truncated_ball_cells(E, Ball(x, r)).size
        assert count * E.cell_volume == pytest.approx(ball_measure(2, r), rel=0.05)


def test_dyadic_radii_examples():
    r = dyadic_radii_from(1.0, 0.01)
    assert r.size == 7 and r[0] == 1.0 and r[-1] == 0.015625
    assert dyadic_radii_from(1.0, 0.5).tolist() == [1.0, 0.5]
    assert dyadic_radii_from(2.0, 0.01)[0] == 2.0
    assert np.all(np.diff(r) < 0)
    assert dyadic_radii_from(1.0, 0.5, k_min=4).size == 4


def test_dyadic_radii_start_at_diameter():
    E = box_domain(0.0, 1.0, 100)
    assert dyadic_radii(E)[0] == E.diam == pytest.approx(0.99)


def test_maximal_radii_include_small_radii():
    E = box_domain(0.0, 1.0, 100)
    r = maximal_radii(E)
    assert np.all(np.diff(r) < 0)
    assert np.any(np.isclose(r, 1.5 * E.h)) and np.any(np.isclose(r, 3 * E.h))


def test_lattice_ball_measure_counts_lattice_points():
    E = box_domain((-1.0, -1.0), (1.0, 1.0), 200)
    x = E.points[E.locate([0.0025, 0.0025])]
    for r in (0.013, 0.05, 0.3337):
        count = truncated_ball_cells(E, Ball(x, r)).size
        assert lattice_ball_measure(2, r, E.h) == pytest.approx(count * E.cell_volume)
    assert lattice_ball_measure(1, 1.5, 1.0) == 3.0
    assert lattice_ball_measure(1, 3.0, 1.0) == 5.0  # ties at distance 3 are outside


def test_domain_set_properties():
    E = box_domain((0.0, 0.0), (2.0, 2.0), 10)
    assert E.measure == pytest.approx(E.size * E.h ** 2)
    assert E.diam > 0
    D = disk_domain(0.0, 0.0, 1.0, 40)
    assert D.size < 1600
    assert D.refine().size > 3 * D.size
    with pytest.raises(DomainError):
        D.locate([0.99, 0.99])


def test_lattice_centers_subset():
    E = box_domain(0.0, 1.0, 100)
    c = lattice_centers(E, 16)
    assert len(c) == 16
    assert all(E.contains(x) for x in c)
