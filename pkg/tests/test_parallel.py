import numpy as np
import pytest

from roughspace import (ExponentField, OperatorConfig, RoughKernel, box_domain,
                        fractional_maximal, morrey_norm, riesz_potential)
from roughspace._parallel import chunk_bounds, map_chunks, worker_count
from roughspace.grid import maximal_radii
from roughspace.specs import random_function


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv("ROUGHSPACE_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("ROUGHSPACE_THREADS", "0")
    assert worker_count() == 1


def test_chunks_cover_range_in_order():
    assert chunk_bounds(7, 3) == [(0, 3), (3, 6), (6, 7)]
    assert map_chunks(lambda lo, hi: list(range(lo, hi)), 7, 3) == [[0, 1, 2], [3, 4, 5], [6]]


def _outputs():
    E = box_domain((-1.0, -1.0), (1.0, 1.0), 24)
    f = random_function(E, 2)
    cfg = OperatorConfig(RoughKernel.cosine(2), ExponentField.constant(E, 0.5))
    p = ExponentField.constant(E, 2.0)
    return (riesz_potential(f, cfg).values,
            fractional_maximal(f, cfg, maximal_radii(E)).values,
            np.array([morrey_norm(f, p, ExponentField.constant(E, 0.5), E.points[::9],
                                  [0.5, 0.25, 0.125]).value]))


def test_results_do_not_depend_on_worker_count(monkeypatch):
    monkeypatch.setenv("ROUGHSPACE_THREADS", "1")
    serial = _outputs()
    for n in ("2", "5"):
        monkeypatch.setenv("ROUGHSPACE_THREADS", n)
        for a, b in zip(serial, _outputs()):
            assert np.array_equal(a, b)
