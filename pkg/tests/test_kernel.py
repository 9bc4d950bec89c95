import math

import numpy as np
import pytest

from roughspace import DomainError, RoughKernel, box_domain, verify_ball_norm_scaling


def test_evaluate_examples():
    assert RoughKernel.constant(2).evaluate([3.0, 4.0]) == 1.0
    assert RoughKernel.sign().evaluate([-0.2]) == -1.0
    assert abs(RoughKernel.cosine(1).evaluate([0.0, 5.0])) < 1e-15
    with pytest.raises(DomainError):
        RoughKernel.sign().evaluate([0.0])


@pytest.mark.parametrize("mu", [1e-3, 1.0, 1e3])
def test_homogeneity(mu):
    k = RoughKernel.cosine(3)
    v = np.array([0.3, -0.7])
    assert k.evaluate(mu * v) == k.evaluate(v)
    assert RoughKernel.sign().evaluate([mu]) == 1.0


def test_sphere_norm_examples():
    assert RoughKernel.constant(2).sphere_norm(2) == pytest.approx(math.sqrt(2 * math.pi))
    assert RoughKernel.sign().sphere_norm(3) == pytest.approx(2 ** (1 / 3))
    assert RoughKernel.cosine(1).sphere_norm(2) == pytest.approx(math.sqrt(math.pi))
    assert RoughKernel.sign().sphere_norm(math.inf) == 1.0
    with pytest.raises(DomainError):
        RoughKernel.constant(2).sphere_norm(1.0)


def test_sphere_norm_doubles_with_kernel():
    k = RoughKernel.cosine(2)
    assert k.scaled(2.0).sphere_norm(3) == pytest.approx(2 * k.sphere_norm(3), rel=1e-15)


def test_sphere_norm_spectral_convergence():
    a = RoughKernel(2, lambda t: np.cos(3 * t) + 0.5 * np.sin(t), nodes=64).sphere_norm(2)
    b = RoughKernel(2, lambda t: np.cos(3 * t) + 0.5 * np.sin(t), nodes=128).sphere_norm(2)
    assert abs(a - b) < 1e-10


def test_mean_zero_defect_examples():
    assert RoughKernel.sign().mean_zero_defect() == 0.0
    assert RoughKernel.constant(2).mean_zero_defect() == pytest.approx(2 * math.pi)
    assert RoughKernel(2, lambda t: np.cos(3 * t), nodes=64).mean_zero_defect() < 1e-12


def test_mean_zero_required_rejects_constant():
    with pytest.raises(DomainError):
        RoughKernel.constant(1, mean_zero_required=True)
    RoughKernel.sign(mean_zero_required=True)


def test_table_kernel_nearest_node():
    vals = np.arange(8, dtype=float)
    k = RoughKernel.from_table(vals)
    assert k.evaluate([1.0, 0.0]) == 0.0
    assert k.evaluate([0.0, 1.0]) == 2.0
    assert k.sphere_integral() == pytest.approx(vals.sum() * 2 * math.pi / 8)


def test_absolute_and_means():
    k = RoughKernel.cosine(1)
    assert k.absolute().is_nonnegative
    assert k.angular_mean(absolute=True) == pytest.approx(2 / math.pi, rel=1e-4)


def test_ball_norm_scaling_examples():
    E1 = box_domain(-1.0, 1.0, 400)
    rep = verify_ball_norm_scaling(RoughKernel.constant(1), E1, [0.0], s=2)
    assert rep.passed and rep.slope == pytest.approx(0.5, abs=0.05)
    rep = verify_ball_norm_scaling(RoughKernel.sign(), E1, [0.0], s=math.inf)
    assert rep.passed and np.all(rep.values == 1.0)
    E2 = box_domain((-1.0, -1.0), (1.0, 1.0), 100)
    rep = verify_ball_norm_scaling(RoughKernel.constant(2), E2, [0.0, 0.0], s=2)
    assert rep.passed and rep.slope == pytest.approx(1.0, abs=0.05)


def test_ball_norm_scaling_errors():
    E1 = box_domain(-1.0, 1.0, 40)
    with pytest.raises(DomainError):
        verify_ball_norm_scaling(RoughKernel.constant(2), E1, [0.0], s=2)
    with pytest.raises(DomainError):
        verify_ball_norm_scaling(RoughKernel.constant(1), E1, [0.0], s=1.0)
