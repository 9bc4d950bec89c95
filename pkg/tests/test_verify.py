import math
import warnings

import numpy as np
import pytest

from oracles import hedberg_interior_ratio, log_tail_oracle, power_tail_closed_form
from roughspace import (DomainError, ExponentField, GridFunction, OperatorConfig,
                        PreconditionError, RoughKernel, WeightFunction, box_domain,
                        check_vanishing_condition, check_weight_positivity, check_zygmund,
                        empirical_operator_norm, luxemburg_norm, riesz_potential,
                        singular_integral, verify_adams_pointwise, verify_chi_scaling,
                        verify_commutator_pointwise, verify_hedberg, verify_size_condition,
                        verify_spanne_pointwise)
from roughspace.grid import dyadic_radii, dyadic_radii_from
from roughspace.specs import random_suite

E = box_domain(0.0, 1.0, 100)


def const(v, dom=E):
    return ExponentField.constant(dom, v)


def cfg(dom, alpha=0.25, kernel=None):
    return OperatorConfig(kernel or RoughKernel.constant(dom.n),
                          None if alpha is None else ExponentField.constant(dom, alpha))


def test_positivity_examples():
    r = dyadic_radii(E)
    ok = check_weight_positivity(WeightFunction.power(0.5), E, [[0.5]], r)
    assert ok.passed and ok.sup_ratio == pytest.approx(r.min() ** 0.5)
    bad = check_weight_positivity(WeightFunction(lambda E, pos, r: np.maximum(0, r - 0.5)),
                                  E, [[0.5]], r)
    assert not bad.passed
    table = WeightFunction.table([0.01, 0.1, 1.0], [1.0, 0.0, 1.0])
    rep = check_weight_positivity(table, E, [[0.5]], [0.5, 0.1, 0.05])
    assert not rep.passed and rep.details["offending"] == ([0.495], 0.1)


def test_vanishing_examples():
    dom = box_domain(0.0, 1.0, 400)
    r = dyadic_radii(dom)
    p = const(2.0, dom)
    ok = check_vanishing_condition(WeightFunction.power(-2.0), p, [[0.5]], r)
    assert ok.passed
    assert np.allclose(ok.lhs, r ** 0.5)
    flat = check_vanishing_condition(WeightFunction.power(0.0), p, [[0.5]], r)
    assert not flat.passed
    exact = check_vanishing_condition(WeightFunction.power(-1.0), p, [[0.5]], r)
    assert not exact.passed and np.allclose(exact.lhs, 1.0)


def test_zygmund_power_matches_closed_form():
    D = E.diam
    a, b, p, q, al = 0.5, 1.0, 2.0, 4.0, 0.25
    rep = check_zygmund(WeightFunction.power(a), WeightFunction.power(b), const(p), const(q),
                        const(al), None, False, [[0.5]], dyadic_radii(E))
    beta = a / p + al
    want = np.array([power_tail_closed_form(beta, r, D) for r in rep.r])
    assert np.allclose(rep.lhs, want, rtol=1e-3)
    assert np.allclose(rep.rhs, rep.r ** (b / q))


def test_zygmund_log_factor_matches_oracle():
    D = E.diam
    rep = check_zygmund(WeightFunction.power(0.5), WeightFunction.power(0.0), const(2.0),
                        const(4.0), const(0.25), None, True, [[0.5]], dyadic_radii(E))
    want = np.array([log_tail_oracle(0.5, r, D) for r in rep.r])
    assert np.allclose(rep.lhs, want, rtol=1e-3)
    # The log factor alone makes the integral grow like ln(1/r) against a flat right side.
    assert not rep.passed and rep.diagnosis == "log-divergent"


def test_zygmund_unit_weight_is_log_divergent():
    rep = check_zygmund(WeightFunction.power(0.0), WeightFunction.power(0.0), const(2.0),
                        const(2.0), const(0.0), None, False, [[0.5]], dyadic_radii(E))
    assert not rep.passed and rep.diagnosis == "log-divergent"
    assert np.allclose(rep.lhs, np.log(E.diam / rep.r), rtol=1e-3)


def test_zygmund_order_variant_needs_distinct_q():
    with pytest.raises(DomainError):
        check_zygmund(WeightFunction.power(0.0), None, const(2.0), const(2.0), const(0.25),
                      None, False, [[0.5]], dyadic_radii(E))
    with pytest.raises(DomainError):
        check_zygmund(WeightFunction.power(0.0), WeightFunction.power(0.0), const(2.0), None,
                      const(0.25), None, False, [[0.5]], dyadic_radii(E))


def test_zygmund_more_radii_never_lower_the_sup():
    args = (WeightFunction.power(-1.0), WeightFunction.power(-2.0), const(2.0), const(4.0),
            const(0.25), None, False, [[0.5]])
    r = dyadic_radii(E)
    assert check_zygmund(*args, r[::2]).sup_ratio <= check_zygmund(*args, r).sup_ratio


def test_hedberg_zero_and_unit_function():
    dom = box_domain(-1.0, 1.0, 400)
    zero = verify_hedberg(GridFunction.constant(dom, 0.0), cfg(dom, 0.5))
    assert zero.passed and zero.constant == 0.0
    one = verify_hedberg(GridFunction.constant(dom, 1.0), cfg(dom, 0.5),
                         centers=[[dom.points[dom.locate([0.0])][0]]],
                         radii=dyadic_radii_from(0.5, 16 * dom.h))
    assert one.passed
    assert one.constant == pytest.approx(hedberg_interior_ratio(0.5), rel=0.01)


def test_hedberg_rejects_negative_functions():
    dom = box_domain(-1.0, 1.0, 100)
    with pytest.raises(PreconditionError):
        verify_hedberg(GridFunction.constant(dom, -1.0), cfg(dom, 0.5))


def test_estimates_with_zero_function_pass_with_zero_constant():
    dom = box_domain(0.0, 1.0, 100)
    zero = GridFunction.constant(dom, 0.0)
    rep = verify_spanne_pointwise(zero, const(2.0, dom), None, cfg(dom), refine=False)
    assert rep.passed and rep.constant == 0.0
    rep = verify_adams_pointwise(zero, const(1.5, dom), cfg(dom, 0.5), refine=False)
    assert rep.passed and rep.constant == 0.0


def test_spanne_rejects_wrong_target_exponent():
    dom = box_domain(0.0, 1.0, 100)
    f = GridFunction.constant(dom, 1.0)
    with pytest.raises(PreconditionError):
        verify_spanne_pointwise(f, const(2.0, dom), const(3.0, dom), cfg(dom), refine=False)


def test_commutator_rejects_inconsistent_exponents():
    dom = box_domain(0.0, 1.0, 100)
    f = GridFunction.constant(dom, 1.0)
    with pytest.raises(PreconditionError):
        verify_commutator_pointwise(f, f, const(2.0, dom), const(8.0, dom), const(9.0, dom),
                                    None, const(0.0, dom), cfg(dom), refine=False)


def test_size_condition_passes():
    dom = box_domain(-1.0, 1.0, 200)
    f = GridFunction.from_function(dom, lambda x: (np.abs(x[:, 0]) > 0.7) * 1.0)
    rep = verify_size_condition(f, cfg(dom, 0.3, RoughKernel.sign()), [0.0], 0.3)
    assert rep.passed and rep.constant <= 1 + 1e-9


def test_chi_scaling_constant_exponent():
    dom = box_domain(-1.0, 1.0, 800)
    rep = verify_chi_scaling(const(2.0, dom), [0.0])
    assert rep.passed and rep.slope == pytest.approx(0.5, abs=0.05)


def test_identity_operator_norm_is_one():
    dom = box_domain(0.0, 1.0, 100)
    p = const(2.0, dom)
    norm = lambda f: luxemburg_norm(f, p).value
    suite = random_suite(dom, 42, count=5)
    assert empirical_operator_norm(lambda f: f, suite, norm, norm) == 1.0


def test_operator_norm_skips_zero_inputs():
    dom = box_domain(0.0, 1.0, 100)
    p = const(2.0, dom)
    norm = lambda f: luxemburg_norm(f, p).value
    suite = [GridFunction.constant(dom, 0.0)] + random_suite(dom, 1, count=2)
    with pytest.warns(UserWarning):
        assert empirical_operator_norm(lambda f: f, suite, norm, norm) == 1.0
    with pytest.raises(DomainError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            empirical_operator_norm(lambda f: f, suite[:1], norm, norm)
    with pytest.raises(DomainError):
        empirical_operator_norm(lambda f: f, [], norm, norm)


def test_riesz_operator_norm_is_refinement_stable():
    vals = []
    for cells in (100, 200):
        dom = box_domain(0.0, 1.0, cells)
        p, q = const(2.0, dom), const(4.0, dom)
        c = cfg(dom, 0.25)
        vals.append(empirical_operator_norm(lambda f: riesz_potential(f, c),
                                            random_suite(dom, 42, count=20),
                                            lambda f: luxemburg_norm(f, p).value,
                                            lambda g: luxemburg_norm(g, q).value))
    assert math.isfinite(vals[0]) and 0.5 <= vals[1] / vals[0] <= 2.0


def test_hilbert_like_operator_norm_is_finite():
    dom = box_domain(-1.0, 1.0, 200)
    p = const(2.0, dom)
    c = cfg(dom, None, RoughKernel.sign())
    smooth = [GridFunction.from_function(dom, lambda x, k=k: np.sin((k + 1) * np.pi * x[:, 0])
                                         * (1 - x[:, 0] ** 2) ** 2) for k in range(4)]
    val = empirical_operator_norm(lambda f: singular_integral(f, c), smooth,
                                  lambda f: luxemburg_norm(f, p).value,
                                  lambda g: luxemburg_norm(g, p).value)
    assert math.isfinite(val) and val < 10
