"""Admissibility checkers for weights and empirical verification of pointwise estimates.

Inequalities ``LHS <= C * RHS`` with unspecified constants are read as:
the empirical constant ``C_emp = max LHS / RHS`` over a finite sweep is
finite, and stays within a factor 2 when the grid is refined once.
"""

import math
import warnings

import numpy as np

from .errors import DomainError, PreconditionError
from .exponents import (ExponentField, check_alpha_assumptions, conjugate_exponent,
                        reciprocal_sum, same_domain)
from .grid import (Ball, ball_measure, dyadic_radii, inside, lattice_centers, maximal_radii,
                   truncated_ball_cells, unit_ball_volume)
from .norms import BallNorms, GridFunction, campanato_norm, characteristic, luxemburg_norm
from .operators import (OperatorConfig, commutator, dominating_potential, fractional_maximal,
                        riesz_local, riesz_potential, rough_maximal, size_bound)
from .quadrature import log_midpoint_nodes
from .reports import (ConditionReport, EstimateReport, VerificationReport, loglog_slope,
                      refine_ratio, safe_ratio)

T_NODES = 256
REFINE_BAND = (0.5, 2.0)
HEDBERG_TOL = 0.1
SLOPE_TOL = 0.05
RELATION_TOL = 1e-9


# ------------------------------------------------------------------ helpers
def _snap(E, centers):
    """Cell centres of the member cells containing ``centers``."""
    pts = np.atleast_2d(np.asarray(centers, dtype=float))
    if E.n == 1 and pts.shape[1] != 1:
        pts = pts.reshape(-1, 1)
    pos = np.array([E.locate(x) for x in pts], dtype=np.int64)
    return E.points[pos], pos


def _default_centers(E, centers, k=16):
    return lattice_centers(E, k) if centers is None else centers


def _resample(obj, E):
    if obj is None:
        return None
    if isinstance(obj, OperatorConfig):
        return obj if obj.alpha is None else obj.with_alpha(obj.alpha.resample(E))
    if isinstance(obj, (list, tuple)):
        return type(obj)(_resample(o, E) for o in obj)
    return obj.resample(E)


def _in_band(ratio):
    return REFINE_BAND[0] <= ratio <= REFINE_BAND[1]


def _nodes(r, D, count=T_NODES):
    return log_midpoint_nodes(r, D, count)


def _column(values, k):
    return np.repeat(np.asarray(values), k, axis=0)


def _estimate(name, pts, radii_per, lhs, rhs, runner=None, refine=False, notes=(),
              gate=None):
    """Assemble an :class:`EstimateReport`, re-running on ``E.refine()`` if asked."""
    ratio = safe_ratio(lhs, rhs)
    c = float(ratio.max()) if ratio.size else 0.0
    refinement = None
    if refine:
        c2 = runner()
        refinement = (c, c2)
    if gate is None:
        passed = math.isfinite(c) and (refinement is None or _in_band(refine_ratio(*refinement)))
    else:
        passed = gate(c, refinement)
    return EstimateReport(name, pts, radii_per, np.asarray(lhs, float), np.asarray(rhs, float),
                          c, passed, refinement, list(notes))


def _below(radii, top):
    # The sweep is fixed on the coarse grid so both resolutions see the same (x, r).
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    r = r[r < top]
    if r.size == 0:
        raise DomainError(f"no sweep radius lies below {top:g}")
    return r


def _constant(ratio):
    return float(np.max(ratio)) if np.size(ratio) else 0.0


# ---------------------------------------------------------- weight checks
def check_weight_positivity(w, E, centers, radii):
    """Positivity of ``w`` on the sweep, plus the large-radius condition.

    The second condition (``inf over t > 1 of sup_x w(x, t) > 0``) is only
    evaluated on sweep radii above 1 and is reported as unreachable otherwise.
    """
    pts, pos = _snap(E, centers)
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    if r.size == 0 or pos.size == 0:
        raise DomainError("positivity check needs a nonempty sweep")
    wv = np.asarray(w(E, pos[:, None], r[None, :]), dtype=float)
    minimum = float(wv.min())
    big = r > 1.0
    details = {"min_weight": minimum}
    if big.any():
        large = float(wv[:, big].max(axis=0).min())
        details["large_radius_inf_sup"] = large
        large_ok = large > 0
    else:
        details["large_radius_inf_sup"] = "unreachable"
        large_ok = True
    passed = bool(minimum > 0 and large_ok)
    if not minimum > 0:
        i, j = np.argwhere(~(wv > 0))[0]
        details["offending"] = (pts[i].tolist(), float(r[j]))
    lhs = wv.ravel()
    return ConditionReport("positivity", _column(r[None, :], pos.size).ravel(), lhs,
                           np.zeros_like(lhs), minimum, passed, "bounded",
                           centers=_column(pts, r.size), details=details)


def vanishing_profile(w, p, E, centers, radii):
    """``g(t) = sup_x t^{-n/p(x)} / w(x, t)^{1/p(x)}`` on the radius grid."""
    pts, pos = _snap(E, centers)
    t = np.atleast_1d(np.asarray(radii, dtype=float))
    inv_p = 1.0 / p.values[pos][:, None]
    wv = np.asarray(w(E, pos[:, None], t[None, :]), dtype=float)
    if not np.all(wv > 0):
        raise DomainError("weight must be positive on the sweep")
    return (t[None, :] ** (-E.n * inv_p) * wv ** (-inv_p)).max(axis=0)


def check_vanishing_condition(w, p, centers, radii):
    """Trend surrogate for ``lim_{t -> 0} g(t) = 0``.

    Passes iff ``g`` decreases over the three smallest radii and
    ``g(r_min) < g(r_max) / 10``.  The exponent on ``t`` is ``n/p(x)`` at
    every radius; radii above 1 are flagged in the details.
    """
    E = p.domain
    t = np.sort(np.atleast_1d(np.asarray(radii, dtype=float)))[::-1]
    if t.size < 3:
        raise DomainError("vanishing check needs at least three radii")
    g = vanishing_profile(w, p, E, centers, t)
    small = g[-3:]
    decreasing = bool(small[2] < small[1] < small[0])
    drop = bool(g[-1] < g[0] / 10.0)
    passed = decreasing and drop
    details = {"decreasing_tail": decreasing, "decade_drop": drop,
               "large_radius_branch": bool((t > 1).any())}
    diagnosis = "bounded" if passed else ("log-divergent" if np.allclose(g, g[0], rtol=1e-9)
                                          else "power-divergent")
    ratio = float(g[-1] / g[0]) if g[0] > 0 else math.inf
    return ConditionReport("vanishing", t, g, np.full_like(g, g[0]), ratio, passed, diagnosis,
                           details=details)


# ----------------------------------------------------------------- Zygmund
def _zygmund_lhs(w1, E, pos, p, alpha, gamma, r, D, log_factor, count=T_NODES):
    t, dt = _nodes(r, D, count)
    wv = np.asarray(w1(E, np.full(t.size, pos), t), dtype=float)
    if not np.all(wv > 0):
        raise DomainError("w1 must be positive on the integration grid")
    g = wv ** (1.0 / p) * t ** (alpha + E.n * gamma - 1.0)
    if log_factor:
        g = g * (1.0 + np.log(t / r))
    return float(np.dot(g, dt))


def _zygmund_rhs(w2, E, pos, q, p, alpha, r):
    if w2 is not None:
        return float(np.asarray(w2(E, pos, r), dtype=float)) ** (1.0 / q)
    if abs(q - p) <= 1e-14 * max(1.0, abs(p)):
        raise DomainError("the order-based right-hand side needs q(x) != p(x)")
    return r ** (-alpha * p / (q - p))


def _classify(ratios):
    """Growth class of ``ratios`` sampled on ``r_k = D 2^{-k}``."""
    d = np.diff(ratios)
    if d[-1] <= 0:
        return "bounded"
    rho = d[-1] / d[-21] if d[-21] > 0 else math.inf
    if rho < 0.8:
        return "bounded"
    if rho > 1.25:
        return "power-divergent"
    return "log-divergent"


_SEVERITY = {"bounded": 0, "log-divergent": 1, "power-divergent": 2}


def check_zygmund(w1, w2, p, q, alpha, gamma, log_factor, centers, radii):
    """Zygmund-type integral condition on a sweep.

    ``LHS(x, r) = int_r^D [1 + ln(t/r)]^k w1(x,t)^{1/p(x)} t^{alpha(x) + n gamma(x) - 1} dt``
    (``k = 1`` with ``log_factor``) on 256 log-spaced midpoint nodes;
    ``RHS = w2(x, r)^{1/q(x)}`` or, without ``w2``,
    ``r^{-alpha(x) p(x) / (q(x) - p(x))}``.

    The growth diagnosis probes the ratio at ``r = D 2^{-k}``, ``k = 10..60``,
    far below the grid scale; the check passes iff every centre is
    diagnosed bounded.
    """
    E = p.domain
    if w2 is None and q is None:
        raise DomainError("the order-based right-hand side needs q")
    if w2 is not None and q is None:
        raise DomainError("q is required when w2 is given")
    for fld in (q, alpha, gamma):
        if fld is not None and not same_domain(fld.domain, E):
            raise DomainError("exponent fields are defined on different grids")
    pts, pos = _snap(E, centers)
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    D = E.diam
    r = r[r < D]
    if r.size == 0 or pos.size == 0:
        raise DomainError("Zygmund check needs radii below diam(E)")
    gam = np.zeros(E.size) if gamma is None else gamma.values
    lhs = np.empty((pos.size, r.size))
    rhs = np.empty_like(lhs)
    worst = "bounded"
    probe = D * 2.0 ** -np.arange(10, 61, dtype=float)
    for i, ps in enumerate(pos):
        pv, av, gv = p.values[ps], alpha.values[ps], gam[ps]
        qv = q.values[ps] if q is not None else None
        for j, rj in enumerate(r):
            lhs[i, j] = _zygmund_lhs(w1, E, ps, pv, av, gv, rj, D, log_factor)
            rhs[i, j] = _zygmund_rhs(w2, E, ps, qv, pv, av, rj)
        deep = np.array([_zygmund_lhs(w1, E, ps, pv, av, gv, rk, D, log_factor,
                                      count=max(T_NODES, int(32 * math.log2(D / rk))))
                         / _zygmund_rhs(w2, E, ps, qv, pv, av, rk) for rk in probe])
        cls = _classify(deep)
        if _SEVERITY[cls] > _SEVERITY[worst]:
            worst = cls
    t, dt = _nodes(r.min(), D)
    sup_w = np.max([np.asarray(w1(E, np.full(t.size, ps), t), float) ** (1.0 / p.values[ps])
                    * t ** (alpha.values[ps] - 1.0) for ps in pos], axis=0)
    ratio = safe_ratio(lhs, rhs)
    details = {"c_delta": float(np.dot(sup_w, dt)), "delta": float(r.min())}
    name = "zygmund-log" if log_factor else "zygmund"
    return ConditionReport(name, np.tile(r, pos.size), lhs.ravel(), rhs.ravel(),
                           _constant(ratio), worst == "bounded", worst,
                           centers=_column(pts, r.size), details=details)


# --------------------------------------------------------------- estimates
def verify_hedberg(f, cfg, radii=None, centers=None, tol=HEDBERG_TOL,
                   ball_volume_factor=False):
    """Near-part bound ``|int_{|x-y|<r} ...| <= 2^n r^alpha / (2^alpha - 1) M_Omega f(x)``.

    Passes iff every sweep point satisfies the bound up to ``1 + tol``.
    With ``ball_volume_factor`` the bound is multiplied by ``|B(0,1)|``, the
    factor the dyadic-shell argument produces when ``M`` averages over balls
    rather than over ``r^n``.
    """
    E = f.domain
    if np.any(f.values < 0):
        raise PreconditionError("the near-part bound is stated for nonnegative f")
    alpha = cfg.order_values(E, required=True)
    r = dyadic_radii(E) if radii is None else np.atleast_1d(np.asarray(radii, float))
    if centers is None:
        pos = np.arange(E.size)
        pts = E.points
    else:
        pts, pos = _snap(E, centers)
    F = np.abs(riesz_local(f, cfg, pos, r))
    M = rough_maximal(f, cfg, maximal_radii(E), at=pos)
    a = alpha[pos][:, None]
    bound = 2.0 ** E.n * r[None, :] ** a / (2.0 ** a - 1.0) * M[:, None]
    notes = [f"tolerance {tol:g}"]
    if ball_volume_factor:
        bound = bound * unit_ball_volume(E.n)
        notes.append("bound scaled by the unit-ball volume")
    return _estimate("hedberg", _column(pts, r.size), np.tile(r, pos.size), F.ravel(),
                     bound.ravel(), gate=lambda c, _: c <= 1.0 + tol, notes=notes)


def domination_ratio(suite, cfg, radii=None):
    """``max`` over cells and suite of ``M_{Omega,alpha} f / T~(|f|)``."""
    best = 0.0
    for f in suite:
        if f.is_zero():
            continue
        E = f.domain
        rr = maximal_radii(E) if radii is None else radii
        M = fractional_maximal(f, cfg, rr).values
        T = dominating_potential(f, cfg).values
        best = max(best, _constant(safe_ratio(M, T)))
    return best


def verify_domination(suite, cfg, radii=None, refine=True):
    """Pointwise domination of the fractional maximal function by ``T~``."""
    suite = list(suite)
    if not suite:
        raise DomainError("domination check needs a nonempty suite")
    E = suite[0].domain
    c = domination_ratio(suite, cfg, radii)
    refinement = None
    if refine:
        E2 = E.refine()
        c2 = domination_ratio(_resample(suite, E2), _resample(cfg, E2), None)
        refinement = (c, c2)
    passed = math.isfinite(c) and (refinement is None or _in_band(refine_ratio(*refinement)))
    return EstimateReport("domination", np.zeros((1, E.n)), np.array([np.nan]),
                          np.array([c]), np.array([1.0]), c, passed, refinement,
                          [f"suite size {len(suite)}"])


def _check_sobolev(p, q, alpha):
    n = p.domain.n
    target = 1.0 / p.values - alpha.values / n
    if np.any(np.abs(1.0 / q.values - target) > RELATION_TOL):
        raise PreconditionError("q does not satisfy 1/q = 1/p - alpha/n")


def _tail(bn, r, D, weight_expo):
    """``int_r^D t^{weight_expo} ||f||_{L^p(B~(x,t))} dt`` on log-spaced nodes."""
    t, dt = _nodes(r, D)
    return float(np.dot(bn.norms(t) * t ** weight_expo, dt))


def _tail_log(bn, r, lo, D, weight_expo):
    t, dt = _nodes(lo, D)
    return float(np.dot((1.0 + np.log(t / r)) * bn.norms(t) * t ** weight_expo, dt))


def _spanne_table(f, p, q, cfg, centers, radii):
    E = f.domain
    alpha = cfg.order_values(E, required=True)
    q = q if q is not None else reciprocal_sum(p, ExponentField(E, -E.n / alpha), name="q")
    _check_sobolev(p, q, cfg.alpha)
    pts, pos = _snap(E, centers)
    D = E.diam
    r = np.atleast_1d(np.asarray(radii, float))
    r = r[r < D]
    If = riesz_potential(f, cfg)
    lhs = np.empty((pos.size, r.size))
    rhs = np.empty_like(lhs)
    for i, (x, ps) in enumerate(zip(pts, pos)):
        qx = q.values[ps]
        lhs[i] = BallNorms(If, q, x).norms(r)
        bn = BallNorms(f, p, x)
        for j, rj in enumerate(r):
            rhs[i, j] = rj ** (E.n / qx) * _tail(bn, rj, D, -E.n / qx - 1.0)
    return pts, r, lhs, rhs


def verify_spanne_pointwise(f, p, q, cfg, centers=None, radii=None, refine=True):
    """``||I f||_{L^q(B~(x,r))} <~ r^{n/q(x)} int_r^D ||f||_{L^p(B~(x,t))} t^{-n/q(x)-1} dt``.

    ``q`` defaults to the Sobolev exponent of ``p`` and ``alpha``.
    """
    E = f.domain
    centers = _default_centers(E, centers)
    radii = _below(dyadic_radii(E) if radii is None else radii, E.diam)
    pts, r, lhs, rhs = _spanne_table(f, p, q, cfg, centers, radii)

    def rerun():
        E2 = E.refine()
        q2 = None if q is None else q.resample(E2)
        _, _, l2, r2 = _spanne_table(f.resample(E2), p.resample(E2), q2, _resample(cfg, E2),
                                     _snap(E2, centers)[0], radii)
        return _constant(safe_ratio(l2, r2))

    return _estimate("spanne", _column(pts, r.size), np.tile(r, len(pts)), lhs.ravel(),
                     rhs.ravel(), rerun, refine,
                     notes=["tail integral starts at r; the far-part argument starts at 2r"])


def _adams_table(f, p, cfg, centers, radii):
    E = f.domain
    if cfg.alpha is None or not check_alpha_assumptions(cfg.alpha, p):
        raise PreconditionError("alpha and p violate the order assumptions")
    alpha = cfg.alpha.values
    pts, pos = _snap(E, centers)
    D = E.diam
    r = np.atleast_1d(np.asarray(radii, float))
    r = r[r < D]
    lhs_x = np.abs(riesz_potential(f, cfg, at=pos))
    M = rough_maximal(f, cfg, maximal_radii(E), at=pos)
    full = luxemburg_norm(f, p).value
    # Last column: the splitting radius of the Hedberg choice.
    rhs = np.full((pos.size, r.size + 1), np.inf)
    choice = np.full(pos.size, np.nan)
    for i, (x, ps) in enumerate(zip(pts, pos)):
        a, px = alpha[ps], p.values[ps]
        expo = a - E.n / px - 1.0
        bn = BallNorms(f, p, x)
        for j, rj in enumerate(r):
            rhs[i, j] = rj ** a * M[i] + _tail(bn, rj, D, expo)
        if M[i] > 0 and full > 0:
            qx = 1.0 / (1.0 / px - a / E.n)
            r_star = (full / M[i]) ** ((qx - px) / (a * px))
            r_star = min(max(r_star, E.h), D * (1 - 1e-12))
            rhs[i, -1] = r_star ** a * M[i] + _tail(bn, r_star, D, expo)
            choice[i] = lhs_x[i] / (M[i] ** (px / qx) * full ** (1.0 - px / qx))
    lhs = np.repeat(lhs_x[:, None], rhs.shape[1], axis=1)
    return pts, r, lhs, rhs, choice


def verify_adams_pointwise(f, p, cfg, radii=None, centers=None, refine=True):
    """``|I f(x)| <~ r^{alpha(x)} M_Omega f(x) + int_r^D t^{alpha - n/p - 1} ||f||_{L^p(B~(x,t))} dt``.

    The sweep includes, per centre, the splitting radius
    ``r* = (||f||_{L^p(E)} / M_Omega f(x))^{(q-p)/(alpha p)}`` (clamped to
    ``[h, diam E)``).  The notes record ``max |I f| / ((M f)^{p/q} ||f||^{1-p/q})``.
    """
    E = f.domain
    centers = _default_centers(E, centers)
    radii = _below(dyadic_radii(E) if radii is None else radii, E.diam)
    pts, r, lhs, rhs, choice = _adams_table(f, p, cfg, centers, radii)
    radii_col = np.concatenate([r, [np.nan]])

    def rerun():
        E2 = E.refine()
        out = _adams_table(f.resample(E2), p.resample(E2), _resample(cfg, E2),
                           _snap(E2, centers)[0], radii)
        return _constant(safe_ratio(out[2], out[3]))

    finite = choice[np.isfinite(choice)]
    note = f"hedberg-choice product constant {float(finite.max()) if finite.size else 0.0!r}"
    return _estimate("adams", _column(pts, radii_col.size), np.tile(radii_col, len(pts)),
                     lhs.ravel(), rhs.ravel(), rerun, refine, notes=[note])


def _commutator_table(b, f, p1, p2, q, q1, gamma, cfg, centers, radii):
    E = f.domain
    alpha = cfg.order_values(E, required=True)
    n = E.n
    q1 = q1 if q1 is not None else reciprocal_sum(p1, ExponentField(E, -n / alpha), name="q1")
    q = q if q is not None else reciprocal_sum(p2, q1, name="q")
    if np.any(np.abs(1.0 / q1.values - (1.0 / p1.values - alpha / n)) > RELATION_TOL):
        raise PreconditionError("q1 does not satisfy 1/q1 = 1/p1 - alpha/n")
    if np.any(np.abs(1.0 / q.values - (1.0 / p2.values + 1.0 / q1.values)) > RELATION_TOL):
        raise PreconditionError("q does not satisfy 1/q = 1/p2 + 1/q1")
    if np.any(q1.values <= 0) or np.any(q.values <= 0):
        raise PreconditionError("exponent relations give a non-positive exponent")
    pts, pos = _snap(E, centers)
    D = E.diam
    r = np.atleast_1d(np.asarray(radii, float))
    r = r[2.0 * r < D]
    b_norm = campanato_norm(b, p2, gamma, pts, dyadic_radii(E)).value
    C = commutator(b, f, "I", cfg)
    lhs = np.empty((pos.size, r.size))
    rhs = np.empty_like(lhs)
    for i, (x, ps) in enumerate(zip(pts, pos)):
        qx, q1x, gx = q.values[ps], q1.values[ps], gamma.values[ps]
        lhs[i] = BallNorms(C, q, x).norms(r)
        bn = BallNorms(f, p1, x)
        for j, rj in enumerate(r):
            rhs[i, j] = b_norm * rj ** (n / qx) * _tail_log(
                bn, rj, 2.0 * rj, D, n * gx - n / q1x - 1.0)
    return pts, r, lhs, rhs, b_norm


def verify_commutator_pointwise(b, f, p1, p2, q, q1, gamma, cfg, centers=None, radii=None,
                                refine=True):
    """``||[b, I] f||_{L^q(B~(x,r))} <~ ||b||_C r^{n/q(x)} int_{2r}^D (1 + ln t/r) ... dt``.

    ``q1`` and ``q`` default to the values forced by the exponent relations.
    Radii with ``2r >= diam E`` are dropped (empty tail).
    """
    E = f.domain
    centers = _default_centers(E, centers)
    radii = _below(dyadic_radii(E) if radii is None else radii, 0.5 * E.diam)
    pts, r, lhs, rhs, b_norm = _commutator_table(b, f, p1, p2, q, q1, gamma, cfg, centers,
                                                 radii)

    def rerun():
        E2 = E.refine()
        out = _commutator_table(*_resample((b, f, p1, p2, q, q1, gamma), E2),
                                _resample(cfg, E2), _snap(E2, centers)[0], radii)
        return _constant(safe_ratio(out[2], out[3]))

    return _estimate("commutator", _column(pts, r.size), np.tile(r, len(pts)), lhs.ravel(),
                     rhs.ravel(), rerun, refine,
                     notes=[f"campanato norm of b {b_norm!r}", "tail integral starts at 2r"])


def verify_size_condition(f, cfg, z, r, C=1.0 + 1e-9):
    """Size bound for ``f`` cut off inside ``B(z, 2r)``, tested on ``B(z, r)``."""
    E = f.domain
    z = np.atleast_1d(np.asarray(z, dtype=float))
    far = ~inside(E.distances(z), 2.0 * r)
    g = GridFunction(E, np.where(far, f.values, 0.0), name="far part")
    near = truncated_ball_cells(E, Ball(z, r))
    if near.size == 0:
        raise DomainError("B(z, r) contains no cell")
    lhs = np.abs(riesz_potential(g, cfg, at=near))
    rhs = size_bound(g, cfg, at=near)
    pts = E.points[near]
    return _estimate("size-condition", pts, np.full(near.size, r), lhs, rhs,
                     gate=lambda c, _: c <= C, notes=[f"constant {C!r}"])


# ------------------------------------------------------------ scaling laws
def _scaling(name, radii, values, predicted, reference, tol, ratio_bound):
    values = np.asarray(values, dtype=float)
    slope = loglog_slope(radii, values)
    ratios = values / reference
    passed = bool(abs(slope - predicted) <= tol and np.all(np.isfinite(ratios))
                  and ratios.max() <= ratio_bound and ratios.min() > 0)
    return VerificationReport(name, np.asarray(radii, float), values, slope, float(predicted),
                              ratios, passed, tol)


def interior_radii(E, x, r_max=1.0, k_min=4):
    """Dyadic radii ``<= r_max`` with ``B(x, r)`` inside ``E`` and ``r >= 4h``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = E.grid
    room = min(min(x[a] - g.lo[a], g.hi[a] - x[a]) for a in range(E.n))
    if E.label == "disk" or not E.mask.all():
        outside = E.grid.centers()[~E.mask]
        if outside.size:
            room = min(room, float(np.sqrt(((outside - x) ** 2).sum(axis=1)).min()) - E.h)
    top = min(r_max, room)
    r = dyadic_radii(E)
    r = r[(r <= top * (1 + 1e-12)) & (r >= k_min * E.h)]
    if r.size < 2:
        raise DomainError("need at least two interior dyadic radii above 4h")
    return r


def verify_chi_scaling(p, x, radii=None, tol=SLOPE_TOL, ratio_bound=10.0):
    """Slope of ``log ||chi_{B~(x,r)}||_{L^p}`` against ``log r`` versus ``n/p(x)``."""
    E = p.domain
    x, pos = _snap(E, x)
    x = x[0]
    r = interior_radii(E, x) if radii is None else np.atleast_1d(np.asarray(radii, float))
    chi = characteristic(E)
    vals = BallNorms(chi, p, x).norms(r)
    px = p.values[pos[0]]
    ref = (ball_measure(E.n, 1.0) * r ** E.n) ** (1.0 / px)
    return _scaling("chi-scaling", r, vals, E.n / px, ref, tol, ratio_bound)


def verify_power_weight_scaling(alpha, p, x, radii=None, tol=SLOPE_TOL, ratio_bound=1e3):
    """Slope of ``log || |x - .|^{alpha(x) - n} chi_{E \\ B~(x,r)} ||_{L^{p'}}`` versus
    ``alpha(x) - n/p(x)``.

    The complement of the ball and the conjugate exponent make the norm
    finite under ``alpha(x) p(x) < n``.
    """
    E = p.domain
    if not check_alpha_assumptions(alpha, p):
        raise PreconditionError("alpha and p violate the order assumptions")
    x, pos = _snap(E, x)
    x = x[0]
    ps = pos[0]
    r = interior_radii(E, x, r_max=E.diam / 16) if radii is None else \
        np.atleast_1d(np.asarray(radii, float))
    pc = conjugate_exponent(p)
    d = E.distances(x)
    vals = np.empty(r.size)
    ax = alpha.values[ps]
    for k, rk in enumerate(r):
        out = ~inside(d, rk)
        out[ps] = False
        g = GridFunction(E, np.where(out, np.where(out, d, 1.0) ** (ax - E.n), 0.0))
        vals[k] = BallNorms(g, pc, x).norms(4.0 * E.diam)[()]
    predicted = ax - E.n / p.values[ps]
    return _scaling("power-weight-scaling", r, vals, predicted, r ** predicted, tol, ratio_bound)


def verify_ball_norm_scaling(kernel, E, x, radii=None, s=None, z=None, tol=SLOPE_TOL,
                             ratio_bound=10.0):
    """Slope of ``log ||Omega(z - .)||_{L_s(B~(x,r))}`` versus ``n/s``.

    ``z`` defaults to ``x``; the cell containing ``z`` is left out.
    """
    if kernel.n != E.n:
        raise DomainError("kernel dimension does not match the domain")
    s = kernel.s if s is None else float(s)
    if not s > 1:
        raise DomainError("the integrability index must exceed 1")
    xs, _ = _snap(E, x)
    x = xs[0]
    z = x if z is None else np.atleast_1d(np.asarray(z, dtype=float))
    r = interior_radii(E, x) if radii is None else np.atleast_1d(np.asarray(radii, float))
    omega = np.abs(kernel.on_displacements(z[None, :] - E.points))
    d = E.distances(x)
    dz = E.distances(z)
    vals = np.empty(r.size)
    for k, rk in enumerate(r):
        cells = inside(d, rk) & (dz > 0)
        if not cells.any():
            raise DomainError("truncated ball is empty")
        if math.isinf(s):
            vals[k] = omega[cells].max()
        else:
            vals[k] = ((omega[cells] ** s).sum() * E.cell_volume) ** (1.0 / s)
    predicted = 0.0 if math.isinf(s) else E.n / s
    ref = kernel.sphere_norm(s) * r ** predicted
    return _scaling("ball-norm-scaling", r, vals, predicted, ref, tol, ratio_bound)


# ----------------------------------------------------------- operator norms
def empirical_operator_norm(op, suite, source_norm, target_norm):
    """``max`` over the suite of ``target_norm(op f) / source_norm(f)``.

    Functions with zero source norm are skipped with a warning.
    """
    suite = list(suite)
    if not suite:
        raise DomainError("operator-norm sweep needs a nonempty suite")
    best = 0.0
    used = 0
    for f in suite:
        s = float(source_norm(f))
        if not s > 0:
            warnings.warn(f"skipping {f.name or 'function'} with zero source norm", stacklevel=2)
            continue
        used += 1
        best = max(best, float(target_norm(op(f))) / s)
    if used == 0:
        raise DomainError("every function in the suite has zero source norm")
    return best


__all__ = [
    "check_vanishing_condition", "check_weight_positivity", "check_zygmund",
    "domination_ratio", "empirical_operator_norm", "interior_radii",
    "vanishing_profile", "verify_adams_pointwise", "verify_ball_norm_scaling",
    "verify_chi_scaling", "verify_commutator_pointwise", "verify_domination",
    "verify_hedberg", "verify_power_weight_scaling", "verify_size_condition",
    "verify_spanne_pointwise",
]
