"""Direct-summation evaluation of rough potential, maximal and singular operators.

All operators are O(N^2) sums over member cells.  Output cells are split
into fixed-size row blocks (the block size depends only on the grid), each
block is reduced along the source axis in linear cell order, and blocks are
mapped over a thread pool; the result does not depend on the worker count.
"""

from dataclasses import dataclass

import numpy as np

from ._parallel import map_chunks, rows_per_chunk
from .errors import ConvergenceError, DomainError, PreconditionError
from .exponents import same_domain
from .grid import inside, lattice_ball_measure
from .norms import GridFunction
from .quadrature import centred_cell_power_integral

RULES = ("analytic-correction", "excise")
DEFAULT_PV_FACTORS = (12.0, 6.0, 3.0, 1.5)
MEAN_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class OperatorConfig:
    """Kernel, variable order and discretisation rules shared by the operators.

    ``pv_epsilons`` defaults to ``h * (12, 6, 3, 1.5)`` on the domain in use.
    ``literal_abs_b`` switches the maximal commutators to the weight
    ``|b(x) - |b(y)||`` instead of ``|b(x) - b(y)|``.
    """

    kernel: object
    alpha: object = None
    pv_epsilons: tuple = None
    singular_cell_rule: str = "analytic-correction"
    literal_abs_b: bool = False

    def __post_init__(self):
        if self.singular_cell_rule not in RULES:
            raise DomainError(f"singular_cell_rule must be one of {RULES}")
        if self.pv_epsilons is not None:
            eps = tuple(float(e) for e in self.pv_epsilons)
            if len(eps) < 2 or np.any(np.diff(eps) >= 0) or min(eps) <= 0:
                raise DomainError("pv_epsilons must be positive and strictly decreasing")
            object.__setattr__(self, "pv_epsilons", eps)

    def epsilons(self, E):
        if self.pv_epsilons is None:
            return tuple(c * E.h for c in DEFAULT_PV_FACTORS)
        if self.pv_epsilons[-1] < E.h * (1 - 1e-12):
            raise DomainError("the smallest principal-value radius must be >= h")
        return self.pv_epsilons

    def order_values(self, E, required):
        if self.alpha is None:
            if required:
                raise DomainError("this operator needs a variable order alpha")
            return np.zeros(E.size)
        if not same_domain(self.alpha.domain, E):
            raise DomainError("alpha is defined on a different grid")
        if required and not self.alpha.lower > 0:
            raise DomainError("alpha must be bounded below by a positive constant")
        return self.alpha.values

    def with_alpha(self, alpha):
        return OperatorConfig(self.kernel, alpha, self.pv_epsilons,
                              self.singular_cell_rule, self.literal_abs_b)


def _targets(E, at):
    if at is None:
        return np.arange(E.size)
    at = np.atleast_1d(np.asarray(at, dtype=np.int64))
    if at.size and (at.min() < 0 or at.max() >= E.size):
        raise DomainError("target positions are out of range")
    return at


def _wrap(f, values, at, name):
    if at is None:
        return GridFunction(f.domain, values, name=name)
    return values


def _check_kernel(kernel, E):
    if kernel.n != E.n:
        raise DomainError("kernel dimension does not match the domain")


class _Block:
    """Geometry between a block of target cells and every source cell."""

    def __init__(self, E, kernel, rows):
        self.rows = rows
        disp = E.points[rows][:, None, :] - E.points[None, :, :]
        if E.n == 1:
            self.dist = np.abs(disp[..., 0])
        else:
            self.dist = np.hypot(disp[..., 0], disp[..., 1])
        self.self_mask = np.zeros(self.dist.shape, dtype=bool)
        self.self_mask[np.arange(rows.size), rows] = True
        self.omega = kernel.on_displacements(disp)
        with np.errstate(divide="ignore"):
            self.logd = np.log(np.where(self.self_mask, 1.0, self.dist))

    def power(self, expo):
        """``|x - y|^{expo(x)}`` off the diagonal and 0 on it."""
        out = np.exp(expo[:, None] * self.logd)
        out[self.self_mask] = 0.0
        return out


def _cell_constants(E, expo, rule):
    # int over the own cell of |z|^{expo}, computed once per distinct exponent.
    if rule == "excise":
        return np.zeros(expo.size)
    uniq, inv = np.unique(expo, return_inverse=True)
    vals = np.array([centred_cell_power_integral(E.n, e, E.h) for e in uniq])
    return vals[inv]


def _run(E, targets, fn):
    chunk = rows_per_chunk(E.size)
    parts = map_chunks(lambda lo, hi: fn(targets[lo:hi]), targets.size, chunk)
    return np.concatenate(parts) if parts else np.zeros((0,))


def _potential(f, cfg, at, absolute, name):
    E = f.domain
    _check_kernel(cfg.kernel, E)
    alpha = cfg.order_values(E, required=True)
    kernel = cfg.kernel.absolute() if absolute else cfg.kernel
    vals = np.abs(f.values) if absolute else f.values
    targets = _targets(E, at)
    expo = alpha - E.n
    own = _cell_constants(E, expo[targets], cfg.singular_cell_rule) * kernel.angular_mean()
    hn = E.cell_volume

    def block(rows):
        b = _Block(E, kernel, rows)
        return (b.omega * b.power(expo[rows]) * vals[None, :]).sum(axis=1) * hn

    out = _run(E, targets, block) + own * vals[targets]
    return _wrap(f, out, at, name)


def riesz_potential(f, cfg, at=None):
    """Rough Riesz potential of variable order.

    Off-diagonal cells use the midpoint rule; the own cell contributes
    ``f(x)`` times the exact cell integral of ``|z|^{alpha(x) - n}`` times
    the sphere mean of the kernel (or nothing under the ``excise`` rule).
    Returns a :class:`GridFunction`, or an array of values when ``at``
    (member positions) is given.
    """
    return _potential(f, cfg, at, absolute=False, name="riesz")


def dominating_potential(f, cfg, at=None):
    """The Riesz potential with ``|Omega|`` and ``|f|`` in place of ``Omega`` and ``f``."""
    return _potential(f, cfg, at, absolute=True, name="dominating")


def riesz_local(f, cfg, at, radii, absolute=False):
    """Riesz sums restricted to ``|x - y| < r``, shape ``(len(at), len(radii))``.

    The own cell is always included (with the configured rule).
    """
    E = f.domain
    _check_kernel(cfg.kernel, E)
    alpha = cfg.order_values(E, required=True)
    kernel = cfg.kernel.absolute() if absolute else cfg.kernel
    vals = np.abs(f.values) if absolute else f.values
    targets = _targets(E, at)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    expo = alpha - E.n
    own = _cell_constants(E, expo[targets], cfg.singular_cell_rule) * kernel.angular_mean()
    hn = E.cell_volume

    def block(rows):
        b = _Block(E, kernel, rows)
        contrib = b.omega * b.power(expo[rows]) * vals[None, :]
        return np.stack([np.where(inside(b.dist, r), contrib, 0.0).sum(axis=1) * hn
                         for r in radii], axis=1)

    parts = map_chunks(lambda lo, hi: block(targets[lo:hi]), targets.size, rows_per_chunk(E.size))
    out = np.concatenate(parts, axis=0)
    return out + (own * vals[targets])[:, None]


def _maximal_sums(E, kernel, alpha, targets, radii, weights_fn, own_fn):
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if radii.size == 0:
        raise DomainError("maximal operator needs at least one radius")
    if np.any(radii <= 0):
        raise DomainError("radii must be positive")
    absk = kernel.absolute()
    hn = E.cell_volume
    # |B(x, r)| by the same cell-centre rule as the sums, so constants average exactly.
    measure = lattice_ball_measure(E.n, radii, E.h)

    def block(rows):
        b = _Block(E, absk, rows)
        contrib = b.omega * weights_fn(rows, b)
        contrib[b.self_mask] = 0.0
        own = own_fn(rows)
        scale = alpha[rows][:, None] / E.n - 1.0
        sums = np.stack([np.where(inside(b.dist, r), contrib, 0.0).sum(axis=1) * hn
                         for r in radii], axis=1) + own[:, None]
        return measure[None, :] ** scale * sums

    parts = map_chunks(lambda lo, hi: block(targets[lo:hi]), targets.size, rows_per_chunk(E.size))
    return np.concatenate(parts, axis=0)


def maximal_table(f, cfg, radii, at=None, use_order=True):
    """Scaled ball averages for every target and radius (before the sup)."""
    E = f.domain
    _check_kernel(cfg.kernel, E)
    alpha = cfg.order_values(E, required=False) if use_order else np.zeros(E.size)
    a = np.abs(f.values)
    own_weight = cfg.kernel.angular_mean(absolute=True) * E.cell_volume
    return _maximal_sums(E, cfg.kernel, alpha, _targets(E, at), radii,
                         lambda rows, b: a[None, :],
                         lambda rows: a[rows] * own_weight)


def fractional_maximal(f, cfg, radii, at=None):
    """Rough fractional maximal function, the sup taken over ``radii``.

    With ``cfg.alpha`` absent this is the rough Hardy-Littlewood maximal
    function; the same code path serves both.
    """
    out = maximal_table(f, cfg, radii, at).max(axis=1)
    return _wrap(f, out, at, "maximal")


def rough_maximal(f, cfg, radii, at=None):
    """The order-zero maximal function ``M_Omega f`` regardless of ``cfg.alpha``."""
    out = maximal_table(f, cfg, radii, at, use_order=False).max(axis=1)
    return _wrap(f, out, at, "maximal")


def _pv_sequence(E, cfg, targets, weights_fn):
    kernel = cfg.kernel
    _check_kernel(kernel, E)
    if cfg.alpha is not None:
        raise DomainError("principal-value operators take no order alpha")
    if kernel.mean_zero_defect() > MEAN_ZERO_TOL:
        raise PreconditionError(
            f"kernel mean over the sphere is {kernel.mean_zero_defect():.3g}; "
            "principal values need a mean-zero kernel")
    eps = np.asarray(cfg.epsilons(E))
    hn = E.cell_volume
    expo = np.full(E.size, -float(E.n))

    def block(rows):
        b = _Block(E, kernel, rows)
        contrib = b.omega * b.power(expo[rows]) * weights_fn(rows, b)
        return np.stack([np.where(inside(b.dist, e), 0.0, contrib).sum(axis=1) * hn
                         for e in eps], axis=1)

    parts = map_chunks(lambda lo, hi: block(targets[lo:hi]), targets.size, rows_per_chunk(E.size))
    return eps, np.concatenate(parts, axis=0)


def _pv_limit(eps, seq):
    if eps.size >= 3:
        d_prev = np.abs(seq[:, -2] - seq[:, -3]).max()
        d_last = np.abs(seq[:, -1] - seq[:, -2]).max()
        scale = max(np.abs(seq).max(), 1.0)
        if d_last > d_prev and d_last > 1e-12 * scale:
            raise ConvergenceError(
                "principal-value sums do not settle as the exclusion radius shrinks")
    e1, e2 = eps[-1], eps[-2]
    s1, s2 = seq[:, -1], seq[:, -2]
    return s1 - e1 * (s2 - s1) / (e2 - e1)


def singular_integral_sequence(f, cfg, at=None):
    """Truncated sums ``S_eps`` for each configured exclusion radius.

    Returns ``(epsilons, S)`` with ``S`` of shape ``(targets, len(epsilons))``.
    """
    E = f.domain
    vals = f.values
    return _pv_sequence(E, cfg, _targets(E, at), lambda rows, b: vals[None, :])


def singular_integral(f, cfg, at=None):
    """Principal-value rough singular integral.

    The limit is the linear extrapolation to zero through the two smallest
    exclusion radii.
    """
    eps, seq = singular_integral_sequence(f, cfg, at)
    return _wrap(f, _pv_limit(eps, seq), at, "singular")


COMMUTATOR_BASES = ("T", "M", "I", "M_alpha")


def commutator(b, f, which, cfg, radii=None, at=None):
    """Commutator of the symbol ``b`` with one of the four base operators.

    ``T`` and ``I`` use the integral form with weight ``b(x) - b(y)``; the
    own cell contributes nothing.  ``M`` and ``M_alpha`` are sups over
    ``radii`` of the maximal sums with ``|f(y)|`` replaced by
    ``|b(x) - b(y)| |f(y)|``.
    """
    if which not in COMMUTATOR_BASES:
        raise DomainError(f"commutator base must be one of {COMMUTATOR_BASES}")
    E = f.domain
    if not same_domain(E, b.domain):
        raise DomainError("symbol and function are defined on different grids")
    _check_kernel(cfg.kernel, E)
    targets = _targets(E, at)
    bv, fv = b.values, f.values
    hn = E.cell_volume

    if which == "I":
        expo = cfg.order_values(E, required=True) - E.n

        def block(rows):
            blk = _Block(E, cfg.kernel, rows)
            diff = bv[rows][:, None] - bv[None, :]
            return (blk.omega * blk.power(expo[rows]) * diff * fv[None, :]).sum(axis=1) * hn

        out = _run(E, targets, block)
    elif which == "T":
        eps, seq = _pv_sequence(E, cfg, targets,
                                lambda rows, blk: (bv[rows][:, None] - bv[None, :]) * fv[None, :])
        out = _pv_limit(eps, seq)
    else:
        if radii is None:
            raise DomainError("maximal commutators need a radius sweep")
        if which == "M_alpha":
            alpha = cfg.order_values(E, required=True)
        else:
            alpha = np.zeros(E.size)
        af = np.abs(fv)
        inner = np.abs(bv) if cfg.literal_abs_b else bv

        def weights(rows, blk):
            return np.abs(bv[rows][:, None] - inner[None, :]) * af[None, :]

        def own(rows):
            w = np.abs(bv[rows] - inner[rows]) * af[rows]
            return w * cfg.kernel.angular_mean(absolute=True) * hn

        out = _maximal_sums(E, cfg.kernel, alpha, targets, radii, weights, own).max(axis=1)
    return _wrap(f, out, at, f"commutator:{which}")


def size_bound(f, cfg, at=None):
    """``sum |Omega| |x - y|^{alpha(x) - n} |f| h^n`` over off-diagonal cells."""
    E = f.domain
    alpha = cfg.order_values(E, required=True)
    expo = alpha - E.n
    a = np.abs(f.values)
    kernel = cfg.kernel.absolute()

    def block(rows):
        blk = _Block(E, kernel, rows)
        return (blk.omega * blk.power(expo[rows]) * a[None, :]).sum(axis=1) * E.cell_volume

    return _run(E, _targets(E, at), block)


__all__ = [
    "COMMUTATOR_BASES", "OperatorConfig", "commutator", "dominating_potential",
    "fractional_maximal", "maximal_table", "riesz_local", "riesz_potential",
    "rough_maximal", "singular_integral", "singular_integral_sequence", "size_bound",
]

