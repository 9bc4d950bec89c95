"""Variable exponents p(.), alpha(.), lambda(.), gamma(.) as per-cell fields."""

import math

import numpy as np

from ._parallel import map_chunks, rows_per_chunk
from .errors import DomainError

DEFAULT_LOG_HOLDER_BOUND = 10.0
DEFAULT_DECAY_BOUND = 10.0


def same_domain(a, b):
    return a is b or (a.grid == b.grid and np.array_equal(a.mask, b.mask))


class ExponentField:
    """A real field sampled on the member cells of a domain.

    ``source``, when given, is a callable ``source(E) -> values`` used to
    resample the same continuum field on another (refined) domain.
    """

    def __init__(self, domain, values, source=None, name=""):
        values = np.array(values, dtype=float).ravel()
        if values.size == 1 and domain.size != 1:
            values = np.full(domain.size, float(values[0]))
        if values.size != domain.size:
            raise DomainError(
                f"exponent field has {values.size} values for {domain.size} cells")
        if not np.all(np.isfinite(values)):
            raise DomainError("exponent values must be finite")
        values.setflags(write=False)
        self.domain = domain
        self.values = values
        self.source = source
        self.name = name
        self.lower = float(values.min())
        self.upper = float(values.max())

    @classmethod
    def constant(cls, domain, c, name=""):
        c = float(c)
        return cls(domain, np.full(domain.size, c), source=lambda E: np.full(E.size, c), name=name)

    @classmethod
    def from_function(cls, domain, fn, name=""):
        """Sample ``fn(points) -> values`` at the member cell centres."""

        def source(E):
            return np.broadcast_to(np.asarray(fn(E.points), dtype=float), (E.size,)).copy()

        return cls(domain, source(domain), source=source, name=name)

    def at(self, point):
        return float(self.values[self.domain.locate(point)])

    def resample(self, domain):
        if self.source is None:
            raise DomainError(f"exponent field {self.name!r} has no source to resample")
        return ExponentField(domain, self.source(domain), source=self.source, name=self.name)

    def with_values(self, values, name=""):
        return ExponentField(self.domain, values, name=name)

    def __repr__(self):
        return f"ExponentField({self.name or '?'}, [{self.lower:g}, {self.upper:g}])"


def _check_same(*fields):
    first = fields[0]
    for f in fields[1:]:
        if f is not None and not same_domain(first.domain, f.domain):
            raise DomainError("fields are defined on different grids")


def check_local_log_holder(p, bound=DEFAULT_LOG_HOLDER_BOUND):
    """Empirical local log-Hölder constant of ``p``.

    Returns ``(C < bound, C)`` where ``C`` is the sup of
    ``|p(x) - p(y)| * log(1 / |x - y|)`` over member-cell pairs with
    ``2h <= |x - y| <= 1/2``.
    """
    E = p.domain
    if E.size < 2:
        raise DomainError("log-Hölder check needs at least two cells")
    pts, vals = E.points, p.values
    dmin = 2.0 * E.h * (1.0 - 1e-9)

    def block(lo, hi):
        d = np.sqrt(((pts[lo:hi, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
        ok = (d >= dmin) & (d <= 0.5)
        with np.errstate(divide="ignore"):
            q = np.abs(vals[lo:hi, None] - vals[None, :]) * np.log(1.0 / np.where(ok, d, 1.0))
        return float(np.where(ok, q, 0.0).max(initial=0.0))

    c = max(map_chunks(block, E.size, rows_per_chunk(E.size, 500_000)))
    return c < bound, c


def check_decay_condition(p, p_inf, bound=DEFAULT_DECAY_BOUND):
    """sup of ``|1/p_inf - 1/p(x)| log(e + |x|)``; returns ``(holds, C)``."""
    if not p_inf >= 1:
        raise DomainError(f"p_inf must be >= 1, got {p_inf}")
    radius = np.sqrt((p.domain.points ** 2).sum(axis=1))
    c = float(np.max(np.abs(1.0 / p_inf - 1.0 / p.values) * np.log(math.e + radius)))
    return c < bound, c


def check_alpha_assumptions(alpha, p, lam=None):
    """Order assumptions: ``essinf alpha > 0`` and ``esssup (lam + alpha p) < n``."""
    _check_same(alpha, p, lam)
    n = alpha.domain.n
    top = alpha.values * p.values
    if lam is not None:
        top = top + lam.values
    return bool(alpha.lower > 0 and top.max() < n)


def sobolev_conjugate(p, alpha, n=None, lam=None):
    """Pointwise ``1/q = 1/p - alpha/n`` (or ``alpha/(n - lam)`` with ``lam``)."""
    _check_same(p, alpha, lam)
    n = p.domain.n if n is None else n
    if n != p.domain.n:
        raise DomainError("dimension does not match the exponent grid")
    if not check_alpha_assumptions(alpha, p, lam):
        raise DomainError("alpha violates the order assumptions for this p")
    denom = n if lam is None else n - lam.values
    inv_q = 1.0 / p.values - alpha.values / denom
    if np.any(inv_q <= 0):
        raise DomainError("Sobolev exponent is infinite at some cell")
    return p.with_values(1.0 / inv_q, name="q")


def conjugate_exponent(p):
    """Pointwise ``p' = p / (p - 1)``."""
    if np.any(p.values <= 1):
        raise DomainError("conjugate exponent needs p(x) > 1 everywhere")

    def source(E):
        v = p.source(E)
        return v / (v - 1.0)
    return ExponentField(p.domain, p.values / (p.values - 1.0),
                         source=source if p.source else None, name=p.name + "'")


def reciprocal_sum(*fields, name=""):
    """Field ``r`` with ``1/r = sum(1/f)``, keeping resampling ability."""
    _check_same(*fields)
    vals = 1.0 / sum(1.0 / f.values for f in fields)
    if all(f.source is not None for f in fields):
        def source(E):
            return 1.0 / sum(1.0 / f.source(E) for f in fields)
    else:
        source = None
    return ExponentField(fields[0].domain, vals, source=source, name=name)
