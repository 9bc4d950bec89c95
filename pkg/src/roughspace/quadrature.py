"""Closed-form and reference integrals of radial power laws over cells and intervals."""

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError

_GL_NODES = 64


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(fn, a, b, n=_GL_NODES):
    """Gauss-Legendre rule for a smooth integrand on ``[a, b]``."""
    x, w = _gauss_legendre(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return float(half * np.dot(w, fn(mid + half * x)))


def interval_power_integral(e, a, b):
    """``int_a^b |z|^e dz`` for ``e > -1``."""
    if not e > -1:
        raise DomainError(f"|z|^{e} is not integrable near 0 in one dimension")
    if a > b:
        return -interval_power_integral(e, b, a)

    def prim(z):
        return math.copysign(abs(z) ** (e + 1) / (e + 1), z)

    return prim(b) - prim(a)


def _quadrant_power_integral(e, A, B):
    # int over [0, A] x [0, B] of |z|^e, split along the diagonal angle.
    if A <= 0 or B <= 0:
        return 0.0
    k = e + 2.0
    phi0 = math.atan2(B, A)

    def sec_pow(phi):
        return np.cos(phi) ** (-k)

    lower = A ** k / k * gauss_legendre(sec_pow, 0.0, phi0)
    upper = B ** k / k * gauss_legendre(sec_pow, 0.0, 0.5 * math.pi - phi0)
    return lower + upper


def rectangle_power_integral(e, lo, hi):
    """``int |z|^e dz`` over the rectangle ``[lo0, hi0] x [lo1, hi1]``, ``e > -2``.

    The rectangle is cut into signed quadrant pieces anchored at the
    origin and each piece is integrated in polar coordinates.
    """
    if not e > -2:
        raise DomainError(f"|z|^{e} is not integrable near 0 in two dimensions")
    (x0, y0), (x1, y1) = lo, hi

    def corner(x, y):
        return math.copysign(1.0, x) * math.copysign(1.0, y) * _quadrant_power_integral(e, abs(x), abs(y))

    return corner(x1, y1) - corner(x0, y1) - corner(x1, y0) + corner(x0, y0)


def centred_cell_power_integral(n, e, h):
    """``int |z|^e dz`` over the cell ``[-h/2, h/2]^n`` centred at the origin."""
    if n == 1:
        return interval_power_integral(e, -0.5 * h, 0.5 * h)
    if n == 2:
        return rectangle_power_integral(e, (-0.5 * h, -0.5 * h), (0.5 * h, 0.5 * h))
    raise DomainError(f"dimension must be 1 or 2, got {n}")


def cell_power_integral(n, e, lo, hi):
    """``int |z|^e dz`` over an axis-aligned cell ``[lo, hi]`` (n = 1 or 2)."""
    if n == 1:
        return interval_power_integral(e, float(lo[0]), float(hi[0]))
    return rectangle_power_integral(e, lo, hi)


def log_midpoint_nodes(a, b, count=256):
    """Midpoint nodes and weights of a log-spaced partition of ``[a, b]``.

    ``sum(w * g(t))`` approximates ``int_a^b g(t) dt``.
    """
    if not 0 < a < b:
        raise DomainError(f"need 0 < a < b, got [{a}, {b}]")
    edges = np.geomspace(a, b, count + 1)
    return 0.5 * (edges[1:] + edges[:-1]), np.diff(edges)
