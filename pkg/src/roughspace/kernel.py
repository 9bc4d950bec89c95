"""Rough kernels on the unit sphere and their degree-0 homogeneous extensions."""

import math

import numpy as np

from .errors import DomainError
from .grid import unit_sphere_measure

DEFAULT_NODES = 256


class RoughKernel:
    """A kernel ``Omega`` on S^{n-1}, evaluated through ``v / |v|``.

    For ``n = 1`` the sphere is ``{-1, +1}`` with counting measure and the
    kernel is the pair ``(Omega(-1), Omega(+1))``.  For ``n = 2`` it is a
    function of the polar angle; sphere integrals use ``nodes`` uniform
    angles, which is spectrally accurate for trigonometric kernels and
    exact for piecewise-constant tables on the same nodes.

    Parameters
    ----------
    n : int
        Dimension of the ambient space (1 or 2).
    angular : callable or tuple
        ``n = 1``: pair of values.  ``n = 2``: vectorised ``fn(theta)``.
    s : float
        Integrability index recorded with the kernel, in ``(1, inf]``.
    mean_zero_required : bool
        When set, construction fails unless the sphere mean vanishes.
    """

    def __init__(self, n, angular, s=math.inf, mean_zero_required=False,
                 nodes=DEFAULT_NODES, label="", table=None):
        if n not in (1, 2):
            raise DomainError(f"kernel dimension must be 1 or 2, got {n}")
        if not s > 1:
            raise DomainError(f"kernel integrability index must exceed 1, got {s}")
        self.n = n
        self.s = float(s)
        self.label = label
        self.mean_zero_required = mean_zero_required
        self._table = None if table is None else np.asarray(table, dtype=float)
        if n == 1:
            pair = np.asarray(angular, dtype=float).ravel()
            if pair.shape != (2,):
                raise DomainError("a 1-D kernel needs exactly two values (at -1 and +1)")
            self._pair = pair
            self._fn = None
            self.nodes = 2
            self._weights = np.ones(2)
            self._node_values = pair.copy()
        else:
            if self._table is not None:
                nodes = self._table.size
            if nodes < 8:
                raise DomainError("need at least 8 angular nodes")
            self._fn = angular
            self._pair = None
            self.nodes = int(nodes)
            theta = 2.0 * math.pi * np.arange(self.nodes) / self.nodes
            self._weights = np.full(self.nodes, 2.0 * math.pi / self.nodes)
            self._node_values = np.asarray(self.on_angles(theta), dtype=float)
        if not np.all(np.isfinite(self._node_values)):
            raise DomainError("kernel values must be finite")
        if mean_zero_required and self.mean_zero_defect() > 1e-8:
            raise DomainError(f"kernel {label!r} does not have zero sphere mean")

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, n, c=1.0, **kw):
        c = float(c)
        if n == 1:
            return cls(1, (c, c), label=f"const:{c:g}", **kw)
        return cls(2, lambda t: np.full(np.shape(t), c), label=f"const:{c:g}", **kw)

    @classmethod
    def sign(cls, **kw):
        return cls(1, (-1.0, 1.0), label="sign", **kw)

    @classmethod
    def cosine(cls, m, **kw):
        return cls(2, lambda t: np.cos(m * t), label=f"cos:{m}", **kw)

    @classmethod
    def sine(cls, m, **kw):
        return cls(2, lambda t: np.sin(m * t), label=f"sin:{m}", **kw)

    @classmethod
    def from_table(cls, values, **kw):
        """Piecewise-constant kernel: value ``k`` on the arc nearest ``2 pi k / N``."""
        values = np.asarray(values, dtype=float).ravel()
        N = values.size
        if N < 8:
            raise DomainError("angular table needs at least 8 values")

        def fn(theta):
            k = np.rint(np.mod(theta, 2 * math.pi) * N / (2 * math.pi)).astype(np.int64) % N
            return values[k]

        return cls(2, fn, label=kw.pop("label", "table"), table=values, **kw)

    def scaled(self, c):
        if self.n == 1:
            return RoughKernel(1, c * self._pair, s=self.s, label=f"{c:g}*{self.label}")
        fn = self._fn
        return RoughKernel(2, lambda t: c * fn(t), s=self.s, nodes=self.nodes,
                           label=f"{c:g}*{self.label}",
                           table=None if self._table is None else c * self._table)

    def absolute(self):
        """The kernel ``|Omega|``."""
        if self.n == 1:
            return RoughKernel(1, np.abs(self._pair), s=self.s, label=f"|{self.label}|")
        fn = self._fn
        return RoughKernel(2, lambda t: np.abs(fn(t)), s=self.s, nodes=self.nodes,
                           label=f"|{self.label}|",
                           table=None if self._table is None else np.abs(self._table))

    # evaluation ----------------------------------------------------------
    def on_angles(self, theta):
        if self.n != 2:
            raise DomainError("angular evaluation is only defined for n = 2")
        return np.broadcast_to(self._fn(np.asarray(theta, dtype=float)), np.shape(theta))

    def evaluate(self, v):
        """``Omega(v / |v|)`` for a single nonzero vector."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if v.size != self.n:
            raise DomainError(f"vector must have {self.n} components")
        if not np.any(v != 0):
            raise DomainError("kernel is undefined at the zero vector")
        return float(self.on_displacements(v[None, :])[0])

    def on_displacements(self, d):
        """Vectorised evaluation on displacement rows ``d`` (shape ``(..., n)``).

        Zero displacements evaluate to 0; callers treat the diagonal
        separately.
        """
        d = np.asarray(d, dtype=float)
        if self.n == 1:
            x = d[..., 0]
            return np.where(x > 0, self._pair[1], np.where(x < 0, self._pair[0], 0.0))
        x, y = d[..., 0], d[..., 1]
        vals = np.asarray(self.on_angles(np.arctan2(y, x)), dtype=float)
        return np.where((x == 0) & (y == 0), 0.0, vals)

    # sphere integrals ------------------------------------------------------
    def sphere_norm(self, s=None):
        """``||Omega||_{L_s(S^{n-1})}``; ``s = inf`` gives the max over nodes."""
        s = self.s if s is None else float(s)
        if not s > 1:
            raise DomainError(f"sphere norm needs s > 1, got {s}")
        a = np.abs(self._node_values)
        if math.isinf(s):
            return float(a.max())
        return float((self._weights * a ** s).sum() ** (1.0 / s))

    def sphere_integral(self, absolute=False):
        v = np.abs(self._node_values) if absolute else self._node_values
        return float((self._weights * v).sum())

    def mean_zero_defect(self):
        return abs(self.sphere_integral())

    def angular_mean(self, absolute=False):
        """Sphere average of ``Omega`` (or ``|Omega|``)."""
        return self.sphere_integral(absolute) / unit_sphere_measure(self.n)

    @property
    def is_nonnegative(self):
        return bool(np.all(self._node_values >= 0))

    def __repr__(self):
        return f"RoughKernel(n={self.n}, {self.label or '?'})"
