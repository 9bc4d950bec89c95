"""Uniform cell-centred grids, bounded domains and (truncated) balls.

Every discrete quantity in the package lives on the *member cells* of a
:class:`DomainSet`.  Member cells are ordered by their linear grid index
(row-major over axes ``(x, y)``), and all per-cell arrays use that order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

# Relative slack used when deciding |x - y| < r; ties count as outside.
_BALL_SLACK = 1e-10


def unit_ball_volume(n):
    """Lebesgue measure of the unit ball, ``v_1 = 2`` and ``v_2 = pi``."""
    if n == 1:
        return 2.0
    if n == 2:
        return math.pi
    raise DomainError(f"dimension must be 1 or 2, got {n}")


def unit_sphere_measure(n):
    """Surface measure of S^{n-1}: counting measure on {-1, 1} for n = 1."""
    if n == 1:
        return 2.0
    if n == 2:
        return 2.0 * math.pi
    raise DomainError(f"dimension must be 1 or 2, got {n}")


def ball_measure(n, r):
    """Return ``|B(x, r)| = v_n r^n``."""
    if not r > 0:
        raise DomainError(f"ball radius must be positive, got {r}")
    return unit_ball_volume(n) * r ** n


def lattice_ball_measure(n, r, h):
    """``|B(0, r)|`` measured by the cell-centre rule on the infinite lattice ``h Z^n``.

    Counts lattice points ``k h`` with ``|k h| < r`` (same tie slack as
    :func:`inside`) and multiplies by ``h^n``; vectorised over ``r``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("ball radius must be positive")
    t = r * (1.0 - _BALL_SLACK) / h
    if n == 1:
        count = 2.0 * np.ceil(t) - 1.0
    elif n == 2:
        flat = np.atleast_1d(t)
        count = np.empty(flat.shape)
        for k, tk in enumerate(flat):
            i = np.arange(-math.floor(tk), math.floor(tk) + 1, dtype=float)
            rest = tk * tk - i * i
            count[k] = (2.0 * np.ceil(np.sqrt(rest[rest > 0])) - 1.0).sum()
        count = count.reshape(t.shape)
    else:
        raise DomainError(f"dimension must be 1 or 2, got {n}")
    return count * h ** n


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``cells ** n`` square cells on a bounding box."""

    n: int
    lo: tuple
    hi: tuple
    cells: int

    def __post_init__(self):
        if self.n not in (1, 2):
            raise DomainError(f"dimension must be 1 or 2, got {self.n}")
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != self.n or len(hi) != self.n:
            raise DomainError("bounding box must have one (lo, hi) pair per axis")
        if int(self.cells) != self.cells or self.cells < 4:
            raise DomainError(f"need at least 4 cells per axis, got {self.cells}")
        widths = [b - a for a, b in zip(lo, hi)]
        if min(widths) <= 0:
            raise DomainError("bounding box must have positive extent")
        if max(widths) - min(widths) > 1e-9 * max(widths):
            raise DomainError("cells must be square: all axes need equal extent")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "cells", int(self.cells))

    @property
    def h(self):
        return (self.hi[0] - self.lo[0]) / self.cells

    @property
    def size(self):
        return self.cells ** self.n

    @property
    def cell_volume(self):
        return self.h ** self.n

    def axis_centers(self, axis):
        # Offsets from the box midpoint keep the centres exactly symmetric.
        mid = 0.5 * (self.lo[axis] + self.hi[axis])
        return mid + (np.arange(self.cells) - 0.5 * (self.cells - 1)) * self.h

    def centers(self):
        """All cell centres, shape ``(cells**n, n)``, in linear index order."""
        axes = [self.axis_centers(a) for a in range(self.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def cell_index(self, point):
        """Linear index of the closed cell containing ``point``, or -1."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        if point.shape != (self.n,):
            raise DomainError(f"point must have {self.n} coordinates")
        idx = 0
        for a in range(self.n):
            t = (point[a] - self.lo[a]) / self.h
            if t < -1e-9 or t > self.cells + 1e-9:
                return -1
            i = min(max(int(math.floor(t + 1e-9)), 0), self.cells - 1)
            # A point on the shared face of two cells goes to the lower one.
            if i > 0 and abs(t - i) <= 1e-9:
                i -= 1
            idx = idx * self.cells + i
        return idx

    def refine(self):
        return Grid(self.n, self.lo, self.hi, 2 * self.cells)


@dataclass(frozen=True, eq=False)
class DomainSet:
    """A bounded set E given as a boolean membership mask over grid cells.

    ``shape`` is an optional predicate on points; when present, refinement
    re-evaluates membership at the finer cell centres instead of splitting
    coarse cells.
    """

    grid: Grid
    mask: np.ndarray
    shape: object = None
    label: str = ""
    member: np.ndarray = field(init=False, repr=False)
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool).ravel().copy()
        if mask.size != self.grid.size:
            raise DomainError("mask size does not match the grid")
        if not mask.any():
            raise DomainError("domain has no member cells")
        mask.setflags(write=False)
        member = np.flatnonzero(mask)
        member.setflags(write=False)
        points = self.grid.centers()[member]
        points.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "member", member)
        object.__setattr__(self, "points", points)
        lookup = np.full(self.grid.size, -1, dtype=np.int64)
        lookup[member] = np.arange(member.size)
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_diam", _discrete_diameter(self.grid, mask))
        if not self._diam > 0:
            raise DomainError("domain diameter is zero; need at least two cells")

    @property
    def n(self):
        return self.grid.n

    @property
    def h(self):
        return self.grid.h

    @property
    def size(self):
        return int(self.member.size)

    @property
    def cell_volume(self):
        return self.grid.cell_volume

    @property
    def measure(self):
        return self.size * self.grid.cell_volume

    @property
    def diam(self):
        return self._diam

    def locate(self, point):
        """Member position of the cell containing ``point``."""
        idx = self.grid.cell_index(point)
        pos = self._lookup[idx] if idx >= 0 else -1
        if pos < 0:
            raise DomainError(f"point {np.ravel(point).tolist()} is not in E")
        return int(pos)

    def contains(self, point):
        idx = self.grid.cell_index(point)
        return idx >= 0 and self._lookup[idx] >= 0

    def distances(self, point):
        """Distances from ``point`` to every member cell centre."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        diff = self.points - point[None, :]
        if self.n == 1:
            return np.abs(diff[:, 0])
        return np.hypot(diff[:, 0], diff[:, 1])

    def refine(self):
        fine = self.grid.refine()
        if self.shape is not None:
            mask = np.asarray(self.shape(fine.centers()), dtype=bool)
        else:
            coarse = self.mask.reshape((self.grid.cells,) * self.n)
            mask = np.kron(coarse, np.ones((2,) * self.n, dtype=bool)).ravel()
        return DomainSet(fine, mask, shape=self.shape, label=self.label)

    def with_cells(self, cells):
        """Same continuum shape on a grid with ``cells`` per axis."""
        if self.shape is None:
            raise DomainError("mask domains can only be refined by doubling")
        g = Grid(self.n, self.grid.lo, self.grid.hi, cells)
        return DomainSet(g, self.shape(g.centers()), shape=self.shape, label=self.label)


def _discrete_diameter(grid, mask):
    # Extreme points of the member set are row extremes, so the pairwise
    # search runs over at most 2 * cells candidates.
    centers = grid.centers()
    if grid.n == 1:
        pts = centers[mask, 0]
        return float(pts.max() - pts.min())
    m2 = mask.reshape(grid.cells, grid.cells)
    cand = []
    for i in range(grid.cells):
        js = np.flatnonzero(m2[i])
        if js.size:
            cand.append(i * grid.cells + js[0])
            cand.append(i * grid.cells + js[-1])
    pts = centers[np.unique(cand)]
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d ** 2).sum(axis=-1)).max())


def box_domain(lo, hi, cells):
    """Axis-aligned box; ``lo`` and ``hi`` are scalars (n=1) or pairs (n=2)."""
    lo = tuple(np.atleast_1d(np.asarray(lo, dtype=float)))
    hi = tuple(np.atleast_1d(np.asarray(hi, dtype=float)))
    grid = Grid(len(lo), lo, hi, cells)

    def shape(pts):
        return np.ones(len(pts), dtype=bool)

    return DomainSet(grid, shape(grid.centers()), shape=shape, label="box")


def disk_domain(cx, cy, r, cells):
    """Open disk of radius ``r``; the grid spans its bounding square."""
    if not r > 0:
        raise DomainError("disk radius must be positive")
    grid = Grid(2, (cx - r, cy - r), (cx + r, cy + r), cells)

    def shape(pts):
        return np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) < r

    return DomainSet(grid, shape(grid.centers()), shape=shape, label="disk")


@dataclass(frozen=True)
class Ball:
    """Euclidean ball ``B(center, radius)``; truncation happens on use."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not self.radius > 0:
            raise DomainError(f"ball radius must be positive, got {self.radius}")

    @property
    def measure(self):
        return ball_measure(self.center.size, self.radius)


def inside(dist, r):
    """Boolean mask ``dist < r`` with ties resolved as outside."""
    return dist < r * (1.0 - _BALL_SLACK)


def truncated_ball_cells(E, ball):
    """Member positions of the cells of ``B(x, r) ∩ E``, ascending.

    The centre must lie in a member cell of ``E``.
    """
    E.locate(ball.center)
    return np.flatnonzero(inside(E.distances(ball.center), ball.radius))


def dyadic_radii_from(diam, h, k_min=1):
    """``diam * 2**-j`` for ``j = 0..J``: all levels >= h, at least ``k_min``."""
    if k_min < 1:
        raise DomainError("k_min must be >= 1")
    j_max = 0
    while diam * 2.0 ** -(j_max + 1) >= h * (1.0 - 1e-12):
        j_max += 1
    j_max = max(j_max, k_min - 1)
    return diam * 2.0 ** -np.arange(j_max + 1, dtype=float)


def dyadic_radii(E, k_min=1):
    return dyadic_radii_from(E.diam, E.h, k_min)


def maximal_radii(E):
    """Dyadic radii plus ``1.5 h`` and ``3 h``, strictly decreasing."""
    extra = np.array([3.0 * E.h, 1.5 * E.h])
    r = np.concatenate([dyadic_radii(E), extra[extra <= E.diam]])
    return np.unique(r)[::-1]


def lattice_centers(E, k):
    """Member cell centres on a ``k``-per-axis sub-lattice of the grid."""
    g = E.grid
    picks = np.unique(np.rint(np.linspace(0, g.cells - 1, min(k, g.cells))).astype(int))
    if E.n == 1:
        lin = picks
    else:
        lin = (picks[:, None] * g.cells + picks[None, :]).ravel()
    lin = lin[E.mask[lin]]
    if lin.size == 0:
        raise DomainError("the lattice misses every member cell")
    return g.centers()[lin]
