"""Modulars, Luxemburg norms and the Morrey/Campanato family of sup-type norms.

Every sup-type norm is a finite sweep over explicit centres and radii.
Local norms ``||f||_{L^{p(.)}(B~(x, t))}`` for one centre ``x`` are nested
in ``t`` and change only when ``t`` crosses a cell distance; :class:`BallNorms`
exploits this by sorting the cells once and bisecting all requested balls
in a single batch.
"""

from dataclasses import dataclass

import numpy as np

from ._parallel import map_chunks
from .errors import ConvergenceError, DomainError
from .exponents import same_domain
from .grid import _BALL_SLACK, Ball, ball_measure, truncated_ball_cells

LUX_RTOL = 1e-10
LUX_MAX_ITER = 200
_TINY = np.finfo(float).tiny


class GridFunction:
    """Real values on the member cells of a domain (immutable).

    ``source(E) -> values``, when present, regenerates the same continuum
    function on another resolution of the domain.
    """

    def __init__(self, domain, values, source=None, name=""):
        values = np.array(values, dtype=float).ravel()
        if values.size == 1 and domain.size != 1:
            values = np.full(domain.size, float(values[0]))
        if values.size != domain.size:
            raise DomainError(f"function has {values.size} values for {domain.size} cells")
        if not np.all(np.isfinite(values)):
            raise DomainError("function values must be finite")
        values.setflags(write=False)
        self.domain = domain
        self.values = values
        self.source = source
        self.name = name

    @classmethod
    def from_function(cls, domain, fn, name=""):
        def source(E):
            return np.broadcast_to(np.asarray(fn(E.points), dtype=float), (E.size,)).copy()

        return cls(domain, source(domain), source=source, name=name)

    @classmethod
    def constant(cls, domain, c, name=""):
        c = float(c)
        return cls(domain, np.full(domain.size, c), source=lambda E: np.full(E.size, c), name=name)

    def resample(self, domain):
        if self.source is None:
            raise DomainError(f"function {self.name!r} has no source to resample")
        return GridFunction(domain, self.source(domain), source=self.source, name=self.name)

    def map(self, op, name=""):
        """Pointwise transform that keeps the ability to resample."""
        src = None if self.source is None else (lambda E, s=self.source: op(s(E)))
        return GridFunction(self.domain, op(self.values), source=src, name=name or self.name)

    def scaled(self, c):
        return self.map(lambda v: c * v, name=f"{c:g}*{self.name}")

    def absolute(self):
        return self.map(np.abs, name=f"|{self.name}|")

    def is_zero(self):
        return not np.any(self.values)

    def __repr__(self):
        return f"GridFunction({self.name or '?'}, cells={self.values.size})"


def _require_same(*objs):
    first = objs[0].domain
    for o in objs[1:]:
        if o is not None and not same_domain(first, o.domain):
            raise DomainError("functions and exponents are defined on different grids")


class WeightFunction:
    """A positive weight ``w(x, r)`` on centres times radii.

    ``fn(E, pos, r)`` receives member positions ``pos`` and radii ``r``
    (broadcastable arrays) and returns weights of the broadcast shape.
    """

    def __init__(self, fn, label=""):
        self._fn = fn
        self.label = label

    def __call__(self, E, pos, r):
        pos = np.asarray(pos)
        r = np.asarray(r, dtype=float)
        out = np.asarray(self._fn(E, pos, r), dtype=float)
        return np.broadcast_to(out, np.broadcast(pos, r).shape)

    @classmethod
    def power(cls, a):
        a = float(a)
        return cls(lambda E, pos, r: r ** a, label=f"power:{a:g}")

    @classmethod
    def power_field(cls, lam):
        """``w(x, r) = r^{lam(x)}`` for an exponent field ``lam``."""

        def fn(E, pos, r):
            field = lam if same_domain(lam.domain, E) else lam.resample(E)
            return r ** field.values[pos]

        return cls(fn, label=f"power-field:{lam.name}")

    @classmethod
    def log_power(cls, a, b):
        a, b = float(a), float(b)
        return cls(lambda E, pos, r: r ** a * (1.0 + np.abs(np.log(r))) ** b,
                   label=f"log-power:{a:g},{b:g}")

    @classmethod
    def table(cls, radii, values):
        """Piecewise-linear in ``r`` between tabulated radii.

        ``values`` has shape ``(R,)`` (independent of ``x``) or
        ``(cells, R)`` with one row per member cell.
        """
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.size < 1 or np.any(np.diff(radii) <= 0):
            raise DomainError("weight table radii must be strictly increasing")
        if values.shape[-1] != radii.size:
            raise DomainError("weight table values do not match its radii")

        def fn(E, pos, r):
            if values.ndim == 1:
                return np.interp(r, radii, values)
            if values.shape[0] != E.size:
                raise DomainError("weight table rows do not match the domain")
            pos_b, r_b = np.broadcast_arrays(pos, r)
            out = np.empty(pos_b.shape)
            for i in np.ndindex(pos_b.shape):
                out[i] = np.interp(r_b[i], radii, values[pos_b[i]])
            return out

        return cls(fn, label="table")


@dataclass
class NormResult:
    """Value of a norm; ``at`` is the maximising ``(x, r)`` for sweeps."""

    value: float
    at: tuple = None
    iterations: int = 0

    def __float__(self):
        return float(self.value)


def _log_abs(values):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def _modular_rows(loga, p, log_lam, hn):
    # Rows of sum |a|^p / lam^p * h^n; loga may be (K, m) or (m,).
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.exp(p * (loga - log_lam[:, None]))
        terms = np.where(np.isneginf(loga), 0.0, terms)
        return terms.sum(axis=1) * hn


def _lux_bisect(loga, p, counts, hn, rtol=LUX_RTOL, max_iter=LUX_MAX_ITER):
    """Luxemburg norms of the prefix sets ``[:counts[k]]`` of sorted cells.

    ``loga`` has shape ``(m,)`` shared by all sets or ``(K, m)``.  Returns
    ``(norms, iterations)``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    K = counts.size
    m = loga.shape[-1]
    cols = np.arange(m)
    inset = cols[None, :] < counts[:, None]
    la = np.where(inset, loga if loga.ndim == 2 else loga[None, :], -np.inf)
    live = ~np.isneginf(la)
    nonzero = live.any(axis=1)
    amax = np.exp(np.where(live, la, -np.inf).max(axis=1, initial=-np.inf))
    p_low = np.where(inset, p[None, :], np.inf).min(axis=1, initial=np.inf)
    meas = counts * hn
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = np.where(nonzero, amax * meas ** (1.0 / p_low) + 1.0, 0.0)
    lo = np.full(K, _TINY)
    norms = np.zeros(K)
    rows = np.flatnonzero(nonzero)
    if rows.size == 0:
        return norms, 0
    la, hi, lo = la[rows], hi[rows], lo[rows]
    # The textbook bracket can undershoot when p varies on a small set; widen it.
    for _ in range(64):
        bad = _modular_rows(la, p, np.log(hi), hn) > 1.0
        if not bad.any():
            break
        hi = np.where(bad, 2.0 * hi, hi)
    iterations = 0
    todo = np.arange(rows.size)
    while todo.size:
        if iterations >= max_iter:
            raise ConvergenceError(f"Luxemburg bisection did not converge in {max_iter} steps")
        iterations += 1
        l, h = lo[todo], hi[todo]
        mid = np.where(h > 4.0 * l, np.sqrt(l * h), 0.5 * (l + h))
        ok = _modular_rows(la[todo], p, np.log(mid), hn) <= 1.0
        hi[todo] = np.where(ok, mid, h)
        lo[todo] = np.where(ok, l, mid)
        todo = todo[(hi[todo] - lo[todo]) > rtol * hi[todo]]
    norms[rows] = hi
    return norms, iterations


def _positions(f, cells):
    if cells is None:
        return np.arange(f.domain.size)
    cells = np.asarray(cells, dtype=np.int64).ravel()
    if cells.size and (cells.min() < 0 or cells.max() >= f.domain.size):
        raise DomainError("cell positions are out of range for the domain")
    return cells


def modular(f, p, cells=None):
    """``sum |f|^{p} h^n`` over ``cells`` (member positions; default all)."""
    _require_same(f, p)
    idx = _positions(f, cells)
    a = np.abs(f.values[idx])
    with np.errstate(over="ignore"):
        terms = np.where(a > 0, a ** p.values[idx], 0.0)
    return float(terms.sum() * f.domain.cell_volume)


def luxemburg_norm(f, p, cells=None):
    """``inf { lam > 0 : modular(f / lam) <= 1 }`` by bracketed bisection."""
    _require_same(f, p)
    idx = _positions(f, cells)
    if idx.size == 0:
        raise DomainError("Luxemburg norm over an empty cell set")
    norms, its = _lux_bisect(_log_abs(f.values[idx]), p.values[idx],
                             [idx.size], f.domain.cell_volume)
    return NormResult(float(norms[0]), iterations=its)


def luxemburg_many(f, p, cell_sets):
    """Luxemburg norms of ``f`` over several cell sets."""
    _require_same(f, p)
    loga = _log_abs(f.values)
    out = np.empty(len(cell_sets))
    for k, c in enumerate(cell_sets):
        s = _positions(f, c)
        if s.size == 0:
            raise DomainError("Luxemburg norm over an empty cell set")
        out[k] = _lux_bisect(loga[s], p.values[s], [s.size], f.domain.cell_volume)[0][0]
    return out


class BallNorms:
    """Local norms ``t -> ||f||_{L^{p(.)}(B~(x, t))}`` for a fixed centre.

    Cells are sorted by distance to ``x`` (ties by linear index) so that
    every truncated ball is a prefix; norms are memoised by prefix length.
    """

    def __init__(self, f, p, x):
        _require_same(f, p)
        E = f.domain
        x = np.atleast_1d(np.asarray(x, dtype=float))
        self.position = E.locate(x)
        self.x = x
        d = E.distances(x)
        self.order = np.argsort(d, kind="stable")
        self.sorted_dist = d[self.order]
        self._loga = _log_abs(f.values)[self.order]
        self._p = p.values[self.order]
        self._hn = E.cell_volume
        self._cache = {}

    def counts(self, t):
        thr = np.asarray(t, dtype=float) * (1.0 - _BALL_SLACK)
        return np.searchsorted(self.sorted_dist, thr, side="left")

    def cells(self, t):
        """Member positions of ``B~(x, t)`` in ascending order."""
        return np.sort(self.order[: int(self.counts(t))])

    def norms(self, t):
        t = np.asarray(t, dtype=float)
        k = self.counts(t)
        need = sorted({int(c) for c in np.unique(k)} - set(self._cache) - {0})
        if need:
            width = need[-1]
            vals, _ = _lux_bisect(self._loga[:width], self._p[:width], need, self._hn)
            self._cache.update(zip(need, vals.tolist()))
        self._cache.setdefault(0, 0.0)
        return np.vectorize(self._cache.__getitem__, otypes=[float])(k)


def _centres(E, centers):
    pts = np.atleast_2d(np.asarray(centers, dtype=float))
    if E.n == 1 and pts.shape[0] == 1 and pts.shape[1] != 1:
        pts = pts.T
    if pts.shape[1] != E.n:
        raise DomainError(f"centres must have {E.n} coordinates")
    pos = np.array([E.locate(x) for x in pts], dtype=np.int64)
    return pts, pos


def _radii(radii):
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    if r.size == 0:
        raise DomainError("radius sweep is empty")
    if np.any(r <= 0):
        raise DomainError("radii must be positive")
    return r


def _argmax_tiebreak(values, E, pos, radii):
    # Largest value; ties by smallest linear cell index then smallest r.
    lin = E.member[pos]
    grid_lin = np.repeat(lin[:, None], radii.size, axis=1)
    grid_r = np.repeat(radii[None, :], lin.size, axis=0)
    order = np.lexsort((grid_r.ravel(), grid_lin.ravel(), -values.ravel()))
    return np.unravel_index(order[0], values.shape)


def ball_norm_table(f, p, centers, radii):
    """``||f||_{L^{p(.)}(B~(x, r))}`` for every centre (row) and radius (column)."""
    E = f.domain
    pts, _ = _centres(E, centers)
    r = _radii(radii)

    def block(lo, hi):
        return [BallNorms(f, p, pts[i]).norms(r) for i in range(lo, hi)]

    rows = [row for chunk in map_chunks(block, len(pts), 8) for row in chunk]
    return np.array(rows).reshape(len(pts), r.size)


def _sweep_result(scaled, E, pts, pos, r):
    if not np.all(np.isfinite(scaled)):
        raise DomainError("sweep produced a non-finite value")
    i, j = _argmax_tiebreak(scaled, E, pos, r)
    x = pts[i] if E.n > 1 else float(pts[i][0])
    return NormResult(float(scaled[i, j]), at=(x, float(r[j])))


def morrey_norm(f, p, lam, centers, radii):
    """``sup r^{-lam(x)/p(x)} ||f||_{L^{p(.)}(B~(x, r))}`` over the sweep."""
    _require_same(f, p, lam)
    E = f.domain
    if lam.lower < 0 or lam.upper > E.n:
        raise DomainError("Morrey exponent lambda must lie in [0, n]")
    pts, pos = _centres(E, centers)
    r = _radii(radii)
    table = ball_norm_table(f, p, pts, r)
    expo = -(lam.values[pos] / p.values[pos])[:, None]
    return _sweep_result(table * r[None, :] ** expo, E, pts, pos, r)


def generalized_morrey_norm(f, p, w, centers, radii):
    """``sup w(x, r)^{-1/p(x)} ||f||_{L^{p(.)}(B~(x, r))}`` over the sweep."""
    _require_same(f, p)
    E = f.domain
    pts, pos = _centres(E, centers)
    r = _radii(radii)
    wv = w(E, pos[:, None], r[None, :])
    if not np.all(wv > 0):
        i, j = np.argwhere(~(wv > 0))[0]
        raise DomainError(f"weight is not positive at x={pts[i].tolist()}, r={r[j]:g}")
    table = ball_norm_table(f, p, pts, r)
    return _sweep_result(table * wv ** (-1.0 / p.values[pos])[:, None], E, pts, pos, r)


def vanishing_modulus(f, p, w, centers, r):
    """``sup_x r^{-n/p(x)} ||f||_{L^{p(.)}(B~(x, r))} / w(x, r)^{1/p(x)}``."""
    _require_same(f, p)
    E = f.domain
    pts, pos = _centres(E, centers)
    r = float(r)
    if not r > 0:
        raise DomainError("radius must be positive")
    wv = np.asarray(w(E, pos, r), dtype=float)
    if not np.all(wv > 0):
        raise DomainError(f"weight is not positive at r={r:g}")
    table = ball_norm_table(f, p, pts, [r])[:, 0]
    inv_p = 1.0 / p.values[pos]
    return float(np.max(table * r ** (-E.n * inv_p) * wv ** (-inv_p)))


def mean_on_ball(f, ball):
    """``(1 / |B(x, r)|) sum_{B~(x, r)} f h^n`` with the full-ball normaliser."""
    E = f.domain
    cells = truncated_ball_cells(E, ball)
    if cells.size == 0:
        raise DomainError("truncated ball is empty")
    return float(f.values[cells].sum() * E.cell_volume / ball_measure(E.n, ball.radius))


def campanato_norm(f, q, gamma, centers, radii):
    """``sup |B|^{-1/q(x) - gamma(x)} ||f - f_B||_{L^{q(.)}(B~(x, r))}`` over the sweep.

    ``f_B`` is the average over the truncated ball, so constants have norm 0;
    ``|B| = v_n r^n`` is the full-ball measure.
    """
    _require_same(f, q, gamma)
    E = f.domain
    if gamma.lower < 0 or gamma.upper >= 1.0 / E.n:
        raise DomainError("Campanato exponent gamma must lie in [0, 1/n)")
    pts, pos = _centres(E, centers)
    r = _radii(radii)

    def block(lo, hi):
        out = []
        for i in range(lo, hi):
            row = np.empty(r.size)
            for j, rj in enumerate(r):
                cells = truncated_ball_cells(E, Ball(pts[i], rj))
                if cells.size == 0:
                    raise DomainError("truncated ball is empty")
                dev = f.values[cells] - f.values[cells].mean()
                row[j] = _lux_bisect(_log_abs(dev), q.values[cells], [cells.size],
                                     E.cell_volume)[0][0]
            out.append(row)
        return out

    table = np.array([row for ch in map_chunks(block, len(pts), 8) for row in ch])
    table = table.reshape(len(pts), r.size)
    qx, gx = q.values[pos][:, None], gamma.values[pos][:, None]
    scale = ball_measure(E.n, 1.0) * r[None, :] ** E.n
    return _sweep_result(table * scale ** (-1.0 / qx - gx), E, pts, pos, r)


def characteristic(domain, cells=None, name="chi"):
    """Indicator function of the given member positions (default: all of E)."""
    v = np.zeros(domain.size)
    v[np.arange(domain.size) if cells is None else np.asarray(cells)] = 1.0
    return GridFunction(domain, v, name=name)
