"""Parsers for the compact ``kind:args`` strings used on the command line.

Grammar summary::

    domain    box:lo,hi,cells | box:lo,hi,lo2,hi2,cells | disk:cx,cy,r,cells | mask:path
    exponent  const:c | affine:a,b | expr-table:path
    kernel    const:c | sign | cos:m | sin:m | table:path
    function  const:c | indicator:lo,hi[,lo2,hi2] | power:beta | affine:a,b
              | sign:c | random:seed | csv:path
    weight    power:a | power-field:<exponent> | log-power:a,b | ramp:c | table:path
    centers   all | lattice:k | point:x[,y]
    suite     random:seed[,count]
    radii     dyadic[:kmin] | maximal | list:r1,r2,... | log:rmin,rmax,count
"""

import math

import numpy as np

from .errors import DomainError, SpecParseError
from .exponents import ExponentField
from .grid import (DomainSet, Grid, box_domain, disk_domain, dyadic_radii, lattice_centers,
                   maximal_radii)
from .kernel import RoughKernel
from .norms import GridFunction, WeightFunction
from .quadrature import cell_power_integral

# Knuth's MMIX linear congruential generator, modulus 2^64.
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


class LCG:
    """64-bit linear congruential generator with platform-independent output."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK64

    def next_u64(self):
        self.state = (LCG_MULTIPLIER * self.state + LCG_INCREMENT) & _MASK64
        return self.state

    def uniform(self, lo=0.0, hi=1.0):
        # Top 53 bits give a double in [0, 1).
        return lo + (hi - lo) * ((self.next_u64() >> 11) / float(1 << 53))

    def uniforms(self, count, lo=0.0, hi=1.0):
        return np.array([self.uniform(lo, hi) for _ in range(count)])


def _split(spec, flag):
    if not isinstance(spec, str) or not spec:
        raise SpecParseError(f"{flag}: empty spec")
    kind, _, rest = spec.partition(":")
    return kind.strip(), rest


def _floats(rest, flag, counts):
    try:
        vals = [float(t) for t in rest.split(",")] if rest else []
    except ValueError:
        bad = next(t for t in rest.split(",") if not _is_float(t))
        raise SpecParseError(f"{flag}: cannot parse number {bad!r}") from None
    if len(vals) not in counts:
        want = " or ".join(str(c) for c in counts)
        raise SpecParseError(f"{flag}: expected {want} numbers, got {len(vals)} in {rest!r}")
    if not all(math.isfinite(v) for v in vals):
        raise SpecParseError(f"{flag}: non-finite number in {rest!r}")
    return vals


def _is_float(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _cells(v, flag):
    if v != int(v) or v < 4:
        raise SpecParseError(f"{flag}: cell count must be an integer >= 4, got {v:g}")
    return int(v)


def _read_lines(path, flag):
    try:
        with open(path, encoding="utf-8") as fh:
            return [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        raise SpecParseError(f"{flag}: cannot read {path!r}: {exc.strerror}") from None


# ----------------------------------------------------------------- domains
def parse_domain(spec, flag="--domain"):
    kind, rest = _split(spec, flag)
    try:
        if kind == "box":
            v = _floats(rest, flag, (3, 5))
            if len(v) == 3:
                return box_domain(v[0], v[1], _cells(v[2], flag))
            return box_domain((v[0], v[2]), (v[1], v[3]), _cells(v[4], flag))
        if kind == "disk":
            cx, cy, r, c = _floats(rest, flag, (4,))
            return disk_domain(cx, cy, r, _cells(c, flag))
        if kind == "mask":
            return read_mask(rest, flag)
    except SpecParseError:
        raise
    except DomainError as exc:
        raise SpecParseError(f"{flag}: {exc}") from None
    raise SpecParseError(f"{flag}: unknown domain kind {kind!r}")


def read_mask(path, flag="--domain"):
    """Read a mask file.

    Line 1 is ``n cx [cy] h`` where ``(cx, cy)`` is the centre of the first
    cell; each following line is one grid row of 0/1 flags (separated by
    spaces or not).  Row ``j`` of a 2-D mask is the ``j``-th cell in ``y``.
    """
    lines = _read_lines(path, flag)
    if len(lines) < 2:
        raise SpecParseError(f"{flag}: mask file {path!r} needs a header and rows")
    head = lines[0].split()
    try:
        n = int(head[0])
        nums = [float(t) for t in head[1:]]
    except (ValueError, IndexError):
        raise SpecParseError(f"{flag}: bad mask header {lines[0]!r}") from None
    if n not in (1, 2) or len(nums) != n + 1 or not nums[-1] > 0:
        raise SpecParseError(f"{flag}: mask header must be 'n cx [cy] h', got {lines[0]!r}")
    origin, h = nums[:n], nums[-1]
    rows = []
    for ln in lines[1:]:
        toks = ln.split() if " " in ln or "\t" in ln else list(ln)
        if any(t not in ("0", "1") for t in toks):
            raise SpecParseError(f"{flag}: mask rows may only contain 0 and 1, got {ln!r}")
        rows.append([t == "1" for t in toks])
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SpecParseError(f"{flag}: mask rows have different lengths")
    if n == 1:
        if len(rows) != 1:
            raise SpecParseError(f"{flag}: a 1-D mask has a single row")
        mask = np.array(rows[0])
    else:
        if len(rows) != width:
            raise SpecParseError(f"{flag}: 2-D masks must be square ({len(rows)} rows, {width} columns)")
        # File rows run over y; grid linear order is x-major.
        mask = np.array(rows).T.ravel()
    lo = tuple(o - 0.5 * h for o in origin)
    hi = tuple(a + width * h for a in lo)
    try:
        return DomainSet(Grid(n, lo, hi, width), mask, label=f"mask:{path}")
    except DomainError as exc:
        raise SpecParseError(f"{flag}: {exc}") from None


# --------------------------------------------------------------- exponents
def parse_exponent(spec, E, flag="--p", name=None):
    kind, rest = _split(spec, flag)
    name = name or flag.lstrip("-")
    if kind == "const":
        (c,) = _floats(rest, flag, (1,))
        return ExponentField.constant(E, c, name=name)
    if kind == "affine":
        a, b = _floats(rest, flag, (2,))
        return ExponentField.from_function(E, lambda x: a + b * x[:, 0], name=name)
    if kind == "expr-table":
        vals = _table_values(rest, flag)
        if vals.size != E.size:
            raise SpecParseError(f"{flag}: table has {vals.size} values for {E.size} member cells")
        return ExponentField(E, vals, name=name)
    raise SpecParseError(f"{flag}: unknown exponent kind {kind!r}")


def _table_values(path, flag):
    try:
        return np.array([float(t) for ln in _read_lines(path, flag) for t in ln.replace(",", " ").split()])
    except ValueError:
        raise SpecParseError(f"{flag}: table {path!r} contains a non-number") from None


# ----------------------------------------------------------------- kernels
def parse_kernel(spec, n, flag="--kernel", mean_zero_required=False):
    kind, rest = _split(spec, flag)
    try:
        if kind == "const":
            (c,) = _floats(rest, flag, (1,))
            return RoughKernel.constant(n, c, mean_zero_required=mean_zero_required)
        if kind == "sign":
            if n != 1:
                raise SpecParseError(f"{flag}: the sign kernel is one-dimensional")
            return RoughKernel.sign(mean_zero_required=mean_zero_required)
        if kind in ("cos", "sin"):
            if n != 2:
                raise SpecParseError(f"{flag}: angular harmonics need n = 2")
            (m,) = _floats(rest, flag, (1,))
            if m != int(m) or m < 0:
                raise SpecParseError(f"{flag}: harmonic order must be a nonnegative integer")
            make = RoughKernel.cosine if kind == "cos" else RoughKernel.sine
            return make(int(m), mean_zero_required=mean_zero_required)
        if kind == "table":
            if n != 2:
                raise SpecParseError(f"{flag}: angular tables need n = 2")
            return RoughKernel.from_table(_table_values(rest, flag), label=spec,
                                          mean_zero_required=mean_zero_required)
    except SpecParseError:
        raise
    except DomainError as exc:
        raise SpecParseError(f"{flag}: {exc}") from None
    raise SpecParseError(f"{flag}: unknown kernel kind {kind!r}")


# --------------------------------------------------------------- functions
def random_source(seed, n, lo, width, modes=6):
    """Smooth random trigonometric sum on the box ``lo + [0, width]^n``.

    The coefficients depend only on ``seed``, so the same continuum
    function is sampled at every resolution.
    """
    g = LCG(seed)
    if n == 1:
        ks = [(k,) for k in range(1, modes + 1)]
    else:
        ks = [(k1, k2) for k1 in range(modes // 2 + 1) for k2 in range(modes // 2 + 1) if k1 + k2 > 0]
    amp = np.array([g.uniform(-1.0, 1.0) / math.hypot(*k) for k in ks])
    phase = g.uniforms(len(ks), 0.0, 2.0 * math.pi)
    freq = 2.0 * math.pi * np.array(ks, dtype=float) / width
    lo = np.asarray(lo, dtype=float)

    def fn(pts):
        arg = (pts - lo[None, :]) @ freq.T + phase[None, :]
        return np.cos(arg) @ amp

    fn.amplitude = float(np.abs(amp).sum())
    return fn


def random_function(E, seed, nonnegative=False, name=None):
    g = E.grid
    fn = random_source(seed, E.n, g.lo, g.hi[0] - g.lo[0])
    if nonnegative:
        base = fn
        shift = fn.amplitude

        def fn(pts):
            return base(pts) + shift

    return GridFunction.from_function(E, fn, name=name or f"random:{seed}")


def _power_source(beta, n):
    def source(E):
        r = np.sqrt((E.points ** 2).sum(axis=1))
        with np.errstate(divide="ignore"):
            vals = r ** (-beta)
        idx = E.grid.cell_index(np.zeros(n))
        if idx >= 0 and E.mask[idx]:
            pos = E.locate(np.zeros(n))
            c = E.points[pos]
            lo, hi = c - 0.5 * E.h, c + 0.5 * E.h
            vals[pos] = cell_power_integral(n, -beta, lo, hi) / E.cell_volume
        return vals

    return source


def parse_function(spec, E, flag="--f"):
    kind, rest = _split(spec, flag)
    name = spec
    try:
        if kind == "const":
            (c,) = _floats(rest, flag, (1,))
            return GridFunction.constant(E, c, name=name)
        if kind == "indicator":
            v = _floats(rest, flag, (2, 4))
            if E.n == 1 and len(v) != 2:
                raise SpecParseError(f"{flag}: a 1-D indicator takes lo,hi")
            bounds = [(v[0], v[1])] + ([(v[2], v[3])] if len(v) == 4 else [(v[0], v[1])])
            bounds = bounds[: E.n]

            def ind(x):
                ok = np.ones(len(x), dtype=bool)
                for a, (lo, hi) in enumerate(bounds):
                    ok &= (x[:, a] >= lo) & (x[:, a] <= hi)
                return ok.astype(float)

            return GridFunction.from_function(E, ind, name=name)
        if kind == "power":
            (beta,) = _floats(rest, flag, (1,))
            if not 0 <= beta < E.n:
                raise SpecParseError(f"{flag}: power exponent must lie in [0, n)")
            src = _power_source(beta, E.n)
            return GridFunction(E, src(E), source=src, name=name)
        if kind == "affine":
            a, b = _floats(rest, flag, (2,))
            return GridFunction.from_function(E, lambda x: a + b * x[:, 0], name=name)
        if kind == "sign":
            (c,) = _floats(rest, flag, (1,))
            return GridFunction.from_function(E, lambda x: np.sign(x[:, 0] - c), name=name)
        if kind == "random":
            if not rest.strip().isdigit():
                raise SpecParseError(f"{flag}: random seed must be a nonnegative integer, got {rest!r}")
            return random_function(E, int(rest), name=name)
        if kind == "csv":
            return read_function_csv(rest, E, flag)
    except SpecParseError:
        raise
    except DomainError as exc:
        raise SpecParseError(f"{flag}: {exc}") from None
    raise SpecParseError(f"{flag}: unknown function kind {kind!r}")


def read_function_csv(path, E, flag="--f"):
    """Read ``x[,y],value`` rows (``#`` comments allowed) onto ``E``."""
    vals = np.full(E.size, np.nan)
    for ln in _read_lines(path, flag):
        toks = ln.split(",")
        if len(toks) != E.n + 1:
            raise SpecParseError(f"{flag}: expected {E.n + 1} columns, got {ln!r}")
        try:
            nums = [float(t) for t in toks]
        except ValueError:
            raise SpecParseError(f"{flag}: bad csv row {ln!r}") from None
        try:
            pos = E.locate(nums[:-1])
        except DomainError:
            raise SpecParseError(f"{flag}: point {nums[:-1]} is not in the domain") from None
        vals[pos] = nums[-1]
    if np.isnan(vals).any():
        raise SpecParseError(f"{flag}: csv {path!r} does not cover every member cell")
    return GridFunction(E, vals, name=f"csv:{path}")


DEFAULT_SUITE_SIZE = 20


def random_suite(E, seed, count=DEFAULT_SUITE_SIZE, nonnegative=False):
    """``count`` random functions with consecutive seeds ``seed, seed + 1, ...``."""
    return [random_function(E, seed + k, nonnegative=nonnegative, name=f"random:{seed + k}")
            for k in range(count)]


def parse_suite(spec, E, flag="--suite", nonnegative=False):
    kind, rest = _split(spec, flag)
    if kind != "random":
        raise SpecParseError(f"{flag}: unknown suite kind {kind!r}")
    toks = rest.split(",") if rest else []
    if not 1 <= len(toks) <= 2 or not all(t.strip().isdigit() for t in toks):
        raise SpecParseError(f"{flag}: expected random:seed[,count], got {spec!r}")
    count = int(toks[1]) if len(toks) == 2 else DEFAULT_SUITE_SIZE
    if count < 1:
        raise SpecParseError(f"{flag}: suite size must be positive")
    return random_suite(E, int(toks[0]), count, nonnegative)


# ----------------------------------------------------------------- weights
def parse_weight(spec, E, flag="--w"):
    kind, rest = _split(spec, flag)
    if kind == "power":
        (a,) = _floats(rest, flag, (1,))
        return WeightFunction.power(a)
    if kind == "power-field":
        return WeightFunction.power_field(parse_exponent(rest, E, flag, name="lambda"))
    if kind == "log-power":
        a, b = _floats(rest, flag, (2,))
        return WeightFunction.log_power(a, b)
    if kind == "ramp":
        (c,) = _floats(rest, flag, (1,))
        return WeightFunction(lambda E_, pos, r: np.maximum(0.0, r - c), label=spec)
    if kind == "table":
        rows = [ln.replace(",", " ").split() for ln in _read_lines(rest, flag)]
        try:
            arr = np.array(rows, dtype=float)
        except ValueError:
            raise SpecParseError(f"{flag}: weight table must hold 'r w' rows") from None
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise SpecParseError(f"{flag}: weight table must hold 'r w' rows")
        try:
            return WeightFunction.table(arr[:, 0], arr[:, 1])
        except DomainError as exc:
            raise SpecParseError(f"{flag}: {exc}") from None
    raise SpecParseError(f"{flag}: unknown weight kind {kind!r}")


# ------------------------------------------------------------ sweep sets
def parse_centers(spec, E, flag="--centers"):
    kind, rest = _split(spec, flag)
    if kind == "all":
        return E.points.copy()
    if kind == "lattice":
        (k,) = _floats(rest, flag, (1,))
        if k != int(k) or k < 1:
            raise SpecParseError(f"{flag}: lattice size must be a positive integer")
        try:
            return lattice_centers(E, int(k))
        except DomainError as exc:
            raise SpecParseError(f"{flag}: {exc}") from None
    if kind == "point":
        v = _floats(rest, flag, (E.n,))
        if not E.contains(v):
            raise SpecParseError(f"{flag}: point {v} is not in the domain")
        return np.array([v])
    raise SpecParseError(f"{flag}: unknown centers mode {kind!r}")


def parse_radii(spec, E, flag="--radii"):
    kind, rest = _split(spec, flag)
    if kind == "dyadic":
        kmin = int(_floats(rest, flag, (1,))[0]) if rest else 1
        return dyadic_radii(E, kmin)
    if kind == "maximal":
        return maximal_radii(E)
    if kind == "list":
        r = np.array(_floats(rest, flag, range(1, 10_000)))
        if np.any(r <= 0):
            raise SpecParseError(f"{flag}: radii must be positive")
        return r
    if kind == "log":
        a, b, c = _floats(rest, flag, (3,))
        if not 0 < a < b or c != int(c) or c < 2:
            raise SpecParseError(f"{flag}: log:rmin,rmax,count needs 0 < rmin < rmax and count >= 2")
        return np.geomspace(b, a, int(c))
    raise SpecParseError(f"{flag}: unknown radii mode {kind!r}")
