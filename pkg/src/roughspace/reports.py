"""Result records returned by condition checkers and estimate verifiers."""

import math
from dataclasses import dataclass, field

import numpy as np


def safe_ratio(lhs, rhs):
    """Elementwise ``lhs / rhs`` with ``0/0 -> 0`` and ``x/0 -> inf``."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.inf)
    return np.where(lhs == 0, 0.0, out)


def refine_ratio(c_h, c_h2):
    """``C(h/2) / C(h)``, read as 1 when both constants vanish."""
    if c_h == 0 and c_h2 == 0:
        return 1.0
    if c_h == 0:
        return math.inf
    return c_h2 / c_h


def _point_columns(points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return [points[:, a] for a in range(points.shape[1])]


@dataclass
class ConditionReport:
    """Outcome of a weight or exponent admissibility check."""

    condition: str
    r: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    sup_ratio: float
    passed: bool
    diagnosis: str = "bounded"
    centers: np.ndarray = None
    details: dict = field(default_factory=dict)

    def columns(self):
        names, cols = [], []
        if self.centers is not None:
            pts = _point_columns(self.centers)
            names += ["x", "y"][: len(pts)]
            cols += pts
        names += ["r", "lhs", "rhs", "ratio"]
        cols += [self.r, self.lhs, self.rhs, safe_ratio(self.lhs, self.rhs)]
        return names, cols

    def verdict(self, fmt=repr):
        word = "PASS" if self.passed else "FAIL"
        return f"{word} C_emp={fmt(self.sup_ratio)} refine=nan diagnosis={self.diagnosis}"


@dataclass
class EstimateReport:
    """Empirical constant of a pointwise inequality ``LHS <= C * RHS``.

    ``refinement`` holds ``(C at h, C at h/2)`` when a second resolution
    was run; the verdict is then gated on their ratio.
    """

    estimate: str
    centers: np.ndarray
    radii: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    constant: float
    passed: bool
    refinement: tuple = None
    notes: list = field(default_factory=list)

    @property
    def refine(self):
        if self.refinement is None:
            return math.nan
        return refine_ratio(*self.refinement)

    def columns(self):
        pts = _point_columns(self.centers)
        names = ["x", "y"][: len(pts)] + ["r", "lhs", "rhs", "ratio"]
        return names, pts + [self.radii, self.lhs, self.rhs, safe_ratio(self.lhs, self.rhs)]

    def verdict(self, fmt=repr):
        word = "PASS" if self.passed else "FAIL"
        return f"{word} C_emp={fmt(self.constant)} refine={fmt(self.refine)}"


@dataclass
class VerificationReport:
    """Log-log scaling check: fitted slope against a predicted exponent."""

    check: str
    radii: np.ndarray
    values: np.ndarray
    slope: float
    predicted: float
    ratios: np.ndarray
    passed: bool
    tolerance: float = 0.05
    notes: list = field(default_factory=list)

    @property
    def slope_error(self):
        return abs(self.slope - self.predicted)

    def columns(self):
        return ["r", "value", "ratio"], [self.radii, self.values, self.ratios]

    def verdict(self, fmt=repr):
        word = "PASS" if self.passed else "FAIL"
        return (f"{word} C_emp={fmt(float(np.max(self.ratios)))} refine=nan "
                f"slope={fmt(self.slope)} predicted={fmt(self.predicted)}")


def loglog_slope(radii, values):
    """Least-squares slope of ``log(values)`` against ``log(radii)``."""
    x = np.log(np.asarray(radii, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.size < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])
