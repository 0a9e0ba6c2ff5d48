"""Entanglement test on measured CHSH correlations with uncertain angles.

The measured value ``s = |E(A,B) + E(A,B') + E(A',B) - E(A',B')|`` is
compared with the largest separable bound over the box of angles the
experimenter can vouch for. The worst case (maximum) over the box is used, so
the verdict stays sound however the true angles sit inside it.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bell import AnglePair
from .bounds import TSIRELSON, bound_general, bound_separable, violation_factor

ONE_DEGREE = math.pi / 180.0
DECISION_TOL = 1e-9
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class UnphysicalInput(ValueError):
    """Correlations exceed what any quantum state can produce. ``verdict`` holds the classification."""

    def __init__(self, verdict: Verdict):
        self.verdict = verdict
        super().__init__(
            f"|<B>| = {verdict.s_value:.10g} exceeds the Tsirelson bound 2*sqrt(2) "
            f"(+ sigma = {verdict.stat_uncertainty:g})"
        )


class Conclusion(str, enum.Enum):
    ENTANGLED = "entangled"
    CONSISTENT_WITH_SEPARABLE = "consistent_with_separable"
    UNPHYSICAL = "unphysical"


@dataclass(frozen=True)
class CorrelationData:
    e_ab: float
    e_abp: float
    e_apb: float
    e_apbp: float
    stat_uncertainty: float = 0.0

    def __post_init__(self):
        for name in ("e_ab", "e_abp", "e_apb", "e_apbp"):
            v = getattr(self, name)
            if not math.isfinite(v) or abs(v) > 1.0 + 1e-12:
                raise ValueError(f"correlation {name}={v} outside [-1, 1]")
        if not math.isfinite(self.stat_uncertainty) or self.stat_uncertainty < 0:
            raise ValueError(f"stat_uncertainty must be >= 0, got {self.stat_uncertainty}")

    @property
    def chsh_value(self) -> float:
        return abs(self.e_ab + self.e_abp + self.e_apb - self.e_apbp)


@dataclass(frozen=True)
class AngleKnowledge:
    """Closed intervals (radians) known to contain theta_a and theta_b."""

    theta_a_interval: tuple[float, float]
    theta_b_interval: tuple[float, float]

    def __post_init__(self):
        for name in ("theta_a_interval", "theta_b_interval"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not lo <= hi:
                raise ValueError(f"{name}: lower end {lo} above upper end {hi}")
            if hi - lo >= math.pi:
                raise ValueError(f"{name}: width {hi - lo} must be below pi")
            object.__setattr__(self, name, (lo, hi))

    @classmethod
    def around(cls, theta_a: float, theta_b: float, eps_a: float = 0.0, eps_b: float | None = None) -> AngleKnowledge:
        eps_b = eps_a if eps_b is None else eps_b
        return cls((theta_a - eps_a, theta_a + eps_a), (theta_b - eps_b, theta_b + eps_b))


@dataclass(frozen=True)
class Verdict:
    s_value: float
    d_worst: float
    c_worst: float
    conclusion: Conclusion
    margin: float
    stat_uncertainty: float = 0.0


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    if hi == lo:
        return np.array([lo])
    return np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / step - 1e-9)) + 1))


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> tuple[float, float]:
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def box_max(bound: Callable[[AnglePair], float], k: AngleKnowledge, step: float = ONE_DEGREE) -> float:
    """Max of ``bound`` over the angle box: grid scan then golden-section on each axis around the argmax."""
    xs = _axis(*k.theta_a_interval, step)
    ys = _axis(*k.theta_b_interval, step)
    vals = np.array([[bound(AnglePair(x, y)) for y in ys] for x in xs])
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])
    x0, y0 = float(xs[i]), float(ys[j])

    lo_a, hi_a = k.theta_a_interval
    lo_b, hi_b = k.theta_b_interval
    if hi_a > lo_a:
        x0, val = _golden_max(lambda x: bound(AnglePair(x, y0)), max(lo_a, x0 - step), min(hi_a, x0 + step))
        best = max(best, val)
    if hi_b > lo_b:
        _, val = _golden_max(lambda y: bound(AnglePair(x0, y)), max(lo_b, y0 - step), min(hi_b, y0 + step))
        best = max(best, val)
    return best


@functools.lru_cache(maxsize=256)
def robust_separable_bound(k: AngleKnowledge) -> float:
    """Largest separable bound attainable anywhere in the angle box."""
    return box_max(lambda ang: bound_separable(ang).value, k)


@functools.lru_cache(maxsize=256)
def robust_general_bound(k: AngleKnowledge) -> float:
    return box_max(lambda ang: bound_general(ang).value, k)


def evaluate(data: CorrelationData, k: AngleKnowledge) -> Verdict:
    """Classify the measured correlations.

    Entangled when ``s - sigma`` exceeds the worst-case separable bound by
    more than 1e-9; unphysical when it exceeds the worst-case quantum bound
    the same way. Raises UnphysicalInput (with the verdict attached) when
    ``s`` is beyond 2*sqrt(2) even after allowing for ``sigma``.
    """
    s = data.chsh_value
    sigma = data.stat_uncertainty
    d_worst = robust_separable_bound(k)
    c_worst = robust_general_bound(k)
    lower = s - sigma
    if lower > c_worst + DECISION_TOL:
        conclusion = Conclusion.UNPHYSICAL
    elif lower > d_worst + DECISION_TOL:
        conclusion = Conclusion.ENTANGLED
    else:
        conclusion = Conclusion.CONSISTENT_WITH_SEPARABLE
    verdict = Verdict(s, d_worst, c_worst, conclusion, lower - d_worst, sigma)
    if s > TSIRELSON * (1.0 + 1e-9) + sigma:
        raise UnphysicalInput(verdict)
    return verdict


def detection_region(k: AngleKnowledge, grid: int) -> list[tuple[float, float, float, float, float]]:
    """Rows (theta_a, theta_b, D, C, C/D) over a ``grid`` x ``grid`` lattice of the box."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    rows = []
    for x in np.linspace(*k.theta_a_interval, grid):
        for y in np.linspace(*k.theta_b_interval, grid):
            ang = AnglePair(x, y)
            rows.append((float(x), float(y), bound_separable(ang).value, bound_general(ang).value, violation_factor(ang)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows
