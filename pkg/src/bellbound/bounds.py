"""Closed-form CHSH bounds as functions of the local measurement angles.

``bound_general`` is the maximum of |<B>| over all two-qubit states and
``bound_separable`` the maximum over separable states. Both depend on the
settings only through the product ``s = |sin(theta_a) sin(theta_b)|``:

    C = sqrt(4 + 4 s)
    D = sqrt(1 + s) + sqrt(1 - s) = sqrt(2 + 2 sqrt(1 - s**2))

D follows from the two-phase product-state objective
``cos(p1) u(p2) + cos(p1 - ta) v(p2)``: the p1 maximum is
``|u + v e^{i ta}|`` and the remaining p2 maximum is the top eigenvalue of a
2x2 quadratic form, ``2 (1 + sqrt(1 - sin^2 ta sin^2 tb))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .bell import AnglePair, BellSetting, TwoQubitState, commutator_observable, local_expectation, signed_angle
from .qlin import IDENTITY2, IDENTITY4, commutator, expectation, tensor

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2
ANTICOMMUTE_TOL = 1e-9
ROY_BRANCH = 3.0 - 2.0 * SQRT2


class BoundMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    ORACLE = "oracle"


@dataclass(frozen=True)
class BoundResult:
    value: float
    method: BoundMethod
    maximizer: Any = None

    def __post_init__(self):
        if not (0.0 <= self.value <= TSIRELSON + 1e-9):
            raise ValueError(f"bound value {self.value} outside [0, 2*sqrt(2)]")

    def __float__(self) -> float:
        return self.value


class NotAnticommuting(ValueError):
    def __init__(self, norm_a: float, norm_b: float):
        self.norm_a = norm_a
        self.norm_b = norm_b
        super().__init__(f"local observables do not anticommute: ||{{A,A'}}|| = {norm_a:.3e}, ||{{B,B'}}|| = {norm_b:.3e}")


def _sine_product(angles: AnglePair) -> float:
    # clamp away round-off above 1 so sqrt(1 - s) stays real
    return min(1.0, abs(math.sin(angles.theta_a) * math.sin(angles.theta_b)))


def bound_general(angles: AnglePair) -> BoundResult:
    """Maximum of |<B>| over all states: sqrt(4 + 4 |sin ta sin tb|)."""
    return BoundResult(math.sqrt(4.0 + 4.0 * _sine_product(angles)), BoundMethod.CLOSED_FORM)


def bound_general_equal(theta: float) -> BoundResult:
    return BoundResult(math.sqrt(4.0 + 4.0 * math.sin(theta) ** 2), BoundMethod.CLOSED_FORM)


def bound_separable(angles: AnglePair) -> BoundResult:
    """Maximum of |<B>| over separable states.

    The product-state maximum is reached with both Bloch vectors in the
    measurement plane; the value is ``sqrt(1 + s) + sqrt(1 - s)``.
    """
    s = _sine_product(angles)
    return BoundResult(math.sqrt(1.0 + s) + math.sqrt(1.0 - s), BoundMethod.CLOSED_FORM)


def bound_separable_equal(theta: float) -> BoundResult:
    """|cos theta| + sqrt(1 + sin^2 theta)."""
    return BoundResult(abs(math.cos(theta)) + math.sqrt(1.0 + math.sin(theta) ** 2), BoundMethod.CLOSED_FORM)


def separable_bound_auxiliary(angles: AnglePair) -> float:
    """The W/X/Y/Z auxiliary expression for the separable maximum, evaluated literally.

    Kept for comparison only: it does not reproduce the product-state
    maximum (see ``bound_separable``). Returns NaN where one of its
    denominators (sin ta cos^2 ta sin^2 tb, sin tb * Y) vanishes.
    """
    ta, tb = angles.theta_a, angles.theta_b
    ca, sa, cb, sb = math.cos(ta), math.sin(ta), math.cos(tb), math.sin(tb)
    denom = sa * ca**2 * sb**2
    if abs(denom) < 1e-12:
        return math.nan
    sign = 1.0 if abs(signed_angle(ta)) <= math.pi / 2 else -1.0
    root = math.sqrt(ca**2 * (1 + cb**2) * (cb**2 + ca**2 * sb**2))
    x = (-ca * (cb + cb**2 + ca**2 * sb**2) + sign * root) / denom
    y = x * (1 - ca + sa)
    z = x * (1 + cb + ca - cb * ca) + cb * sa - sa
    if abs(sb * y) < 1e-12:
        return math.nan
    q = z / (sb * y)
    w_plus = (1 + q**2) ** -0.5 + math.cos(math.atan(q) + tb)
    w_minus = (1 + q**2) ** -0.5 - math.cos(math.atan(q) + tb)
    return abs(w_plus * (1 + x**2) ** -0.5 + math.cos(math.atan(x) - ta) * w_minus)


def bound_roy(theta: float) -> float:
    """Earlier equal-angle separable bound; weaker than ``bound_separable_equal``."""
    c = abs(math.cos(theta))
    if c <= ROY_BRANCH:
        return SQRT2 * (c + 1.0)
    return 1.0 + 2.0 * math.sqrt(c) - c


def violation_factor(angles: AnglePair) -> float:
    """C / D."""
    return bound_general(angles).value / bound_separable(angles).value


def violation_factor_chsh(angles: AnglePair) -> float:
    """C / 2, the factor by which the quantum maximum exceeds the CHSH bound."""
    return bound_general(angles).value / 2.0


def tsirelson_rhs(setting: BellSetting, state: TwoQubitState) -> float:
    """sqrt(4 + |<[A,A'] (x) [B,B']>_rho|)."""
    op = tensor(commutator(setting.a.matrix, setting.a_prime.matrix), commutator(setting.b.matrix, setting.b_prime.matrix))
    return math.sqrt(4.0 + abs(np.trace(op @ state.rho)))


def _require_anticommuting(setting: BellSetting) -> None:
    na, nb = setting.anticommutator_norms()
    if na > ANTICOMMUTE_TOL or nb > ANTICOMMUTE_TOL:
        raise NotAnticommuting(na, nb)


def separability_rhs_anticommuting(setting: BellSetting, state: TwoQubitState) -> float:
    """Separable-state bound on |<B>| for locally anticommuting observables.

    sqrt(2 (1 - |<[A,A']>_1|^2 / 4) (1 - |<[B,B']>_2|^2 / 4)), never above sqrt(2).
    """
    _require_anticommuting(setting)
    ca = local_expectation(commutator(setting.a.matrix, setting.a_prime.matrix), state, 0)
    cb = local_expectation(commutator(setting.b.matrix, setting.b_prime.matrix), state, 1)
    fa = max(0.0, 1.0 - 0.25 * abs(ca) ** 2)
    fb = max(0.0, 1.0 - 0.25 * abs(cb) ** 2)
    return math.sqrt(2.0 * fa * fb)


def quadratic_separability_gap(setting: BellSetting, state: TwoQubitState) -> float:
    """RHS - LHS of the quadratic separability inequality.

    LHS = <B>^2 + <B'>^2, RHS = 2 [<I - A''B''>^2 - <A'' - B''>^2] with
    A'' = i[A,A']/2 and B'' = i[B,B']/2. Non-negative for separable states.
    """
    _require_anticommuting(setting)
    a2 = commutator_observable(setting.a, setting.a_prime).matrix
    b2 = commutator_observable(setting.b, setting.b_prime).matrix
    rho = state.rho
    lhs = expectation(setting.op, rho) ** 2 + expectation(setting.op_swapped, rho) ** 2
    corr = expectation(IDENTITY4 - tensor(a2, b2), rho)
    marg = expectation(tensor(a2, IDENTITY2) - tensor(IDENTITY2, b2), rho)
    return 2.0 * (corr**2 - marg**2) - lhs
