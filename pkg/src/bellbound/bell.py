"""Spin observables, Bell operators and two-qubit states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qlin import (
    IDENTITY2,
    CMat2,
    CMat4,
    anticommutator,
    bloch_matrix,
    commutator,
    expectation,
    hermiticity_defect,
    tensor,
)

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Map ``theta`` onto [0, 2*pi)."""
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod of values a hair below 2*pi can round up to 2*pi after the shift
    return 0.0 if t >= TWO_PI else t


def signed_angle(theta: float) -> float:
    """Representative of ``theta`` in (-pi, pi]."""
    t = normalize_angle(theta)
    return t - TWO_PI if t > math.pi else t


@dataclass(frozen=True)
class Observable:
    """Spin observable ``bloch . sigma`` with a unit Bloch vector."""

    bloch: tuple[float, float, float]
    matrix: CMat2 = field(repr=False, compare=False)

    @classmethod
    def from_bloch(cls, vec) -> Observable:
        v = np.asarray(vec, dtype=float)
        norm = float(np.linalg.norm(v))
        if v.shape != (3,) or abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector must be a unit 3-vector, got {vec!r} (norm {norm})")
        return cls(bloch=tuple(float(x) for x in v), matrix=bloch_matrix(v))

    @classmethod
    def in_plane(cls, angle: float) -> Observable:
        """Observable along (cos angle, sin angle, 0)."""
        return cls.from_bloch((math.cos(angle), math.sin(angle), 0.0))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.bloch)


@dataclass(frozen=True)
class AnglePair:
    """The local angles between A and A' (``theta_a``) and between B and B' (``theta_b``)."""

    theta_a: float
    theta_b: float

    def __post_init__(self):
        object.__setattr__(self, "theta_a", normalize_angle(self.theta_a))
        object.__setattr__(self, "theta_b", normalize_angle(self.theta_b))

    def swapped(self) -> AnglePair:
        return AnglePair(self.theta_b, self.theta_a)


@dataclass(frozen=True)
class ProductStateParams:
    gamma1: float
    phi1: float
    gamma2: float
    phi2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.gamma1, self.phi1, self.gamma2, self.phi2])


def bell_operator(a: Observable, a_prime: Observable, b: Observable, b_prime: Observable) -> CMat4:
    """``A (x) (B + B') + A' (x) (B - B')``."""
    return tensor(a.matrix, b.matrix + b_prime.matrix) + tensor(a_prime.matrix, b.matrix - b_prime.matrix)


@dataclass(frozen=True)
class BellSetting:
    a: Observable
    a_prime: Observable
    b: Observable
    b_prime: Observable
    op: CMat4 = field(repr=False, compare=False)
    op_swapped: CMat4 = field(repr=False, compare=False)

    @classmethod
    def from_observables(cls, a, a_prime, b, b_prime) -> BellSetting:
        op = bell_operator(a, a_prime, b, b_prime)
        op.flags.writeable = False
        swapped = bell_operator(a_prime, a, b_prime, b)
        swapped.flags.writeable = False
        return cls(a, a_prime, b, b_prime, op, swapped)

    @classmethod
    def from_bloch(cls, a, a_prime, b, b_prime) -> BellSetting:
        return cls.from_observables(*(Observable.from_bloch(v) for v in (a, a_prime, b, b_prime)))

    @property
    def angles(self) -> AnglePair:
        """Local angles recovered from the Bloch vectors, each in [0, pi]."""
        ca = float(np.clip(np.dot(self.a.vector, self.a_prime.vector), -1.0, 1.0))
        cb = float(np.clip(np.dot(self.b.vector, self.b_prime.vector), -1.0, 1.0))
        return AnglePair(math.acos(ca), math.acos(cb))

    def value(self, state: TwoQubitState) -> float:
        """``<B>_rho``."""
        return expectation(self.op, state.rho)

    def correlations(self, state: TwoQubitState) -> tuple[float, float, float, float]:
        """E(A,B), E(A,B'), E(A',B), E(A',B') in ``state``."""
        pairs = ((self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime))
        return tuple(expectation(tensor(x.matrix, y.matrix), state.rho) for x, y in pairs)

    def anticommutator_norms(self) -> tuple[float, float]:
        na = float(np.linalg.norm(anticommutator(self.a.matrix, self.a_prime.matrix), 2))
        nb = float(np.linalg.norm(anticommutator(self.b.matrix, self.b_prime.matrix), 2))
        return na, nb


def canonical_setting(angles: AnglePair) -> BellSetting:
    """In-plane quadruple a = b = x, a' at ``theta_a`` and b' at ``theta_b`` from the x axis."""
    return BellSetting.from_observables(
        Observable.in_plane(0.0),
        Observable.in_plane(angles.theta_a),
        Observable.in_plane(0.0),
        Observable.in_plane(angles.theta_b),
    )


@dataclass(frozen=True)
class CommutatorObservable:
    """``i[X, Y]/2`` both as a matrix and as the Bloch vector ``-(x cross y)``."""

    vector: np.ndarray
    matrix: CMat2


def commutator_observable(x: Observable, y: Observable) -> CommutatorObservable:
    mat = 0.5j * commutator(x.matrix, y.matrix)
    mat.flags.writeable = False
    vec = -np.cross(x.vector, y.vector)
    vec.flags.writeable = False
    return CommutatorObservable(vector=vec, matrix=mat)


STATE_TOL = 1e-10


@dataclass(frozen=True)
class TwoQubitState:
    """Density matrix on C^2 (x) C^2; validated on construction."""

    rho: CMat4 = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {rho.shape}")
        if hermiticity_defect(rho) > STATE_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > STATE_TOL:
            raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
        if np.linalg.eigvalsh(rho).min() < -STATE_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, ket) -> TwoQubitState:
        psi = np.asarray(ket, dtype=complex).reshape(4)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def mixture(cls, states, weights) -> TwoQubitState:
        w = np.asarray(weights, dtype=float)
        return cls(sum(wi * s.rho for wi, s in zip(w / w.sum(), states)))

    @classmethod
    def maximally_mixed(cls) -> TwoQubitState:
        return cls(np.eye(4) / 4)


def qubit_ket(gamma: float, phi: float) -> np.ndarray:
    """cos(gamma) e^{-i phi/2} |up> + sin(gamma) e^{i phi/2} |down>."""
    return np.array([math.cos(gamma) * np.exp(-0.5j * phi), math.sin(gamma) * np.exp(0.5j * phi)])


def product_state(p: ProductStateParams) -> TwoQubitState:
    return TwoQubitState.from_ket(np.kron(qubit_ket(p.gamma1, p.phi1), qubit_ket(p.gamma2, p.phi2)))


UP_UP, UP_DOWN, DOWN_UP, DOWN_DOWN = (np.eye(4, dtype=complex)[k] for k in range(4))


def phi_plus(tau: float = 0.0) -> TwoQubitState:
    """(|up up> + e^{i tau} |down down>)/sqrt(2)."""
    return TwoQubitState.from_ket(UP_UP + np.exp(1j * tau) * DOWN_DOWN)


def psi_plus(tau: float = 0.0) -> TwoQubitState:
    """(|up down> + e^{i tau} |down up>)/sqrt(2)."""
    return TwoQubitState.from_ket(UP_DOWN + np.exp(1j * tau) * DOWN_UP)


def optimal_entangled_state(angles: AnglePair, tau: float) -> TwoQubitState:
    """Member of the maximally entangled family that saturates the general bound.

    ``phi_plus(tau)`` when sin(theta_a) sin(theta_b) >= 0, else ``psi_plus(tau)``.
    """
    if math.sin(angles.theta_a) * math.sin(angles.theta_b) >= 0.0:
        return phi_plus(tau)
    return psi_plus(tau)


def optimal_phase(angles: AnglePair) -> float:
    """The tau maximizing the canonical Bell value over the family picked by ``optimal_entangled_state``.

    For either family the value is Re(B[i, j] e^{i tau}) with (i, j) the coupled basis pair,
    so the optimum is -arg B[i, j].
    """
    op = canonical_setting(angles).op
    if math.sin(angles.theta_a) * math.sin(angles.theta_b) >= 0.0:
        return float(-np.angle(op[0, 3]))
    return float(-np.angle(op[1, 2]))


def partial_traces(state: TwoQubitState) -> tuple[CMat2, CMat2]:
    """Reduced states (rho_1, rho_2) of the first and second qubit."""
    r = state.rho.reshape(2, 2, 2, 2)
    rho1 = np.einsum("ijkj->ik", r)
    rho2 = np.einsum("ijil->jl", r)
    return rho1, rho2


def local_expectation(op: CMat2, state: TwoQubitState, party: int) -> complex:
    """``Tr[op rho_party]``; complex so that anti-Hermitian commutators keep their phase."""
    rho1, rho2 = partial_traces(state)
    return complex(np.trace(op @ (rho1 if party == 0 else rho2)))


def local_operator(op: CMat2, party: int) -> CMat4:
    return tensor(op, IDENTITY2) if party == 0 else tensor(IDENTITY2, op)
