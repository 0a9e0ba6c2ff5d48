"""Brute-force maximizers used to check the closed-form bounds.

Nothing in here uses the closed forms. ``spectral_max`` diagonalizes the
Bell operator; ``separable_max`` searches all pure product states with a
coarse grid followed by Nelder-Mead refinement; ``phase_only_max`` searches
only the in-plane phases with both polar parameters pinned at pi/4, so
comparing the two tests that pinning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np
from scipy.optimize import minimize

from .bell import AnglePair, BellSetting, ProductStateParams, TwoQubitState, product_state, qubit_ket
from .bounds import BoundMethod, BoundResult
from .qlin import eig_hermitian4

GAMMA_PERIOD = math.pi
PHI_PERIOD = 2.0 * math.pi
TOP_CELLS = 8
RANDOM_RESTARTS = 8

SamplerKind = Literal["product", "pure_entangled", "mixed_separable"]


@dataclass(frozen=True)
class OracleConfig:
    coarse_grid_points_per_dim: int = 32
    refinement_iterations: int = 200
    refinement_tolerance: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.coarse_grid_points_per_dim < 8:
            raise ValueError("coarse_grid_points_per_dim must be >= 8")
        if self.refinement_tolerance <= 0:
            raise ValueError("refinement_tolerance must be > 0")
        if self.refinement_iterations < 1:
            raise ValueError("refinement_iterations must be >= 1")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator so every sampled stream is reproducible from ``seed``."""
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


def spectral_max(setting: BellSetting) -> BoundResult:
    """Exact max of |<B>| over all states: the largest |eigenvalue| of B."""
    dec = eig_hermitian4(setting.op)
    k = 0 if abs(dec.eigenvalues[0]) >= abs(dec.eigenvalues[-1]) else 3
    state = TwoQubitState.from_ket(dec.eigenvectors[:, k])
    return BoundResult(min(abs(float(dec.eigenvalues[k])), 2 * math.sqrt(2)), BoundMethod.ORACLE, state)


def _bloch(gamma, phi):
    s = np.sin(2 * gamma)
    return np.stack([s * np.cos(phi), s * np.sin(phi), np.cos(2 * gamma)], axis=-1)


def _wrap(x: np.ndarray) -> np.ndarray:
    periods = np.array([GAMMA_PERIOD, PHI_PERIOD, GAMMA_PERIOD, PHI_PERIOD][: len(x)])
    return np.mod(x, periods)


class _ProductObjective:
    """|<B>| for the product state with Bloch vectors r1, r2: (a.r1)((b+b').r2) + (a'.r1)((b-b').r2)."""

    def __init__(self, setting: BellSetting):
        self.a = setting.a.vector
        self.ap = setting.a_prime.vector
        self.bsum = setting.b.vector + setting.b_prime.vector
        self.bdiff = setting.b.vector - setting.b_prime.vector
        self._coeffs = tuple(tuple(float(c) for c in v) for v in (self.a, self.ap, self.bsum, self.bdiff))

    def __call__(self, x) -> float:
        g1, p1, g2, p2 = (float(v) for v in x)
        # scalar math: this is called thousands of times per setting by the simplex
        s1, s2 = math.sin(2 * g1), math.sin(2 * g2)
        r1 = (s1 * math.cos(p1), s1 * math.sin(p1), math.cos(2 * g1))
        r2 = (s2 * math.cos(p2), s2 * math.sin(p2), math.cos(2 * g2))
        a, ap, bs, bd = self._coeffs
        dot = lambda u, v: u[0] * v[0] + u[1] * v[1] + u[2] * v[2]  # noqa: E731
        return abs(dot(a, r1) * dot(bs, r2) + dot(ap, r1) * dot(bd, r2))

    def grid(self, gammas: np.ndarray, phis: np.ndarray) -> np.ndarray:
        """|<B>| on the full (g1, p1, g2, p2) grid, flattened in that lexicographic order."""
        G, P = np.meshgrid(gammas, phis, indexing="ij")
        r = _bloch(G, P).reshape(-1, 3)
        vals = np.outer(r @ self.a, r @ self.bsum) + np.outer(r @ self.ap, r @ self.bdiff)
        return np.abs(vals).ravel()


def _top_indices(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest values; ties go to the lowest linear index."""
    k = min(k, values.size)
    threshold = np.partition(values, values.size - k)[values.size - k]
    candidates = np.flatnonzero(values >= threshold)
    order = np.lexsort((candidates, -values[candidates]))
    return candidates[order[:k]]


def _nelder_mead(fun, x0, scale, cfg: OracleConfig):
    n = len(x0)
    simplex = np.vstack([x0] + [x0 + scale * np.eye(n)[i] for i in range(n)])
    res = minimize(
        lambda x: -fun(x),
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxiter": cfg.refinement_iterations * n,
            "xatol": cfg.refinement_tolerance,
            "fatol": cfg.refinement_tolerance,
        },
    )
    return np.asarray(res.x), -float(res.fun)


def _multistart(fun, starts, scale, cfg: OracleConfig, incumbent_x, incumbent_val):
    best_x, best_val = incumbent_x, incumbent_val
    for x0 in starts:
        x, val = _nelder_mead(fun, x0, scale, cfg)
        # refinement may only ever improve the incumbent
        if val > best_val:
            best_x, best_val = x, val
    return _wrap(best_x), best_val


def separable_max(setting: BellSetting, cfg: OracleConfig | None = None) -> BoundResult:
    """Best |<B>| found over pure product states.

    This is a lower bound on the true separable maximum (mixtures cannot do
    better than their best component).
    """
    cfg = cfg or OracleConfig()
    n = cfg.coarse_grid_points_per_dim
    gammas = np.linspace(0.0, GAMMA_PERIOD, n, endpoint=False)
    phis = np.linspace(0.0, PHI_PERIOD, n, endpoint=False)
    obj = _ProductObjective(setting)
    vals = obj.grid(gammas, phis)

    starts = []
    for idx in _top_indices(vals, TOP_CELLS):
        i1, i2 = divmod(int(idx), n * n)
        g1, p1 = divmod(i1, n)
        g2, p2 = divmod(i2, n)
        starts.append(np.array([gammas[g1], phis[p1], gammas[g2], phis[p2]]))
    incumbent = starts[0]
    rng = make_rng(cfg.seed)
    for _ in range(RANDOM_RESTARTS):
        starts.append(rng.uniform(0.0, 1.0, 4) * np.array([GAMMA_PERIOD, PHI_PERIOD, GAMMA_PERIOD, PHI_PERIOD]))

    x, val = _multistart(obj, starts, PHI_PERIOD / n, cfg, incumbent, float(vals.max()))
    params = ProductStateParams(*(float(v) for v in x))
    return BoundResult(min(val, 2.0), BoundMethod.ORACLE, params)


def phase_objective(angles: AnglePair, phi1, phi2):
    """In-plane product-state Bell value with both polar parameters at pi/4."""
    ta, tb = angles.theta_a, angles.theta_b
    return np.cos(phi1) * (np.cos(phi2) + np.cos(phi2 - tb)) + np.cos(phi1 - ta) * (np.cos(phi2) - np.cos(phi2 - tb))


def phase_only_max(angles: AnglePair, grid_points: int = 1024, cfg: OracleConfig | None = None) -> float:
    cfg = cfg or OracleConfig()
    phis = np.linspace(0.0, PHI_PERIOD, grid_points, endpoint=False)
    vals = np.abs(phase_objective(angles, phis[:, None], phis[None, :])).ravel()
    starts = []
    for idx in _top_indices(vals, TOP_CELLS):
        i, j = divmod(int(idx), grid_points)
        starts.append(np.array([phis[i], phis[j]]))

    def fun(x):
        return abs(float(phase_objective(angles, x[0], x[1])))

    _, val = _multistart(fun, starts, PHI_PERIOD / grid_points, cfg, starts[0], float(vals.max()))
    return val


def haar_qubit_ket(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def haar_two_qubit_ket(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_setting(rng: np.random.Generator) -> BellSetting:
    return BellSetting.from_bloch(*(random_unit_vector(rng) for _ in range(4)))


def _product_rho(rng):
    psi = np.kron(haar_qubit_ket(rng), haar_qubit_ket(rng))
    return np.outer(psi, psi.conj())


def random_state_sampler(kind: SamplerKind, seed: int) -> Iterator[TwoQubitState]:
    """Endless, seed-deterministic stream of random states of the requested ``kind``.

    product: pairs of Haar-random qubit kets. pure_entangled: Haar-random
    two-qubit kets. mixed_separable: Dirichlet-weighted mixtures of 1 to 8
    random product states.
    """
    rng = make_rng(seed)
    if kind == "product":
        while True:
            yield TwoQubitState(_product_rho(rng))
    elif kind == "pure_entangled":
        while True:
            yield TwoQubitState.from_ket(haar_two_qubit_ket(rng))
    elif kind == "mixed_separable":
        while True:
            terms = int(rng.integers(1, 9))
            weights = rng.dirichlet(np.ones(terms))
            rho = sum(w * _product_rho(rng) for w in weights)
            yield TwoQubitState(0.5 * (rho + rho.conj().T))
    else:
        raise ValueError(f"unknown sampler kind {kind!r}")


def product_ket(p: ProductStateParams) -> np.ndarray:
    return np.kron(qubit_ket(p.gamma1, p.phi1), qubit_ket(p.gamma2, p.phi2))


def check_product_maximizer(setting: BellSetting, result: BoundResult) -> float:
    """|<B>| recomputed from the full density matrix of the reported maximizer."""
    return abs(setting.value(product_state(result.maximizer)))
