"""Invariant groups run by the ``verify`` subcommand."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import parallel
from .bell import AnglePair, BellSetting, Observable, canonical_setting, phi_plus
from .bounds import (
    bound_general,
    bound_general_equal,
    bound_roy,
    bound_separable,
    bound_separable_equal,
    quadratic_separability_gap,
    separability_rhs_anticommuting,
    tsirelson_rhs,
    violation_factor,
    violation_factor_chsh,
)
from .oracle import OracleConfig, make_rng, random_setting, random_state_sampler, random_unit_vector, separable_max, spectral_max
from .witness import AngleKnowledge, Conclusion, CorrelationData, evaluate


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    failures: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} max_deviation={self.max_deviation:.3e}"


def _grid(lo: float, hi: float, n: int, endpoint: bool = True) -> np.ndarray:
    return np.linspace(lo, hi, n, endpoint=endpoint)


def _stack(states) -> np.ndarray:
    return np.stack([s.rho for s in states])


def _values(ops: np.ndarray, rhos: np.ndarray) -> np.ndarray:
    """<B_s>_rho_n for every setting s and state n."""
    return np.real(np.einsum("sij,nji->sn", ops, rhos))


def setting_with_angles(rng: np.random.Generator, theta_a: float, theta_b: float) -> BellSetting:
    """Random local frames with the prescribed angle between each party's two Bloch vectors."""

    def pair(theta):
        u = random_unit_vector(rng)
        v = random_unit_vector(rng)
        v = v - np.dot(u, v) * u
        v /= np.linalg.norm(v)
        return Observable.from_bloch(u), Observable.from_bloch(math.cos(theta) * u + math.sin(theta) * v)

    a, ap = pair(theta_a)
    b, bp = pair(theta_b)
    return BellSetting.from_observables(a, ap, b, bp)


def check_general_vs_spectral(n: int = 33, tol: float = 1e-9) -> CheckResult:
    grid = _grid(0.0, 2 * math.pi, n, endpoint=False)

    def row(ta):
        out = []
        for tb in grid:
            ang = AnglePair(ta, tb)
            out.append((ta, tb, abs(bound_general(ang).value - spectral_max(canonical_setting(ang)).value)))
        return out

    devs = list(itertools.chain.from_iterable(parallel.map_ordered(row, grid)))
    fails = [f"theta_a={a:.6f} theta_b={b:.6f} dev={d:.3e}" for a, b, d in devs if d > tol]
    return CheckResult("general_vs_spectral", not fails, max(d for *_, d in devs), fails)


def check_separable_vs_oracle(n: int = 17, tol: float = 1e-5, cfg: OracleConfig | None = None) -> CheckResult:
    grid = _grid(0.0, math.pi, n)

    def row(ta):
        out = []
        for tb in grid:
            ang = AnglePair(ta, tb)
            out.append((ta, tb, abs(bound_separable(ang).value - separable_max(canonical_setting(ang), cfg).value)))
        return out

    devs = list(itertools.chain.from_iterable(parallel.map_ordered(row, grid)))
    fails = [f"theta_a={a:.6f} theta_b={b:.6f} dev={d:.3e}" for a, b, d in devs if d > tol]
    return CheckResult("separable_vs_oracle", not fails, max(d for *_, d in devs), fails)


def check_equal_angle(n: int = 181, tol: float = 1e-6) -> CheckResult:
    worst, fails = 0.0, []
    for t in _grid(0.0, math.pi, n):
        ang = AnglePair(t, t)
        d = max(
            abs(bound_general_equal(t).value - bound_general(ang).value),
            abs(bound_separable_equal(t).value - bound_separable(ang).value),
        )
        worst = max(worst, d)
        if d > tol:
            fails.append(f"theta={t:.6f} dev={d:.3e}")
    return CheckResult("equal_angle_identities", not fails, worst, fails)


def check_roy_dominance(n: int = 181) -> CheckResult:
    worst, fails = 0.0, []
    for t in _grid(0.0, math.pi, n):
        gap = bound_roy(t) - bound_separable_equal(t).value
        worst = max(worst, -gap)
        if gap < -1e-12:
            fails.append(f"theta={t:.6f} gap={gap:.3e}")
    if not bound_roy(math.pi / 3) - bound_separable_equal(math.pi / 3).value > 1e-3:
        fails.append("no strict gap at pi/3")
    for t in (0.0, math.pi / 2):
        if abs(bound_roy(t) - bound_separable_equal(t).value) > 1e-9:
            fails.append(f"no equality at theta={t:.6f}")
    return CheckResult("roy_dominance", not fails, max(worst, 0.0), fails)


def check_violation_factor(n: int = 181) -> CheckResult:
    fails = []
    dev = abs(violation_factor(AnglePair(math.pi / 2, math.pi / 2)) - 2.0)
    if dev > 1e-9:
        fails.append(f"X(pi/2, pi/2) off by {dev:.3e}")
    for t in _grid(0.0, math.pi, n):
        ang = AnglePair(t, t)
        diff = violation_factor(ang) - violation_factor_chsh(ang)
        at_end = math.isclose(t, 0.0) or math.isclose(t, math.pi)
        if diff < -1e-12 or (not at_end and diff <= 1e-12) or (at_end and abs(diff) > 1e-9):
            fails.append(f"theta={t:.6f} X-X_chsh={diff:.3e}")
    return CheckResult("violation_factor", not fails, dev, fails)


def check_monte_carlo(seed: int, samples: int, n_settings: int = 20) -> CheckResult:
    rng = make_rng(seed)
    settings = [random_setting(rng) for _ in range(n_settings)]
    ops = np.stack([s.op for s in settings])
    d = np.array([bound_separable(s.angles).value for s in settings])
    c = np.array([bound_general(s.angles).value for s in settings])

    sep = _stack(itertools.islice(random_state_sampler("mixed_separable", seed), samples))
    pure = _stack(itertools.islice(random_state_sampler("pure_entangled", seed + 1), samples))
    excess_sep = np.abs(_values(ops, sep)) - d[:, None]
    excess_pure = np.abs(_values(ops, pure)) - c[:, None]

    fails = []
    for label, excess, tol in (("separable", excess_sep, 1e-8), ("pure", excess_pure, 1e-9)):
        bad = np.argwhere(excess > tol)
        fails += [f"{label} setting={i} state={j} excess={excess[i, j]:.3e}" for i, j in bad[:10]]
    worst = float(max(excess_sep.max(), excess_pure.max()))
    return CheckResult("monte_carlo_soundness", not fails, max(worst, 0.0), fails)


def check_tsirelson(seed: int, samples: int) -> CheckResult:
    rng = make_rng(seed + 2)
    states = random_state_sampler("pure_entangled", seed + 3)
    worst, fails = -math.inf, []
    for k in range(samples):
        setting = random_setting(rng)
        state = next(states)
        excess = abs(setting.value(state)) - tsirelson_rhs(setting, state)
        worst = max(worst, excess)
        if excess > 1e-9:
            fails.append(f"sample={k} excess={excess:.3e}")
    return CheckResult("tsirelson_inequality", not fails, max(worst, 0.0), fails)


def check_anticommuting(seed: int, samples: int) -> CheckResult:
    setting = canonical_setting(AnglePair(math.pi / 2, math.pi / 2))
    worst, fails = -math.inf, []
    for k, state in enumerate(itertools.islice(random_state_sampler("product", seed + 4), samples)):
        excess = abs(setting.value(state)) - separability_rhs_anticommuting(setting, state)
        gap = quadratic_separability_gap(setting, state)
        worst = max(worst, excess, -gap)
        if excess > 1e-9 or gap < -1e-9:
            fails.append(f"sample={k} linear_excess={excess:.3e} quadratic_gap={gap:.3e}")
    bell_gap = quadratic_separability_gap(setting, phi_plus(0.0))
    if not bell_gap < 0:
        fails.append(f"Bell state quadratic gap {bell_gap:.3e} is not negative")
    return CheckResult("anticommuting_separability", not fails, max(worst, 0.0), fails)


def check_witness_soundness(seed: int, samples: int, eps: float = 0.1) -> CheckResult:
    rng = make_rng(seed + 5)
    k = AngleKnowledge.around(math.pi / 2, math.pi / 2, eps)
    states = random_state_sampler("mixed_separable", seed + 6)
    fails = []
    worst = -math.inf
    for i in range(samples):
        ta = rng.uniform(*k.theta_a_interval)
        tb = rng.uniform(*k.theta_b_interval)
        setting = setting_with_angles(rng, ta, tb)
        e = setting.correlations(next(states))
        v = evaluate(CorrelationData(*(float(np.clip(x, -1, 1)) for x in e)), k)
        worst = max(worst, v.margin)
        if v.conclusion is Conclusion.ENTANGLED:
            fails.append(f"sample={i} theta_a={ta:.6f} theta_b={tb:.6f} margin={v.margin:.3e}")
    return CheckResult("witness_soundness", not fails, max(worst, 0.0), fails)


def run_all(seed: int = 0, samples: int = 10_000) -> list[CheckResult]:
    """Run every group. Fewer than 1000 samples selects a reduced oracle grid for quick runs."""
    quick = samples < 1000
    return [
        check_general_vs_spectral(9 if quick else 33),
        check_separable_vs_oracle(3 if quick else 17),
        check_equal_angle(),
        check_roy_dominance(),
        check_violation_factor(),
        check_monte_carlo(seed, samples),
        check_tsirelson(seed, samples),
        check_anticommuting(seed, samples),
        check_witness_soundness(seed, samples),
    ]
