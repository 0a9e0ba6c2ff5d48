import itertools
import math

import numpy as np
import pytest

from bellbound.bell import AnglePair, TwoQubitState, canonical_setting, partial_traces
from bellbound.bounds import BoundMethod, bound_general, bound_separable
from bellbound.oracle import (
    OracleConfig,
    _multistart,
    _ProductObjective,
    _top_indices,
    check_product_maximizer,
    haar_two_qubit_ket,
    make_rng,
    phase_objective,
    phase_only_max,
    random_setting,
    random_state_sampler,
    separable_max,
    spectral_max,
)

SQRT2 = math.sqrt(2)
ORTHO = AnglePair(math.pi / 2, math.pi / 2)


@pytest.mark.parametrize(
    "kwargs", [{"coarse_grid_points_per_dim": 4}, {"refinement_tolerance": 0.0}, {"refinement_iterations": 0}]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        OracleConfig(**kwargs)


def test_spectral_max_examples():
    r = spectral_max(canonical_setting(ORTHO))
    assert r.value == pytest.approx(2 * SQRT2, abs=1e-12)
    assert r.method is BoundMethod.ORACLE
    assert spectral_max(canonical_setting(AnglePair(0, 0))).value == pytest.approx(2.0, abs=1e-12)


def test_spectral_maximizer_attains_value():
    rng = make_rng(31)
    for _ in range(20):
        s = random_setting(rng)
        r = spectral_max(s)
        assert abs(s.value(r.maximizer)) == pytest.approx(r.value, abs=1e-10)


def test_separable_max_parallel_settings():
    s = canonical_setting(AnglePair(0, 0))
    r = separable_max(s)
    assert r.value == pytest.approx(2.0, abs=1e-8)
    assert abs(math.cos(r.maximizer.phi1)) == pytest.approx(1.0, abs=1e-4)
    assert check_product_maximizer(s, r) == pytest.approx(r.value, abs=1e-10)


def test_separable_max_orthogonal_settings():
    s = canonical_setting(ORTHO)
    r = separable_max(s)
    assert r.value == pytest.approx(SQRT2, abs=1e-6)
    assert check_product_maximizer(s, r) == pytest.approx(r.value, abs=1e-10)


def test_phase_only_max_examples():
    assert phase_only_max(AnglePair(0, 0)) == pytest.approx(2.0, abs=1e-9)
    assert phase_only_max(ORTHO) == pytest.approx(SQRT2, abs=1e-6)
    assert phase_only_max(AnglePair(math.pi / 3, math.pi / 3)) == pytest.approx(1.82288, abs=1e-5)
    assert phase_only_max(AnglePair(math.pi / 3, math.pi / 3)) == pytest.approx(0.5 + math.sqrt(1.75), abs=1e-6)


def test_phase_objective_is_product_state_value():
    # polar parameter pi/4 puts both Bloch vectors on the equator, where the objective is exact
    ang = AnglePair(0.7, 2.1)
    obj = _ProductObjective(canonical_setting(ang))
    for p1, p2 in [(0.1, 0.2), (1.4, -0.3), (3.0, 5.5)]:
        assert obj([math.pi / 4, p1, math.pi / 4, p2]) == pytest.approx(abs(phase_objective(ang, p1, p2)), abs=1e-12)


def test_product_objective_grid_matches_scalar():
    obj = _ProductObjective(random_setting(make_rng(32)))
    g = np.linspace(0, math.pi, 5, endpoint=False)
    p = np.linspace(0, 2 * math.pi, 6, endpoint=False)
    vals = obj.grid(g, p)
    for k, (g1, p1, g2, p2) in enumerate(itertools.product(g, p, g, p)):
        assert vals[k] == pytest.approx(obj([g1, p1, g2, p2]), abs=1e-12)


def test_top_indices_ties_go_to_lowest_index():
    v = np.array([1.0, 3.0, 3.0, 2.0, 3.0, 0.0])
    np.testing.assert_array_equal(_top_indices(v, 2), [1, 2])
    np.testing.assert_array_equal(_top_indices(v, 4), [1, 2, 4, 3])
    np.testing.assert_array_equal(_top_indices(v, 10), [1, 2, 4, 3, 0, 5])


def test_refinement_never_lowers_incumbent():
    obj = _ProductObjective(canonical_setting(AnglePair(1.2, 0.5)))
    cfg = OracleConfig(refinement_iterations=1)
    # a fake incumbent that no local search from these starts can beat
    x, val = _multistart(obj, [np.array([0.3, 0.3, 0.3, 0.3])], 0.1, cfg, np.zeros(4), 5.0)
    assert val == 5.0
    np.testing.assert_array_equal(x, np.zeros(4))
    start = np.array([0.3, 0.3, 0.3, 0.3])
    _, val = _multistart(obj, [start], 0.1, OracleConfig(), start, obj(start))
    assert val >= obj(start)


def test_separable_max_is_deterministic():
    s = canonical_setting(AnglePair(1.1, 0.6))
    a, b = separable_max(s, OracleConfig(seed=5)), separable_max(s, OracleConfig(seed=5))
    assert a.value == b.value and a.maximizer == b.maximizer


def test_spectral_dominates_separable():
    rng = make_rng(33)
    for _ in range(15):
        s = random_setting(rng)
        assert spectral_max(s).value >= separable_max(s).value - 1e-8


def test_separable_max_party_swap_invariance():
    for ta, tb in [(0.4, 1.9), (2.5, 1.0)]:
        a = separable_max(canonical_setting(AnglePair(ta, tb))).value
        b = separable_max(canonical_setting(AnglePair(tb, ta))).value
        assert a == pytest.approx(b, abs=1e-6)


def test_random_settings_oracles_agree_with_closed_forms():
    rng = make_rng(34)
    for _ in range(10):
        s = random_setting(rng)
        assert spectral_max(s).value == pytest.approx(bound_general(s.angles).value, abs=1e-9)
        assert separable_max(s).value == pytest.approx(bound_separable(s.angles).value, abs=1e-6)


def test_sampler_streams_are_seed_deterministic():
    for kind in ("product", "pure_entangled", "mixed_separable"):
        a = [s.rho for s in itertools.islice(random_state_sampler(kind, 7), 5)]
        b = [s.rho for s in itertools.islice(random_state_sampler(kind, 7), 5)]
        c = [s.rho for s in itertools.islice(random_state_sampler(kind, 8), 5)]
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)
        assert not np.allclose(a[0], c[0])


def test_sampler_unknown_kind():
    with pytest.raises(ValueError):
        next(random_state_sampler("thermal", 0))


def test_product_stream_has_pure_marginals():
    for state in itertools.islice(random_state_sampler("product", 35), 500):
        for r in partial_traces(state):
            ev = np.linalg.eigvalsh(r)
            assert ev[0] == pytest.approx(0.0, abs=1e-10)
            assert ev[1] == pytest.approx(1.0, abs=1e-10)


def test_mixed_separable_stream_respects_separable_bound():
    rng = make_rng(36)
    states = random_state_sampler("mixed_separable", 37)
    for _ in range(2000):
        s = random_setting(rng)
        assert abs(s.value(next(states))) <= bound_separable(s.angles).value + 1e-8


def test_pure_stream_respects_general_bound():
    rng = make_rng(38)
    states = random_state_sampler("pure_entangled", 39)
    for _ in range(2000):
        s = random_setting(rng)
        assert abs(s.value(next(states))) <= bound_general(s.angles).value + 1e-9


def test_haar_kets_are_normalized():
    rng = make_rng(40)
    for _ in range(100):
        assert np.linalg.norm(haar_two_qubit_ket(rng)) == pytest.approx(1.0, abs=1e-14)


def test_bell_value_is_linear_in_state():
    rng = make_rng(41)
    pure = random_state_sampler("pure_entangled", 42)
    for _ in range(200):
        s = random_setting(rng)
        r1, r2 = next(pure), next(pure)
        lam = float(rng.uniform())
        mix = TwoQubitState.mixture([r1, r2], [lam, 1 - lam])
        assert s.value(mix) == pytest.approx(lam * s.value(r1) + (1 - lam) * s.value(r2), abs=1e-12)
        assert abs(s.value(mix)) <= max(abs(s.value(r1)), abs(s.value(r2))) + 1e-12
