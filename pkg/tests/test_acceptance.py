"""Acceptance criteria, one test each.

Every test prints (and appends to the terminal summary) a single
``PASS``/``FAIL`` line with the measured deviation and runtime, then asserts.
Run ``pytest tests/test_acceptance.py -s`` to see the lines inline.
"""

import io
import math
import time

import pytest

from bellbound import cli
from bellbound.bell import AnglePair
from bellbound.bounds import bound_general, bound_separable
from bellbound.verify import (
    check_anticommuting,
    check_equal_angle,
    check_general_vs_spectral,
    check_monte_carlo,
    check_roy_dominance,
    check_separable_vs_oracle,
    check_tsirelson,
    check_violation_factor,
)

SQRT2 = math.sqrt(2)
SAMPLES = 10_000


@pytest.fixture
def report(acceptance_log):
    def _report(number, title, passed, detail, elapsed, limit=None):
        in_time = limit is None or elapsed < limit
        ok = passed and in_time
        budget = f" (limit {limit:g}s)" if limit is not None else ""
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}; {elapsed:.2f}s{budget}"
        print(line)
        acceptance_log.append(line)
        assert passed, line
        assert in_time, line

    return _report


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


def test_01_extreme_points(report):
    def run():
        devs = [
            abs(bound_general(AnglePair(math.pi / 2, math.pi / 2)).value - 2 * SQRT2) / 1e-12,
            abs(bound_separable(AnglePair(math.pi / 2, math.pi / 2)).value - SQRT2) / 1e-9,
        ]
        for t in (0.0, math.pi / 4, math.pi / 2):
            devs.append(abs(bound_general(AnglePair(0.0, t)).value - 2.0) / 1e-9)
            devs.append(abs(bound_separable(AnglePair(0.0, t)).value - 2.0) / 1e-9)
        return max(devs)

    worst, elapsed = timed(run)
    report(1, "extreme-point regression", worst <= 1.0, f"worst deviation / tolerance = {worst:.3g}", elapsed, 1.0)


def test_02_general_vs_spectral(report):
    r, elapsed = timed(check_general_vs_spectral, 33, 1e-9)
    report(2, "C vs spectral oracle, 33x33", r.passed, f"max |C - spectral| = {r.max_deviation:.3e} (tol 1e-9)", elapsed, 10.0)


@pytest.mark.slow
def test_03_separable_vs_oracle(report):
    r, elapsed = timed(check_separable_vs_oracle, 17, 1e-5)
    report(3, "D vs separable oracle, 17x17", r.passed, f"max |D - oracle| = {r.max_deviation:.3e} (tol 1e-5)", elapsed, 300.0)


def test_04_equal_angle_identities(report):
    r, elapsed = timed(check_equal_angle, 181, 1e-6)
    report(4, "equal-angle identities, 181 points", r.passed, f"max deviation = {r.max_deviation:.3e} (tol 1e-6)", elapsed)


def test_05_roy_dominance(report):
    r, elapsed = timed(check_roy_dominance, 181)
    report(5, "Roy dominance", r.passed, f"worst negative gap = {r.max_deviation:.3e}; {len(r.failures)} failures", elapsed)


def test_06_violation_factor(report):
    r, elapsed = timed(check_violation_factor, 181)
    report(6, "violation factor", r.passed, f"|X(pi/2,pi/2) - 2| = {r.max_deviation:.3e}; {len(r.failures)} failures", elapsed)


def test_07_monte_carlo_soundness(report):
    r, elapsed = timed(check_monte_carlo, 0, SAMPLES, 20)
    report(7, "Monte-Carlo soundness, 1e4 states x 20 settings", r.passed, f"max excess = {r.max_deviation:.3e}", elapsed, 30.0)


def test_08_anticommuting_inequalities(report):
    r, elapsed = timed(check_anticommuting, 0, SAMPLES)
    report(8, "anticommuting-case inequalities, 1e4 product states", r.passed, f"max violation = {r.max_deviation:.3e}", elapsed)


def test_09_tsirelson_inequality(report):
    r, elapsed = timed(check_tsirelson, 0, SAMPLES)
    report(9, "Tsirelson inequality, 1e4 pairs", r.passed, f"max excess = {r.max_deviation:.3e}", elapsed)


def _witness(path):
    out = io.StringIO()
    code = cli.main(
        ["witness", str(path), "--theta-a-interval", "90", "90", "--theta-b-interval", "90", "90", "--deg"],
        out=out,
    )
    return code, dict(line.split("=", 1) for line in out.getvalue().splitlines())


def test_10_witness_end_to_end(report, tmp_path):
    r = 1 / SQRT2
    bell = tmp_path / "bell.txt"
    bell.write_text(f"e_ab={r!r}\ne_abp={r!r}\ne_apb={r!r}\ne_apbp={-r!r}\n", encoding="utf-8")
    # A = B = sigma_y, A' = B' = sigma_x on (|00><00| + |11><11|)/2
    mixture = tmp_path / "mixture.txt"
    mixture.write_text("e_ab=0\ne_abp=0\ne_apb=0\ne_apbp=-1\n", encoding="utf-8")

    def run():
        return _witness(bell), _witness(mixture)

    ((c1, r1), (c2, r2)), elapsed = timed(run)
    margin_dev = abs(float(r1["margin"]) - (2 * SQRT2 - SQRT2))
    ok = (
        c1 == cli.EXIT_OK
        and r1["conclusion"] == "entangled"
        and margin_dev <= 1e-8
        and c2 == cli.EXIT_SEPARABLE
        and r2["conclusion"] == "consistent_with_separable"
    )
    detail = f"bell -> {r1['conclusion']} (exit {c1}, margin dev {margin_dev:.1e}); mixture -> {r2['conclusion']} (exit {c2})"
    report(10, "witness end-to-end", ok, detail, elapsed)


def test_11_determinism(report, tmp_path):
    def run():
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            cli.main(["sweep", "--theta-a-range", "0", "3.141592653589793", "--steps", "33", "-o", str(p)], out=io.StringIO())
        identical = paths[0].read_bytes() == paths[1].read_bytes()
        outcomes = []
        for seed in range(5):
            out = io.StringIO()
            code = cli.main(["verify", "--seed", str(seed), "--samples", "500"], out=out)
            outcomes.append((code, [line.split()[:2] for line in out.getvalue().splitlines()[:-1]]))
        return identical, outcomes

    (identical, outcomes), elapsed = timed(run)
    same = all(o == outcomes[0] for o in outcomes)
    detail = f"sweep byte-identical={identical}; verify outcomes identical over 5 seeds={same} (exit {outcomes[0][0]})"
    report(11, "determinism", identical and same and outcomes[0][0] == 0, detail, elapsed)
