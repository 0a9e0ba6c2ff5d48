"""Command-line front end: ``bellbound {bound,sweep,verify,witness}``.

Exit codes: 0 success (``witness``: entangled), 1 verification failure,
2 malformed arguments or input file, 3 I/O error, 10 consistent with a
separable state, 11 unphysical correlations.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
import time

import numpy as np

from . import parallel
from .bell import AnglePair, canonical_setting
from .bounds import bound_general, bound_roy, bound_separable, violation_factor, violation_factor_chsh
from .oracle import OracleConfig, separable_max, spectral_max
from .verify import run_all
from .witness import AngleKnowledge, Conclusion, CorrelationData, UnphysicalInput, evaluate

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_SEPARABLE = 10
EXIT_UNPHYSICAL = 11

QUANTITIES = ("C", "D", "roy", "X", "X_chsh")
CSV_HEADER = "theta_a,theta_b,quantity,value,method"
ORACLE_TOL = {"general": 1e-9, "separable": 1e-6}


def fmt(x: float) -> str:
    return f"{x:.10f}"


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def _to_rad(value: float, deg: bool) -> float:
    return math.radians(value) if deg else value


def _print_record(out, pairs):
    for k, v in pairs:
        out.write(f"{k}={v}\n")


def cmd_bound(args, out) -> int:
    ta = _to_rad(args.theta_a, args.deg)
    tb = _to_rad(args.theta_b if args.theta_b is not None else args.theta_a, args.deg)
    angles = AnglePair(ta, tb)
    unit_echo = (lambda r: math.degrees(r)) if args.deg else (lambda r: r)
    record = [("set", args.set), ("theta_a", fmt(unit_echo(angles.theta_a))), ("theta_b", fmt(unit_echo(angles.theta_b)))]
    status = EXIT_OK
    if args.set == "roy":
        if args.theta_b is not None and not math.isclose(angles.theta_a, angles.theta_b, abs_tol=1e-15):
            sys.stderr.write("error: the roy bound is defined for equal angles only\n")
            return EXIT_USAGE
        record += [("value", fmt(bound_roy(ta))), ("method", "closed_form")]
    else:
        result = bound_general(angles) if args.set == "general" else bound_separable(angles)
        record += [("value", fmt(result.value)), ("method", result.method.value)]
        if args.verify:
            setting = canonical_setting(angles)
            check = spectral_max(setting) if args.set == "general" else separable_max(setting, OracleConfig(seed=args.seed))
            dev = abs(check.value - result.value)
            agrees = dev <= ORACLE_TOL[args.set]
            record += [
                ("oracle", fmt(check.value)),
                ("oracle_deviation", f"{dev:.3e}"),
                ("oracle_tolerance", f"{ORACLE_TOL[args.set]:g}"),
                ("oracle_agrees", "true" if agrees else "false"),
            ]
            status = EXIT_OK if agrees else EXIT_VERIFY_FAILED
    _print_record(out, record)
    return status


def sweep_rows(theta_a_range, theta_b_range, steps: int, quantity: str, diagonal: bool = False) -> list[str]:
    """CSV rows (without header) in lexicographic (theta_a, theta_b, quantity) order."""
    wanted = QUANTITIES if quantity == "all" else (quantity,)
    xs = np.linspace(*theta_a_range, steps)
    ys = np.linspace(*theta_b_range, steps)

    def row_block(i):
        x = float(xs[i])
        cols = [float(ys[i])] if diagonal else [float(y) for y in ys]
        lines = []
        for y in cols:
            ang = AnglePair(x, y)
            for q in wanted:
                if q == "C":
                    val = bound_general(ang).value
                elif q == "D":
                    val = bound_separable(ang).value
                elif q == "X":
                    val = violation_factor(ang)
                elif q == "X_chsh":
                    val = violation_factor_chsh(ang)
                else:
                    # the roy bound only exists on the equal-angle diagonal
                    if x != y:
                        continue
                    val = bound_roy(x)
                lines.append(f"{fmt(x)},{fmt(y)},{q},{fmt(val)},closed_form")
        return lines

    blocks = parallel.map_ordered(row_block, range(steps))
    return [line for block in blocks for line in block]


def cmd_sweep(args, out) -> int:
    ra = tuple(_to_rad(v, args.deg) for v in args.theta_a_range)
    rb = tuple(_to_rad(v, args.deg) for v in (args.theta_b_range or args.theta_a_range))
    if args.steps < 2:
        sys.stderr.write("error: --steps must be >= 2\n")
        return EXIT_USAGE
    if ra[0] > ra[1] or rb[0] > rb[1]:
        sys.stderr.write("error: range lower end must not exceed upper end\n")
        return EXIT_USAGE
    rows = sweep_rows(ra, rb, args.steps, args.quantity, diagonal=args.diagonal)
    buf = io.StringIO(newline="")
    buf.write(CSV_HEADER + "\n")
    for line in rows:
        buf.write(line + "\n")
    try:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        sys.stderr.write(f"error: cannot write {args.output}: {exc.strerror or exc}\n")
        return EXIT_IO
    out.write(f"wrote {len(rows)} rows to {args.output}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.samples < 1:
        sys.stderr.write("error: --samples must be >= 1\n")
        return EXIT_USAGE
    start = time.perf_counter()
    results = run_all(seed=args.seed, samples=args.samples)
    for r in results:
        out.write(r.line() + "\n")
        for f in r.failures[:20]:
            out.write(f"  failing: {f}\n")
    ok = all(r.passed for r in results)
    out.write(f"{'ALL PASS' if ok else 'FAILURES'} seed={args.seed} samples={args.samples} elapsed={time.perf_counter() - start:.1f}s\n")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


class InputError(ValueError):
    pass


CORRELATION_KEYS = {"e_ab": "e_ab", "e_abp": "e_abp", "e_apb": "e_apb", "e_apbp": "e_apbp", "sigma": "stat_uncertainty"}


def parse_correlations(text: str) -> CorrelationData:
    """Parse ``key=value`` lines (``e_ab``, ``e_abp``, ``e_apb``, ``e_apbp``, optional ``sigma``); ``#`` starts a comment."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, val = (part.strip() for part in line.partition("="))
        if key not in CORRELATION_KEYS:
            raise InputError(f"line {lineno}: unknown key {key!r}")
        if CORRELATION_KEYS[key] in values:
            raise InputError(f"line {lineno}: duplicate key {key!r}")
        try:
            num = float(val)
        except ValueError:
            raise InputError(f"line {lineno}: {key} is not a number: {val!r}") from None
        if not math.isfinite(num):
            raise InputError(f"line {lineno}: {key} is not finite")
        values[CORRELATION_KEYS[key]] = num
    missing = [k for k in ("e_ab", "e_abp", "e_apb", "e_apbp") if k not in values]
    if missing:
        raise InputError(f"missing keys: {', '.join(missing)}")
    try:
        return CorrelationData(**values)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_witness(args, out) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        sys.stderr.write(f"error: cannot read {args.input}: {exc.strerror or exc}\n")
        return EXIT_IO
    try:
        data = parse_correlations(text)
        box = AngleKnowledge(
            tuple(_to_rad(v, args.deg) for v in args.theta_a_interval),
            tuple(_to_rad(v, args.deg) for v in args.theta_b_interval),
        )
    except ValueError as exc:
        sys.stderr.write(f"error: {args.input}: {exc}\n")
        return EXIT_USAGE
    try:
        verdict = evaluate(data, box)
    except UnphysicalInput as exc:
        sys.stderr.write(f"warning: {exc}\n")
        verdict = exc.verdict
    _print_record(
        out,
        [
            ("s_value", fmt(verdict.s_value)),
            ("sigma", fmt(verdict.stat_uncertainty)),
            ("d_worst", fmt(verdict.d_worst)),
            ("c_worst", fmt(verdict.c_worst)),
            ("margin", fmt(verdict.margin)),
            ("conclusion", verdict.conclusion.value),
            ("rule", "entangled iff s - sigma > d_worst + 1e-9; unphysical iff s - sigma > c_worst + 1e-9"),
        ],
    )
    return {
        Conclusion.ENTANGLED: EXIT_OK,
        Conclusion.CONSISTENT_WITH_SEPARABLE: EXIT_SEPARABLE,
        Conclusion.UNPHYSICAL: EXIT_UNPHYSICAL,
    }[verdict.conclusion]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellbound", description="Angle-dependent CHSH bounds for two qubits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate one bound at a pair of local angles")
    p.add_argument("--theta-a", type=_finite, required=True)
    p.add_argument("--theta-b", type=_finite, default=None, help="defaults to --theta-a")
    p.add_argument("--set", choices=("general", "separable", "roy"), default="general")
    p.add_argument("--deg", action="store_true", help="angles in degrees (inputs and echoed values)")
    p.add_argument("--verify", action="store_true", help="cross-check against the brute-force oracle")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="tabulate bounds on an angle grid as CSV")
    p.add_argument("--theta-a-range", type=_finite, nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--theta-b-range", type=_finite, nargs=2, metavar=("LO", "HI"), default=None)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--quantity", choices=QUANTITIES + ("all",), default="all")
    p.add_argument("--diagonal", action="store_true", help="only the points theta_a = theta_b (paired by index)")
    p.add_argument("--deg", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("witness", help="entanglement verdict for a correlation file")
    p.add_argument("input")
    p.add_argument("--theta-a-interval", type=_finite, nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--theta-b-interval", type=_finite, nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--deg", action="store_true")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
