"""Command-line entry point: ``squaretile {tile,verify,bench,oracle,stats}``.

Exit codes: 0 success, 1 bad usage or unreadable input, 2 the tiling failed
validation or a bound check, 3 the construction itself failed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from . import pinned
from .asymptotics import peres_mc, samples_to_csv, summary_to_json
from .exactmath import PreconditionError, as_fraction
from .network import (NetworkError, effective_resistance, lower_bound_check, spanning_tree_count,
                      tiling_to_network)
from .oracle import optimal_table, table_to_csv
from .tiler import (ConstructionError, Tiling, TilingFormatError, epsilon_tile, greedy_tile,
                    kenyon_tile, tiling_from_json, tiling_to_json, tiling_to_svg, validate_tiling,
                    write_atomic)
from .tiler.ell import ReductionStalled

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_CONSTRUCTION = 0, 1, 2, 3
SEED_ENV = "SQUARETILE_SEED"
ALGORITHMS = ("greedy", "kenyon", "kenyon-baseline", "epsilon")
BENCH_HEADER = ("p", "q", "greedy", "kenyon", "excess")


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    input: dict
    algorithm: str
    square_count: int
    complete: bool
    valid: bool
    bounds: dict = field(default_factory=dict)
    resistance_check: Optional[dict] = None  # present iff the tiling is complete
    timings: dict = field(default_factory=dict)
    trace: Optional[dict] = None
    violation: Optional[str] = None

    def to_json(self) -> str:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(d, indent=1, sort_keys=True)


def _frac(v) -> str:
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def _coprime_sides(t: Tiling) -> tuple[int, int]:
    """(p, q) with p <= q coprime and p/q equal to the tiling's short/long ratio."""
    r = Fraction(min(t.width, t.height)) / Fraction(max(t.width, t.height))
    return r.numerator, r.denominator


def bounds_for(p: int, q: int, count: int, C: Fraction = pinned.KENYON_C) -> dict:
    """Bound columns for a p x q tiling; pass/fail parts are exact integer tests."""
    lb = lower_bound_check(p, q, count)
    log2p = math.log2(p)
    return {
        "q_over_p": _frac(Fraction(q, p)),
        "log2_q": math.log2(q),
        "ceil_log2_q": (q - 1).bit_length(),
        "upper": float(Fraction(q, p)) + float(C) * log2p,
        "C": _frac(C),
        "lower_bound_passed": lb.passed,
        "within_upper": float(count - Fraction(q, p)) <= float(C) * log2p + 1e-12,
    }


def resistance_report(t: Tiling) -> dict:
    """Network checks for a complete tiling: r, kappa, kappa_ab and r = kappa_ab/kappa."""
    g = tiling_to_network(t)
    r = effective_resistance(g)
    kappa = spanning_tree_count(g)
    kappa_ab = spanning_tree_count(g, glue_poles=True)
    expected = Fraction(t.height) / Fraction(t.width)
    ok = r == expected and kappa > 0 and Fraction(kappa_ab, kappa) == r
    return {"r": _frac(r), "expected": _frac(expected), "kappa": str(kappa),
            "kappa_ab": str(kappa_ab), "passed": ok}


def _produce(args) -> tuple[Tiling, str, dict, Optional[object]]:
    if args.x is not None or args.epsilon is not None:
        if args.x is None or args.epsilon is None or args.p is not None or args.q is not None:
            raise UsageError("--x and --epsilon go together and exclude --p/--q")
        algo = args.algorithm or "epsilon"
        if algo != "epsilon":
            raise UsageError("--x/--epsilon only work with --algorithm epsilon")
        x, eps = as_fraction(args.x), as_fraction(args.epsilon)
        return epsilon_tile(x, eps), algo, {"x": _frac(x), "epsilon": _frac(eps)}, None
    if args.p is None or args.q is None:
        raise UsageError("give --p and --q, or --x and --epsilon")
    p, q = args.p, args.q
    if p < 1 or q < 1:
        raise UsageError("--p and --q must be positive")
    algo = args.algorithm or "kenyon"
    info = {"p": p, "q": q}
    lo, hi = min(p, q), max(p, q)
    if algo == "greedy":
        return greedy_tile(hi, lo), algo, info, None
    if algo in ("kenyon", "kenyon-baseline"):
        t, trace = kenyon_tile(lo, hi, "refined" if algo == "kenyon" else "baseline")
        return t, algo, info, trace
    raise UsageError("--algorithm epsilon needs --x and --epsilon")


def _trace_summary(trace) -> dict:
    return {
        "events": len(trace.events),
        "stages": trace.stages(),
        "counters": [list(c) for c in trace.counters()],
        "arrivals": [list(c) for c in trace.arrivals()],
        "actions": dict(sorted(trace.action_counts().items())),
    }


def check_tiling(t: Tiling, algorithm: str, info: dict, timings: dict) -> tuple[RunReport, int]:
    v = validate_tiling(t)
    report = RunReport(info, algorithm, t.count, t.complete, v.valid, timings=timings)
    if not v.valid:
        report.violation = str(v.first)
        return report, EXIT_INVALID
    code = EXIT_OK
    if t.complete:
        p, q = _coprime_sides(t)
        report.bounds = bounds_for(p, q, t.count)
        start = time.perf_counter()
        report.resistance_check = resistance_report(t)
        timings["network_s"] = time.perf_counter() - start
        if not report.resistance_check["passed"] or not report.bounds["lower_bound_passed"]:
            code = EXIT_INVALID
    else:
        report.bounds = {"residual_area": _frac(t.residual.area)} if t.residual else {}
    return report, code


def cmd_tile(args) -> int:
    start = time.perf_counter()
    try:
        t, algo, info, trace = _produce(args)
    except (ConstructionError, ReductionStalled, RecursionError) as exc:
        print(json.dumps({"error": "construction failed", "detail": str(exc)}), file=sys.stderr)
        return EXIT_CONSTRUCTION
    timings = {"tile_s": time.perf_counter() - start}
    if args.out:
        write_atomic(args.out, tiling_to_json(t))
    if args.svg:
        write_atomic(args.svg, tiling_to_svg(t, args.scale))
    report, code = check_tiling(t, algo, info, timings)
    if args.trace and trace is not None:
        report.trace = _trace_summary(trace)
    print(report.to_json())
    return code


def cmd_verify(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            t = tiling_from_json(fh.read())
    except (OSError, TilingFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, code = check_tiling(t, "file", {"file": args.file}, {})
    except NetworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(report.to_json())
    if code == EXIT_INVALID and report.violation:
        print(f"invalid tiling: {report.violation}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def coprime_pairs(min_q: int, max_q: int, every: int = 1):
    """Coprime (p, q) with 1 <= p < q, min_q <= q <= max_q, keeping every ``every``-th."""
    i = 0
    for q in range(max(min_q, 2), max_q + 1):
        for p in range(1, q):
            if gcd(p, q) == 1:
                if i % every == 0:
                    yield p, q
                i += 1


def bench_row(pair: tuple[int, int]) -> tuple:
    p, q = pair
    g = greedy_tile(q, p).count
    t, _ = kenyon_tile(p, q)
    excess = Fraction(t.count) - Fraction(q, p)
    ratio = float(excess) / math.log2(p) if p > 1 else None
    return p, q, g, t.count, ratio


def run_bench(pairs, jobs: int = 1) -> list[tuple]:
    pairs = list(pairs)
    if jobs > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(bench_row, pairs, chunksize=64))
    return [bench_row(pr) for pr in pairs]


def fit_constant(rows) -> Optional[Fraction]:
    """Smallest C (to 4 decimals, rounded up) with count <= q/p + C log2 p on every row."""
    vals = [r[4] for r in rows if r[4] is not None]
    if not vals:
        return None
    return Fraction(math.ceil(max(vals) * 10_000), 10_000)


def bench_csv(rows) -> str:
    lines = [",".join(BENCH_HEADER)]
    for p, q, g, k, ratio in rows:
        lines.append(f"{p},{q},{g},{k},{'' if ratio is None else f'{ratio:.6f}'}")
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    pairs = coprime_pairs(args.min_q, args.max_q, args.every)
    rows = run_bench(pairs, args.jobs)
    text = bench_csv(rows)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if args.fit:
        C = fit_constant(rows)
        doc = {"C": None if C is None else _frac(C), "C_float": None if C is None else float(C),
               "pairs": len(rows), "min_q": args.min_q, "max_q": args.max_q, "every": args.every}
        if args.pin:
            write_atomic(args.pin, json.dumps(doc, indent=1, sort_keys=True) + "\n")
        print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    text = table_to_csv(optimal_table(args.max_q, args.budget))
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV} must be an integer") from exc


def cmd_stats(args) -> int:
    try:
        eps = [as_fraction(_decimal_to_fraction(e)) for e in args.epsilons.split(",") if e.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --epsilons: {exc}") from exc
    try:
        result = peres_mc(args.samples, eps, _seed(args.seed))
    except PreconditionError as exc:
        raise UsageError(str(exc)) from exc
    summary = summary_to_json(result)
    if args.csv:
        write_atomic(args.csv, samples_to_csv(result.samples))
    if args.out:
        write_atomic(args.out, summary)
    sys.stdout.write(summary)
    return EXIT_OK


def _decimal_to_fraction(s: str) -> Fraction:
    """Exact value of strings like ``1e-6``, ``0.001`` or ``1/1000``."""
    s = s.strip()
    return Fraction(s) if "/" in s else Fraction(s.replace("E", "e"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="squaretile", description="Square tilings of rectangles.")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tile", help="tile a rectangle and report checks")
    t.add_argument("--p", type=int)
    t.add_argument("--q", type=int)
    t.add_argument("--x", help="rectangle ratio for the epsilon tiler, e.g. 987/610")
    t.add_argument("--epsilon", help="corner size for the epsilon tiler, e.g. 1/100")
    t.add_argument("--algorithm", choices=ALGORITHMS)
    t.add_argument("--out", help="write the tiling JSON here")
    t.add_argument("--svg", help="write an SVG drawing here")
    t.add_argument("--scale", type=int, default=32, help="SVG pixels per unit")
    t.add_argument("--trace", action="store_true", help="include the construction trace summary")
    t.set_defaults(func=cmd_tile)

    v = sub.add_parser("verify", help="check a tiling JSON file")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="greedy vs logarithmic counts over coprime pairs")
    b.add_argument("--min-q", type=int, default=2)
    b.add_argument("--max-q", type=int, default=100)
    b.add_argument("--every", type=int, default=1, help="keep every n-th pair")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", help="CSV path (default: stdout)")
    b.add_argument("--fit", action="store_true", help="fit C in count <= q/p + C log2 p")
    b.add_argument("--pin", help="with --fit, write the fitted constant as JSON here")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="exact minimal square counts for small rectangles")
    o.add_argument("--max-q", type=int, default=13)
    o.add_argument("--budget", type=int, default=5_000_000)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("stats", help="Monte Carlo statistics of the corner-avoiding cost")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--epsilons", default="1e-3,1e-6,1e-9")
    s.add_argument("--seed", type=int, help=f"RNG seed (default: ${SEED_ENV} or 0)")
    s.add_argument("--out", help="summary JSON path")
    s.add_argument("--csv", help="per-sample CSV path")
    s.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags; this tool reserves 2
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "every", 1) < 1 or getattr(args, "jobs", 1) < 1:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, PreconditionError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
