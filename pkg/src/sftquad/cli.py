"""Command line entry point: ``sftquad <subcommand>``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import bench
from .estimator import IntegrandError, median_estimate
from .integrands import make_integrand
from .lattice import RngStream
from .params import ParamError, is_prime, make_params, next_prime
from .window import band_response, build_window, window_mass

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3


def _cmd_benchmark(args) -> int:
    plan = bench.load_plan(args.plan)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "records.csv"
    records = bench.run_experiment(plan, workers=args.workers, partial_csv=csv_path)
    bench.emit_csv(records, csv_path)
    table = bench.mean_errors(records)
    fit = bench.fit_slope(records) if len(table) >= 3 and all(e > 0 for _, e in table.values()) else None
    bench.emit_json(plan, fit, out / "summary.json", {"mean_sq_error": {str(k): e for k, (_, e) in table.items()}})
    print(f"{'k':>3} {'M':>7} {'mean sq error':>14}")
    for k, (M, err) in table.items():
        print(f"{k:>3} {M:>7} {err:>14.4e}")
    if fit is not None:
        print(f"slope {fit.slope:.3f}  intercept {fit.intercept:.3f}  R^2 {fit.r2:.3f}")
    print(f"wrote {csv_path} and {out / 'summary.json'}")
    if args.check:
        ok = fit is not None
        if ok and args.max_slope is not None:
            ok = fit.slope <= args.max_slope
        if ok and args.min_r2 is not None:
            ok = fit.r2 >= args.min_r2
        print("check:", "PASS" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_CHECK
    return EXIT_OK


def _cmd_integrate(args) -> int:
    p = make_params(args.dim, args.N, args.L, args.r, args.t, args.seed)
    f = make_integrand(args.function, p.d)
    est = median_estimate(f, p, build_window(p.L, p.r, p.N), RngStream(p.seed), jitter=not args.no_jitter)
    print(f"estimate     {est.value.real:.17g} {est.value.imag:+.3e}i")
    if f.exact is not None:
        print(f"exact        {complex(f.exact).real:.17g}")
        print(f"sq error     {abs(est.value - f.exact) ** 2:.6e}")
    print(f"M = 2L+1     {p.M}")
    print(f"evaluations  {est.evaluations}")
    return EXIT_OK


def _cmd_verify_window(args) -> int:
    w = build_window(args.L, args.r, args.N)
    mass = window_mass(w)
    eps = math.exp(-0.5 * (args.L / args.r) ** 2)
    print(f"mass           {mass:.17g}")
    print(f"|1 - mass|     {abs(1 - mass):.3e}")
    print(f"eps_window     {eps:.3e}")
    print(f"implied B      {args.r / math.sqrt(0.5 * (args.L / args.r) ** 2):.3f}")
    print(f"{'freq':>20} {'|response|':>12}")
    half = args.N // 2
    if args.N <= 4096:
        freqs = range(args.N)
    else:
        # log-spaced probe frequencies up to N/2
        freqs = sorted({0} | {int(round(half ** (i / 40))) for i in range(41)})
    for fr in freqs:
        print(f"{fr:>20} {abs(band_response(w, fr)):>12.3e}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    rows = bench.oracle_suite()
    width = max(len(name) for name, _, _ in rows)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_CHECK


def _cmd_prime(args) -> int:
    if args.next is not None:
        print(next_prime(args.next))
    if args.test is not None:
        print("prime" if is_prime(args.test) else "composite")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sftquad", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("benchmark", help="run a convergence plan and write CSV/JSON")
    b.add_argument("--plan", required=True, help="plan JSON (or a summary.json to replay)")
    b.add_argument("--out", default=".", help="output directory")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--check", action="store_true", help="exit 3 when the fit misses the thresholds")
    b.add_argument("--max-slope", type=float)
    b.add_argument("--min-r2", type=float)
    b.set_defaults(func=_cmd_benchmark)

    i = sub.add_parser("integrate", help="one median filter estimate")
    i.add_argument("--function", required=True)
    i.add_argument("--dim", type=int, required=True)
    i.add_argument("--N", type=int, required=True)
    i.add_argument("--L", type=int, required=True)
    i.add_argument("--r", type=float, required=True)
    i.add_argument("--t", type=int, default=63)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--no-jitter", action="store_true")
    i.set_defaults(func=_cmd_integrate)

    v = sub.add_parser("verify-window", help="window mass and band-response diagnostics")
    v.add_argument("--L", type=int, required=True)
    v.add_argument("--r", type=float, required=True)
    v.add_argument("--N", type=int, required=True)
    v.set_defaults(func=_cmd_verify_window)

    o = sub.add_parser("oracle", help="run the brute-force oracle suite")
    o.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("prime", help="primality utilities")
    p.add_argument("--next", type=int, help="print the smallest prime >= X")
    p.add_argument("--test", type=int, help="report whether X is prime")
    p.set_defaults(func=_cmd_prime)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ParamError, ValueError, OverflowError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IntegrandError as exc:
        print(f"integrand failure: {exc}", file=sys.stderr)
        return EXIT_INVALID
