"""Convergence experiments: run a plan, persist records, fit log-log slopes."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .estimator import median_estimate, monte_carlo_estimate, plain_lattice_estimate
from .integrands import make_integrand
from .lattice import RngStream
from .params import ExperimentPlan, next_prime
from .window import build_window

log = logging.getLogger(__name__)

CSV_FIELDS = (
    "function", "d", "N", "k", "L", "r", "M", "t", "run",
    "estimate_re", "estimate_im", "sq_error", "seed", "wall_ms",
)


@dataclass(frozen=True)
class EstimateRecord:
    function: str
    d: int
    N: int
    k: int
    L: int
    r: float
    M: int
    t: int
    run: int
    estimate_re: float
    estimate_im: float
    sq_error: float
    seed: int
    wall_ms: float = 0.0


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    ks: tuple[int, ...]


def _run_one(plan: ExperimentPlan, k: int, run: int) -> EstimateRecord:
    f = make_integrand(plan.function, plan.d)
    if f.exact is None:
        raise ValueError(f"{plan.function} has no stored exact integral")
    stream = RngStream(plan.seed, (k, run))
    start = time.perf_counter()
    if plan.method == "filter":
        p = plan.params_for(k)
        value = median_estimate(f, p, build_window(p.L, p.r, p.N), stream).value
        L, r, t, N = p.L, p.r, p.t, p.N
    elif plan.method == "mc":
        M = 2**k + 1
        value = monte_carlo_estimate(f, M, plan.d, stream)
        L, r, t, N = (M - 1) // 2, 0.0, 1, plan.N
    else:
        M = next_prime(2**k + 1)
        value = plain_lattice_estimate(f, M, plan.d, stream)
        L, r, t, N = (M - 1) // 2, 0.0, 1, M
    wall = (time.perf_counter() - start) * 1e3
    err = abs(value - complex(f.exact)) ** 2
    return EstimateRecord(
        plan.function, plan.d, N, k, L, r, 2 * L + 1, t, run,
        value.real, value.imag, err, plan.seed, wall,
    )


def _run_item(args):
    return _run_one(*args)


def run_experiment(plan: ExperimentPlan, workers: int = 1, partial_csv=None) -> list[EstimateRecord]:
    """All (k, run) records of a plan, sorted by (k, run).

    Every record draws from its own stream keyed by (k, run), so the output
    does not depend on ``workers``.  If an estimate fails and ``partial_csv``
    is given, the records finished so far are written there before the
    error propagates.
    """
    items = [(plan, k, run) for k in plan.ks for run in range(plan.runs)]
    records: list[EstimateRecord] = []
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                records.extend(pool.map(_run_item, items, chunksize=1))
        else:
            for item in items:
                records.append(_run_item(item))
    except Exception:
        if partial_csv is not None:
            emit_csv(sorted(records, key=lambda r: (r.k, r.run)), partial_csv)
            log.error("estimate failed; %d partial records written to %s", len(records), partial_csv)
        raise
    records.sort(key=lambda r: (r.k, r.run))
    for k, (M, err) in mean_errors(records).items():
        log.info("%s k=%d M=%d mean sq error %.3e", plan.function, k, M, err)
    return records


def mean_errors(records) -> dict[int, tuple[int, float]]:
    """k -> (M, mean squared error over runs)."""
    groups: dict[int, list] = {}
    for rec in records:
        groups.setdefault(rec.k, []).append(rec)
    out = {}
    for k, recs in sorted(groups.items()):
        Ms = {r.M for r in recs}
        if len(Ms) != 1:
            raise ValueError(f"inconsistent M at k={k}: {sorted(Ms)}")
        out[k] = (Ms.pop(), math.fsum(r.sq_error for r in recs) / len(recs))
    return out


def fit_slope(records) -> SlopeFit:
    """Least-squares line through (log2 M, log2 mean squared error)."""
    table = mean_errors(records)
    if len(table) < 3:
        raise ValueError(f"slope fit needs at least 3 distinct k, got {len(table)}")
    if any(e <= 0 for _, e in table.values()):
        raise ValueError("mean squared error of zero cannot be fitted on a log scale")
    x = np.log2([M for M, _ in table.values()])
    y = np.log2([e for _, e in table.values()])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), r2, tuple(table))


def emit_csv(records, path) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_FIELDS)
            for rec in records:
                writer.writerow([repr(v) if isinstance(v, float) else v for v in astuple_ordered(rec)])
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc}") from exc
    return path


def astuple_ordered(rec: EstimateRecord) -> tuple:
    data = asdict(rec)
    return tuple(data[f] for f in CSV_FIELDS)


_INT_FIELDS = {"d", "N", "k", "L", "M", "t", "run", "seed"}


def read_csv(path) -> list[EstimateRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            kw = {k: (int(v) if k in _INT_FIELDS else v if k == "function" else float(v)) for k, v in row.items()}
            out.append(EstimateRecord(**kw))
    return out


def emit_json(plan: ExperimentPlan, fit: SlopeFit | None, path, extra: dict | None = None) -> Path:
    from . import __version__

    payload = {
        "version": __version__,
        "plan": plan.to_dict(),
        "fit": None if fit is None else asdict(fit),
    }
    if extra:
        payload.update(extra)
    path = Path(path)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write summary to {path}: {exc}") from exc
    return path


def load_plan(path) -> ExperimentPlan:
    """Read a plan file: either bare plan fields or a summary with a "plan" entry."""
    data = json.loads(Path(path).read_text())
    if "plan" in data and isinstance(data["plan"], dict):
        data = data["plan"]
    return ExperimentPlan.from_dict(data)


def oracle_suite() -> list[tuple[str, bool, str]]:
    """Compare production routines with the brute-force oracles on small instances."""
    from . import oracle
    from .estimator import estimate_once
    from .integrands import constant, trig_sum
    from .lattice import LatticeDraw
    from .params import is_prime, make_params
    from .window import band_response, window_mass

    rows = []

    def check(name, ok, detail):
        rows.append((name, bool(ok), detail))

    bad = [n for n in range(10**5) if is_prime(n) != oracle.is_prime_trial(n)]
    check("is_prime vs trial division (n < 1e5)", not bad, f"{len(bad)} mismatches")

    w = build_window(20, 5.0, 101)
    gap = max(abs(w.weight(l) / oracle.gaussian_weight(l, 20, 5.0, 101) - 1) for l in range(-20, 21))
    check("window weights vs explicit image sum", gap < 1e-14, f"max rel diff {gap:.1e}")

    resp = max(abs(band_response(w, f) - oracle.band_response_direct(f, 20, 5.0, 101)) for f in range(101))
    check("band response vs direct sum", resp < 1e-14, f"max diff {resp:.1e}")

    oob = oracle.out_of_band_max(20, 5.0, 101, 25)
    check("out-of-band rejection (N=101, L=20, r=5)", oob * 1e3 <= window_mass(w), f"max {oob:.2e}")

    inst = oracle.SmallInstance(11, 1, 3, 2.0)
    p = make_params(1, 11, 3, 2.0, 1, 0)
    w11 = build_window(3, 2.0, 11)
    worst = 0.0
    for freq in (0, 1, 2):
        f = constant(1.0, 1) if freq == 0 else trig_sum([[freq]], [1.0])
        mean, var = oracle.exhaustive_estimator_stats(f, inst)
        vals = [
            estimate_once(f, p, w11, None, draw=LatticeDraw(np.array([h]), np.array([z]), 11), jitter=False).value
            for h in range(1, 11) for z in range(11)
        ]
        vals = np.asarray(vals)
        worst = max(worst, abs(vals.mean() - mean), abs(np.mean(np.abs(vals - vals.mean()) ** 2) - var))
    check("estimator moments vs enumeration (N=11)", worst <= 1e-12, f"max diff {worst:.1e}")

    orth = oracle.orthogonality_max(7, 2, 2, 1.2)
    check("orthogonality, conjugated form (N=7, d=2)", orth <= 1e-9, f"max rel {orth:.1e}")

    disp = max(
        oracle.dispersion_table(wv, 101, B) * B
        for B in (5, 10, 20)
        for wv in [(1,), (2,), (50,), (1, 0), (3, 7), (100, 100)]
    )
    check("hash dispersion <= 2.5/B (sampled w)", disp <= 2.5, f"max P*B {disp:.3f}")

    med = all(
        oracle.median_failure_probability(k, a) <= oracle.median_failure_bound(k, a)
        for k in range(3, 16, 2)
        for a in (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35)
    )
    check("median amplification bound", med, "k=3..15, alpha=0.05..0.35")

    lhs, rhs = oracle.character_sum_identity(3, 2.0, 11)
    check("periodic Gaussian character sum", abs(lhs - rhs) < 1e-12, f"|diff| {abs(lhs - rhs):.1e}")

    mass = window_mass(build_window(2**10, 0.228 * 2**9, 5600748293801))
    hp = oracle.window_mass_hp(2**10, 0.228 * 2**9)
    check("window mass vs 40-digit sum", abs(mass - hp) < 1e-14, f"mass {mass:.16f}")
    return rows
