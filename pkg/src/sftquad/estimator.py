"""Filter estimator on hashed lattice nodes, median amplification and baselines."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .integrands import CompactSupportSpec, Integrand
from .lattice import (
    LatticeDraw,
    RngStream,
    _as_generator,
    draw_lattice,
    jittered_points,
    nodes,
)
from .params import Params, is_prime
from .window import Window

# rows per integrand call; bounds memory at d = 500
_CHUNK_ELEMENTS = 1 << 21


class IntegrandError(RuntimeError):
    """The integrand returned a non-finite value."""


@dataclass(frozen=True)
class Estimate:
    value: complex
    evaluations: int
    aborted: bool = False
    key: tuple[int, ...] = ()


def _key(rng) -> tuple[int, ...]:
    return rng.key if isinstance(rng, RngStream) else ()


def _csum(values) -> complex:
    values = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _checked(f: Integrand, x: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(x), dtype=np.complex128)
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmin(np.isfinite(vals)))
        raise IntegrandError(f"{f.name} returned {vals[bad]} at x={x[bad]}")
    return vals


def _node_values(f: Integrand, draw: LatticeDraw, ls: np.ndarray, gen, jitter: bool) -> np.ndarray:
    d = draw.d
    rows = max(1, _CHUNK_ELEMENTS // d)
    out = np.empty(len(ls), dtype=np.complex128)
    for start in range(0, len(ls), rows):
        sl = slice(start, start + rows)
        m = nodes(draw, ls[sl])
        x = jittered_points(m, draw.N, gen if jitter else None)
        out[sl] = _checked(f, x)
    return out


def estimate_once(
    f: Integrand,
    p: Params,
    w: Window,
    rng,
    *,
    draw: LatticeDraw | None = None,
    jitter: bool = True,
) -> Estimate:
    """One filter estimate sum_l f(node_l + jitter) G_l over |l| <= L.

    ``rng`` is an :class:`RngStream` or a numpy Generator.  Passing ``draw``
    fixes (H, z); with ``jitter=False`` the nodes are evaluated on the grid.
    """
    if (w.L, w.N) != (p.L, p.N) or w.r != p.r:
        raise ValueError("window does not match params")
    gen = _as_generator(rng)
    if draw is None:
        draw = draw_lattice(p.N, p.d, gen)
    vals = _node_values(f, draw, w.offsets, gen, jitter)
    return Estimate(_csum(vals * w.weights), len(vals), False, _key(rng))


def complex_median(values) -> complex:
    """Median of the real parts plus i times the median of the imaginary parts."""
    values = np.asarray(values, dtype=np.complex128).reshape(-1)
    if len(values) % 2 == 0:
        raise ValueError(f"median needs an odd number of values, got {len(values)}")
    return complex(np.median(values.real), np.median(values.imag))


def _repetition_streams(rng, t: int):
    if isinstance(rng, RngStream):
        return [rng.child(j) for j in range(t)]
    gen = _as_generator(rng)
    return [gen] * t


def median_estimate(f: Integrand, p: Params, w: Window, rng, *, jitter: bool = True) -> Estimate:
    """Median of t independent filter estimates.

    With an :class:`RngStream` repetition j uses ``rng.child(j)``; with a
    Generator the repetitions consume it in sequence.
    """
    reps = [estimate_once(f, p, w, s, jitter=jitter) for s in _repetition_streams(rng, p.t)]
    value = complex_median([e.value for e in reps])
    return Estimate(value, sum(e.evaluations for e in reps), False, _key(rng))


def _shift_ranges(support: CompactSupportSpec, max_shifts: int) -> list[range]:
    ranges = []
    for lo, hi in zip(support.lo, support.hi):
        # x in [0,1): k + x in [lo, hi) needs lo - 1 < k < hi
        rng = range(math.floor(lo) - 1, math.ceil(hi) + 1)
        if len(rng) > max_shifts:
            raise ValueError(f"box [{lo}, {hi}) admits {len(rng)} shifts per axis, cap is {max_shifts}")
        ranges.append(rng)
    return ranges


def support_members(support: CompactSupportSpec, x: np.ndarray, max_shifts: int = 4096):
    """For points x in [0,1)^d, yield (shift k, mask of points with k + x in Omega)."""
    x = np.atleast_2d(x)
    for k in itertools.product(*_shift_ranges(support, max_shifts)):
        kv = np.asarray(k, dtype=np.float64)
        mask = support.contains(x + kv)
        if mask.any():
            yield kv, mask


def candidate_counts(support: CompactSupportSpec, x: np.ndarray, max_shifts: int = 4096) -> np.ndarray:
    """#{k in Z^d : k + x_i in Omega} for every row x_i, without touching f."""
    x = np.atleast_2d(x)
    counts = np.zeros(x.shape[0], dtype=np.int64)
    for _, mask in support_members(support, x, max_shifts):
        counts += mask
    return counts


def periodize(f: Integrand, max_shifts: int = 4096) -> Integrand:
    """F(x) = sum over integer k of f(k + x) restricted to the support of f."""
    support = f.support
    if support is None:
        raise ValueError(f"{f.name} has no compact-support description")
    _shift_ranges(support, max_shifts)

    def F(x):
        x = np.atleast_2d(x)
        out = np.zeros(x.shape[0], dtype=np.complex128)
        for kv, mask in support_members(support, x, max_shifts):
            out[mask] += _checked(f, x[mask] + kv)
        return out

    return Integrand(f"periodized:{f.name}", f.d, F, exact=f.exact)


def guard_threshold(L: int) -> int:
    return 200 * L + 100


def guarded_estimate(
    f: Integrand,
    p: Params,
    w: Window,
    rng,
    *,
    threshold: int | None = None,
    jitter: bool = True,
    max_shifts: int = 4096,
) -> Estimate:
    """Filter estimate of the periodization of a compactly supported f.

    The sets V_l of support points reached from each node are counted first,
    using only the support description.  If their total exceeds
    ``threshold`` (200L + 100 unless overridden) the estimate is 0 and f is
    never called.
    """
    support = f.support
    if support is None:
        raise ValueError(f"{f.name} has no compact-support description")
    threshold = guard_threshold(p.L) if threshold is None else int(threshold)
    gen = _as_generator(rng)
    draw = draw_lattice(p.N, p.d, gen)
    m = nodes(draw, w.offsets)
    x = jittered_points(m, p.N, gen if jitter else None)
    counts = candidate_counts(support, x, max_shifts)
    total = int(counts.sum())
    if total > threshold:
        return Estimate(0j, 0, True, _key(rng))
    vals = np.zeros(len(x), dtype=np.complex128)
    for kv, mask in support_members(support, x, max_shifts):
        vals[mask] += _checked(f, x[mask] + kv)
    return Estimate(_csum(vals * w.weights), total, False, _key(rng))


def plain_lattice_estimate(
    f: Integrand,
    M: int,
    d: int,
    rng,
    *,
    draw: LatticeDraw | None = None,
    jitter: bool = True,
) -> complex:
    """Randomly shifted rank-1 lattice rule (1/M) sum_{l<M} f((z - l H)/M + jitter)."""
    if not is_prime(M):
        raise ValueError(f"M={M} must be prime")
    gen = _as_generator(rng)
    if draw is None:
        draw = draw_lattice(M, d, gen)
    vals = _node_values(f, draw, np.arange(M, dtype=np.int64), gen, jitter)
    return _csum(vals) / M


def monte_carlo_estimate(f: Integrand, M: int, d: int, rng) -> complex:
    """Plain Monte Carlo mean of f over M iid uniform points."""
    if M < 1:
        raise ValueError(f"M must be positive, got {M}")
    gen = _as_generator(rng)
    x = gen.random((M, d))
    return _csum(_checked(f, x)) / M
