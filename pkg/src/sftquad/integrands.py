"""Test integrands on [0,1)^d: the benchmark corpus and sparse trigonometric sums.

Every integrand evaluates a batch of points at once: ``func`` receives an
array of shape (n, d) and returns n values (real or complex).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class CompactSupportSpec:
    """Support Omega inside the half-open box [lo, hi); volume assumed to be 1."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    membership: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have the same length")
        if any(not a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty box: lo={self.lo}, hi={self.hi}")

    @property
    def d(self) -> int:
        return len(self.lo)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        inside = np.all((pts >= lo) & (pts < hi), axis=1)
        if self.membership is not None:
            inside &= np.asarray(self.membership(pts), dtype=bool)
        return inside


@dataclass(frozen=True)
class Integrand:
    name: str
    d: int
    func: Callable[[np.ndarray], np.ndarray]
    exact: complex | None = None
    support: CompactSupportSpec | None = None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            return self.func(x[None, :])[0]
        return self.func(x)


def bernoulli_b4(x):
    """Degree-4 Bernoulli polynomial x^4 - 2x^3 + x^2 - 1/30."""
    x = np.asarray(x, dtype=np.float64)
    return x * x * (x - 1.0) ** 2 - 1.0 / 30.0


def eval_f1(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    j = np.arange(1, x.shape[1] + 1, dtype=np.float64)
    return np.prod(1.0 + bernoulli_b4(x) / j**4, axis=1)


def eval_f2(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    j = np.arange(1, x.shape[1] + 1, dtype=np.float64)
    return np.prod(1.0 + (np.abs(4.0 * x - 2.0) - 1.0) / j**2, axis=1) - 1.0


def eval_f3(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return (x.sum(axis=1) >= x.shape[1] / 2.0).astype(np.float64)


def tent_transform(x):
    """Componentwise x -> 1 - |2x - 1|."""
    return 1.0 - np.abs(2.0 * np.asarray(x, dtype=np.float64) - 1.0)


def eval_f3_tent(x: np.ndarray) -> np.ndarray:
    return eval_f3(tent_transform(np.atleast_2d(x)))


def f1(d: int) -> Integrand:
    return Integrand("f1", d, eval_f1, exact=1.0)


def f2(d: int) -> Integrand:
    return Integrand("f2", d, eval_f2, exact=0.0)


def f3(d: int) -> Integrand:
    return Integrand("f3", d, eval_f3, exact=0.5)


def f3_tent(d: int) -> Integrand:
    return Integrand("f3-tent", d, eval_f3_tent, exact=0.5)


def constant(value: complex, d: int) -> Integrand:
    def func(x):
        return np.full(np.atleast_2d(x).shape[0], value)

    return Integrand(f"const:{value}", d, func, exact=value)


@dataclass(frozen=True)
class _TrigSum:
    a0: complex
    freqs: np.ndarray  # (K, d) integer
    coeffs: np.ndarray  # (K,) complex

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.full(x.shape[0], self.a0, dtype=np.complex128)
        if len(self.coeffs):
            phase = x @ self.freqs.T.astype(np.float64)
            out += np.exp(2j * np.pi * phase) @ self.coeffs
        return out


def trig_sum(freqs, coeffs, a0: complex = 0.0, name: str = "trig") -> Integrand:
    """f(x) = a0 + sum_j coeffs[j] exp(2 pi i freqs[j] . x)."""
    freqs = np.atleast_2d(np.asarray(freqs, dtype=np.int64))
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    if freqs.shape[0] != coeffs.shape[0]:
        raise ValueError("one coefficient per frequency required")
    return Integrand(name, freqs.shape[1], _TrigSum(complex(a0), freqs, coeffs), exact=complex(a0))


def synth_sparse(K: int, Mfreq: int, l1: float, d: int, rng, a0: complex = 1.0) -> Integrand:
    """Random member of the sparse class with K distinct non-zero frequencies in (-Mfreq, Mfreq)^d.

    Coefficients get random phases and magnitudes proportional to 1/j, rescaled
    so that their absolute values sum to exactly ``l1``.  No remainder term.
    """
    if K < 0 or Mfreq < 1:
        raise ValueError(f"need K >= 0 and Mfreq >= 1, got K={K}, Mfreq={Mfreq}")
    available = (2 * Mfreq - 1) ** d - 1
    if K > available:
        raise ValueError(f"K={K} exceeds the {available} available non-zero frequencies")
    name = f"sparse:K={K},M={Mfreq},l1={l1}"
    if K == 0:
        return trig_sum(np.zeros((0, d), dtype=np.int64), [], a0, name)
    picked: set[tuple[int, ...]] = set()
    while len(picked) < K:
        w = tuple(int(v) for v in rng.integers(-(Mfreq - 1), Mfreq, size=d))
        if any(w):
            picked.add(w)
    freqs = np.array(sorted(picked), dtype=np.int64)
    mags = 1.0 / np.arange(1, K + 1)
    mags *= l1 / mags.sum()
    coeffs = mags * np.exp(2j * np.pi * rng.random(K))
    return trig_sum(freqs, coeffs, a0, name)


def _parse_sparse(spec: str) -> dict:
    fields = dict(item.split("=", 1) for item in spec.split(",") if item)
    try:
        out = {"K": int(fields.pop("K")), "Mfreq": int(fields.pop("M")), "l1": float(fields.pop("l1"))}
    except KeyError as exc:
        raise ValueError(f"sparse integrand needs K, M and l1: {spec!r}") from exc
    if "seed" in fields:
        out["seed"] = int(fields.pop("seed"))
    if "a0" in fields:
        out["a0"] = complex(fields.pop("a0"))
    if fields:
        raise ValueError(f"unknown sparse fields {sorted(fields)}")
    return out


CORPUS = {"f1": f1, "f2": f2, "f3": f3, "f3-tent": f3_tent}


def make_integrand(name: str, d: int) -> Integrand:
    """Look up an integrand by name: f1, f2, f3, f3-tent or sparse:K=..,M=..,l1=..[,seed=..]."""
    if name in CORPUS:
        return CORPUS[name](d)
    if name.startswith("sparse:"):
        kw = _parse_sparse(name[len("sparse:"):])
        rng = np.random.default_rng(kw.pop("seed", 0))
        f = synth_sparse(d=d, rng=rng, **kw)
        return Integrand(name, d, f.func, f.exact)
    raise ValueError(f"unknown integrand {name!r}")
