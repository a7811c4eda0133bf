"""Random draws and exact modular node generation for the hashed lattice.

Randomness comes from :class:`RngStream`, a (seed, key) pair mapped onto a
counter-based Philox generator through ``numpy.random.SeedSequence``.  A
stream key names one estimate (for example ``(k, run, repetition)``); inside
that stream values are always consumed in the same order: the shift H, the
anchor z, then the jitter block for l = -L..L, coordinate-major within each
row.  Results therefore never depend on the order in which estimates are run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_INT64_LIMIT = 2**63


@dataclass(frozen=True)
class RngStream:
    seed: int
    key: tuple[int, ...] = ()

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class LatticeDraw:
    """Shift vector H in [1, N)^d and anchor z in [0, N)^d."""

    H: np.ndarray
    z: np.ndarray
    N: int

    def __post_init__(self):
        H = np.asarray(self.H)
        z = np.asarray(self.z)
        if H.shape != z.shape or H.ndim != 1:
            raise ValueError("H and z must be 1-d vectors of equal length")
        if np.any(H < 1) or np.any(H >= self.N) or np.any(z < 0) or np.any(z >= self.N):
            raise ValueError("draw out of range: need 1 <= H_i < N and 0 <= z_i < N")

    @property
    def d(self) -> int:
        return len(self.H)


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def draw_shift(N: int, d: int, rng) -> np.ndarray:
    """d iid uniform integers in [1, N-1]."""
    # Generator.integers rejects out-of-range words, so there is no modulo bias
    return _as_generator(rng).integers(1, N, size=d, dtype=np.int64)


def draw_anchor(N: int, d: int, rng) -> np.ndarray:
    """d iid uniform integers in [0, N-1]."""
    return _as_generator(rng).integers(0, N, size=d, dtype=np.int64)


def draw_lattice(N: int, d: int, rng) -> LatticeDraw:
    rng = _as_generator(rng)
    H = draw_shift(N, d, rng)
    z = draw_anchor(N, d, rng)
    return LatticeDraw(H=H, z=z, N=N)


def node(z, H, l: int, N: int) -> np.ndarray:
    """Grid index m = (z - l H) mod N of one node, exact integer arithmetic."""
    l = int(l)
    return np.array([(int(zi) - l * int(hi)) % N for zi, hi in zip(z, H)], dtype=np.int64)


def nodes(draw: LatticeDraw, ls, N: int | None = None) -> np.ndarray:
    """Grid indices for every l in ``ls`` as an int64 array of shape (len(ls), d)."""
    N = draw.N if N is None else int(N)
    ls = np.asarray(ls, dtype=np.int64)
    H = np.asarray(draw.H, dtype=np.int64)
    z = np.asarray(draw.z, dtype=np.int64)
    lmax = int(np.abs(ls).max()) if ls.size else 0
    if lmax * (N - 1) + N < _INT64_LIMIT:
        return (z[None, :] - ls[:, None] * H[None, :]) % N
    # products overflow int64: fall back to Python integers
    zo = z.astype(object)
    Ho = H.astype(object)
    out = (zo[None, :] - ls.astype(object)[:, None] * Ho[None, :]) % N
    return out.astype(np.int64)


def jittered_points(m: np.ndarray, N: int, rng=None) -> np.ndarray:
    """Map grid indices to points (m + u)/N with u ~ unif[0,1)^shape.

    ``rng=None`` disables the jitter and returns the grid points m/N.  Each
    coordinate stays inside its cell [m/N, (m+1)/N) and inside [0, 1).
    """
    m = np.asarray(m, dtype=np.int64)
    mf = m.astype(np.float64)
    if rng is None:
        return mf / N
    u = _as_generator(rng).random(m.shape)
    s = mf + u
    upper = mf + 1.0
    # m + u rounds up to m + 1 when u is within half an ulp of 1
    s = np.where(s >= upper, np.nextafter(upper, 0.0), s)
    x = s / N
    return np.minimum(x, np.nextafter(1.0, 0.0))


def jittered_point(m, N: int, rng=None) -> np.ndarray:
    return jittered_points(np.asarray(m)[None, :], N, rng)[0]


def frac(x) -> np.ndarray:
    """Componentwise fractional part x - floor(x)."""
    x = np.asarray(x, dtype=np.float64)
    out = x - np.floor(x)
    # -tiny - floor(-tiny) rounds to 1.0
    return np.where(out >= 1.0, 0.0, out)
