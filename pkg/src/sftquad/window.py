"""Truncated periodic Gaussian filter weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ParamError



@dataclass(frozen=True, eq=False)
class Window:
    """Weights G_l for l = -L..L, stored densely at index l + L."""

    L: int
    r: float
    N: int
    weights: np.ndarray

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.L, self.L + 1, dtype=np.int64)

    def weight(self, l: int) -> float:
        if abs(l) > self.L:
            raise IndexError(f"|l| must be <= {self.L}, got {l}")
        return float(self.weights[l + self.L])


def build_window(L: int, r: float, N: int) -> Window:
    """Build G_{L,r,l} = sum over k with |l+kN| <= L of the N(0, r^2) density at l+kN.

    With 2L < N only the k = 0 image lies inside [-L, L], so each weight is a
    single Gaussian density value.
    """
    L, N, r = int(L), int(N), float(r)
    if L < 1:
        raise ParamError(f"L must be positive, got {L}")
    if not r > 0:
        raise ParamError(f"r must be positive, got {r}")
    if 2 * L >= N:
        raise ParamError(f"need 2L < N, got 2L={2 * L}, N={N}")
    # nearest non-zero images l +- N sit at distance >= N - L > L
    assert N - L > L
    l = np.arange(-L, L + 1, dtype=np.float64)
    weights = (1.0 / (r * math.sqrt(2.0 * math.pi))) * np.exp(-(l * l) / (2.0 * r * r))
    weights.setflags(write=False)
    return Window(L=L, r=r, N=N, weights=weights)


def window_mass(w: Window) -> float:
    """Sum of all weights (correctly rounded)."""
    return math.fsum(w.weights)


def band_response(w: Window, freq: int, N: int | None = None) -> complex:
    """sum_l G_l exp(2 pi i freq l / N), accumulated with exact-rounded sums."""
    N = w.N if N is None else int(N)
    f = int(freq) % N
    if f * w.L < 2**63:
        phase = (f * w.offsets) % N
    else:
        phase = np.array([(f * int(l)) % N for l in w.offsets], dtype=np.int64)
    # symmetric residues make freq and N - freq exact conjugates
    phase = np.where(phase > N // 2, phase - N, phase)
    theta = (2.0 * np.pi / N) * phase.astype(np.float64)
    re = math.fsum(w.weights * np.cos(theta))
    im = math.fsum(w.weights * np.sin(theta))
    return complex(re, im)
