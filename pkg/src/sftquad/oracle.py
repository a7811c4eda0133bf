"""Brute-force reference computations on small instances.

Nothing here imports the production window or node code: weights, nodes and
phases are recomputed from scratch with plain Python integers and ``math``
so that the test-suite can compare the two routes.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import mpmath
import numpy as np

CASE_CAP = 10**7


class OracleTooLarge(ValueError):
    pass


def _cap(cases: int, what: str) -> None:
    if cases > CASE_CAP:
        raise OracleTooLarge(f"{what}: {cases} cases exceed the cap of {CASE_CAP}")


@dataclass(frozen=True)
class SmallInstance:
    N: int
    d: int
    L: int
    r: float

    def __post_init__(self):
        if self.N > 101 or self.d > 3:
            raise OracleTooLarge(f"small instances need N <= 101 and d <= 3, got N={self.N}, d={self.d}")
        if any(self.N % p == 0 for p in range(2, int(self.N**0.5) + 1)) or self.N < 2:
            raise ValueError(f"N={self.N} is not prime")
        if 2 * self.L >= self.N:
            raise ValueError(f"need 2L < N, got L={self.L}, N={self.N}")
        _cap((self.N - 1) ** self.d * self.N**self.d, "SmallInstance")


def gaussian_weight(l: int, L: int, r: float, N: int) -> float:
    """Truncated periodic Gaussian weight, images enumerated explicitly."""
    total = []
    kmax = L // N + 2
    for k in range(-kmax, kmax + 1):
        v = l + k * N
        if abs(v) <= L:
            total.append(math.exp(-v * v / (2.0 * r * r)) / (r * math.sqrt(2.0 * math.pi)))
    return math.fsum(total)


def periodic_gaussian_weight(l: int, r: float, N: int, tail: float = 1e-17) -> float:
    """Untruncated periodic Gaussian sum over all images l + kN."""
    # images beyond |v| > r*sqrt(2 ln(1/tail)) + N contribute less than tail in total
    reach = r * math.sqrt(2.0 * math.log(1.0 / tail)) + N
    kmax = int(reach // N) + 2
    terms = [
        math.exp(-((l + k * N) ** 2) / (2.0 * r * r)) / (r * math.sqrt(2.0 * math.pi))
        for k in range(-kmax, kmax + 1)
    ]
    return math.fsum(terms)


def window_mass_hp(L: int, r: float, digits: int = 40) -> float:
    """Sum of the Gaussian density over -L..L in high precision (k = 0 images)."""
    with mpmath.workdps(digits):
        r_ = mpmath.mpf(r)
        c = 1 / (r_ * mpmath.sqrt(2 * mpmath.pi))
        s = c * (1 + 2 * mpmath.fsum(mpmath.exp(-mpmath.mpf(l) ** 2 / (2 * r_**2)) for l in range(1, L + 1)))
        return float(s)


def window_truncation_gap(L: int, r: float, N: int) -> float:
    """max over |l| <= L of |truncated weight - untruncated periodic weight|."""
    if 2 * L >= N:
        raise ValueError(f"need 2L < N, got L={L}, N={N}")
    return max(abs(gaussian_weight(l, L, r, N) - periodic_gaussian_weight(l, r, N)) for l in range(-L, L + 1))


def character_sum_identity(w: int, r: float, N: int) -> tuple[complex, float]:
    """Both sides of sum_{l in Z_N} G_{r,l} e^{2 pi i w l/N} = sum_k exp(-2 (pi r (k + w/N))^2)."""
    lhs = sum(periodic_gaussian_weight(l, r, N) * cmath.exp(2j * math.pi * w * l / N) for l in range(N))
    kmax = int(N / (math.pi * r) * 7) + 2 if r > 0 else 2
    rhs = math.fsum(math.exp(-2.0 * (math.pi * r * (k + w / N)) ** 2) for k in range(-kmax - 1, kmax + 1))
    return lhs, rhs


def _circ(v: int, N: int) -> int:
    v %= N
    return min(v, N - v)


def band_response_direct(freq: int, L: int, r: float, N: int) -> complex:
    terms = [gaussian_weight(l, L, r, N) * cmath.exp(2j * math.pi * ((freq * l) % N) / N) for l in range(-L, L + 1)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def out_of_band_max(L: int, r: float, N: int, distance: float) -> float:
    """max |band response| over all freq in Z_N at circular distance > distance from 0."""
    return max(
        (abs(band_response_direct(f, L, r, N)) for f in range(N) if _circ(f, N) > distance),
        default=0.0,
    )


def dispersion_table(w, N: int, B: float) -> float:
    """Exact P_H(H.w mod N lies in [-N/B, N/B]) over H uniform in [1, N)^d."""
    w = [int(v) % N for v in np.atleast_1d(w)]
    if not any(w):
        raise ValueError("w must be non-zero mod N")
    d = len(w)
    _cap((N - 1) ** d, "dispersion_table")
    # residues of h*w_i for h in 1..N-1, one row per coordinate
    axis = [np.array([(h * wi) % N for h in range(1, N)], dtype=np.int64) for wi in w]
    acc = np.zeros(1, dtype=np.int64)
    for a in axis:
        acc = (acc[:, None] + a[None, :]).reshape(-1) % N
    dist = np.minimum(acc, N - acc)
    return int(np.count_nonzero(dist <= N / B)) / (N - 1) ** d


def dft_coefficient(f, w, N: int, d: int) -> complex:
    """(1/N^d) sum over m in Z_N^d of f(m/N) exp(-2 pi i w.m/N), by enumeration."""
    _cap(N**d, "dft_coefficient")
    w = [int(v) for v in np.atleast_1d(w)]
    grid = list(itertools.product(range(N), repeat=d))
    vals = np.asarray(f(np.array(grid, dtype=np.float64) / N), dtype=np.complex128)
    terms = [v * cmath.exp(-2j * math.pi * (sum(a * b for a, b in zip(w, m)) % N) / N) for v, m in zip(vals, grid)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)) / N**d


def _grid_values(f, N: int, d: int) -> dict:
    grid = list(itertools.product(range(N), repeat=d))
    vals = np.asarray(f(np.array(grid, dtype=np.float64) / N), dtype=np.complex128)
    return dict(zip(grid, (complex(v) for v in vals)))


def enumerate_estimates(f, inst: SmallInstance) -> list[tuple[tuple, tuple, complex]]:
    """Un-jittered filter estimate for every (H, z) in [1,N)^d x [0,N)^d."""
    N, d, L = inst.N, inst.d, inst.L
    _cap((N - 1) ** d * N**d * (2 * L + 1), "enumerate_estimates")
    table = _grid_values(f, N, d)
    G = {l: gaussian_weight(l, L, inst.r, N) for l in range(-L, L + 1)}
    out = []
    for H in itertools.product(range(1, N), repeat=d):
        for z in itertools.product(range(N), repeat=d):
            terms = [G[l] * table[tuple((zi - l * hi) % N for zi, hi in zip(z, H))] for l in range(-L, L + 1)]
            out.append((H, z, complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))))
    return out


def exhaustive_estimator_stats(f, inst: SmallInstance) -> tuple[complex, float]:
    """Exact mean and variance E|X - mean|^2 of the un-jittered estimate over all draws."""
    values = [v for _, _, v in enumerate_estimates(f, inst)]
    n = len(values)
    mean = complex(math.fsum(v.real for v in values) / n, math.fsum(v.imag for v in values) / n)
    var = math.fsum(abs(v - mean) ** 2 for v in values) / n
    return mean, var


def orthogonality_max(N: int, d: int, L: int, r: float, conjugate: bool = True) -> float:
    """Largest |sum_z A_xi(z) A_eta(z)^(*)| / (N^d (sum G)^2) over all H and distinct xi, eta.

    A_xi(z) = sum_l exp(2 pi i xi.(z - l H)/N) G_l.  With ``conjugate=False``
    the second factor is not conjugated.
    """
    _cap((N - 1) ** d * N ** (3 * d), "orthogonality_max")
    G = [gaussian_weight(l, L, r, N) for l in range(-L, L + 1)]
    mass = math.fsum(G)
    pts = list(itertools.product(range(N), repeat=d))
    P = np.array(pts, dtype=np.int64)
    worst = 0.0
    for H in itertools.product(range(1, N), repeat=d):
        A = np.zeros((len(pts), len(pts)), dtype=np.complex128)  # rows xi, cols z
        for i, l in enumerate(range(-L, L + 1)):
            shifted = (P - l * np.array(H, dtype=np.int64)) % N  # (z - lH) mod N, rows z
            phase = (P @ shifted.T) % N  # xi . (z - lH)
            A += G[i] * np.exp(2j * np.pi * phase / N)
        gram = A @ (A.conj().T if conjugate else A.T)
        np.fill_diagonal(gram, 0.0)
        worst = max(worst, float(np.abs(gram).max()))
    return worst / (N**d * mass * mass)


def median_failure_probability(k: int, alpha: float) -> float:
    """P(Binomial(k, alpha) >= (k + 1)/2): a majority of k independent trials fail."""
    if k % 2 == 0:
        raise ValueError("k must be odd")
    return math.fsum(math.comb(k, j) * alpha**j * (1 - alpha) ** (k - j) for j in range((k + 1) // 2, k + 1))


def median_failure_bound(k: int, alpha: float) -> float:
    return 2.0**k * alpha ** (k / 2.0)


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True
