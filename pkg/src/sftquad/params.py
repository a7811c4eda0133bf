"""Run parameters for the hashed-lattice filter estimator and primality helpers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

MAX_MODULUS = (1 << 63) - 1

# First 13 primes: strong-pseudoprime test with these witnesses is exact
# below 3.3e24, which covers every 63/64-bit input.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class ParamError(ValueError):
    """Raised when a parameter set violates a validity invariant."""


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2**64."""
    n = int(n)
    if n < 0 or n >= 1 << 64:
        raise ValueError(f"is_prime expects 0 <= n < 2**64, got {n}")
    if n < 2:
        return False
    for p in _WITNESSES:
        if n == p:
            return True
        if n % p == 0:
            return False
    return all(_strong_probable_prime(n, a) for a in _WITNESSES)


def next_prime(n: int) -> int:
    """Smallest prime >= n that fits in 63 bits."""
    n = max(int(n), 2)
    if n > MAX_MODULUS:
        raise OverflowError(f"no 63-bit prime >= {n}")
    if n == 2:
        return 2
    candidate = n if n % 2 else n + 1
    while candidate <= MAX_MODULUS:
        if is_prime(candidate):
            return candidate
        candidate += 2
    raise OverflowError(f"no 63-bit prime >= {n}")


@dataclass(frozen=True)
class Params:
    d: int
    N: int
    L: int
    r: float
    t: int
    seed: int

    @property
    def M(self) -> int:
        """Sample size per estimate, 2L+1 (repetitions not counted)."""
        return 2 * self.L + 1

    @property
    def eps_window(self) -> float:
        """Gaussian tail level at the truncation edge, exp(-(L/r)^2/2)."""
        return math.exp(-0.5 * (self.L / self.r) ** 2)

    @property
    def implied_band(self) -> float:
        """Diagnostic only: B = r / sqrt(log(1/eps_window))."""
        return self.r / math.sqrt(0.5 * (self.L / self.r) ** 2)

    def to_dict(self) -> dict:
        return asdict(self)


def make_params(d: int, N: int, L: int, r: float, t: int = 1, seed: int = 0) -> Params:
    """Validate raw values and build a :class:`Params`.

    Requires N prime (at most 2**63-1), ``1 < r < L < N/2``, t odd, d >= 1.
    """
    for name, value in (("d", d), ("N", N), ("L", L), ("t", t), ("seed", seed)):
        if isinstance(value, bool) or int(value) != value:
            raise ParamError(f"{name} must be an integer, got {value!r}")
    d, N, L, t, seed = int(d), int(N), int(L), int(t), int(seed)
    r = float(r)
    if d < 1:
        raise ParamError(f"d must be >= 1, got {d}")
    if N < 3 or N > MAX_MODULUS:
        raise ParamError(f"N must lie in [3, 2**63-1], got {N}")
    if not is_prime(N):
        raise ParamError(f"N={N} is not prime")
    if L < 1:
        raise ParamError(f"L must be positive, got {L}")
    if not math.isfinite(r) or r <= 1:
        raise ParamError(f"r must exceed 1, got {r}")
    if r >= L:
        raise ParamError(f"need r < L, got r={r}, L={L}")
    if 2 * L >= N:
        raise ParamError(f"need 2L < N, got 2L={2 * L}, N={N}")
    if t < 1 or t % 2 == 0:
        raise ParamError(f"t must be an odd positive integer, got {t}")
    if not 0 <= seed < 1 << 64:
        raise ParamError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return Params(d=d, N=N, L=L, r=r, t=t, seed=seed)


METHODS = ("filter", "lattice", "mc")


@dataclass(frozen=True)
class ExperimentPlan:
    """One convergence sweep: L = 2**k, r = c * 2**(k - r_offset) for k_min..k_max.

    ``r_offset=1`` pairs each half-width with the scale one octave below it,
    so the truncated tail stays negligible; ``r_offset=0`` uses the
    same exponent for both.  ``method`` selects the estimator: the median
    filter estimator, the plain random lattice rule, or crude Monte Carlo.
    The baselines ignore c, t and r_offset; mc takes M = 2**k + 1 points and
    the lattice rule M = next_prime(2**k + 1) points.
    """

    function: str
    d: int
    N: int
    k_min: int
    k_max: int
    c: float
    t: int = 63
    runs: int = 30
    seed: int = 0
    r_offset: int = 1
    method: str = "filter"

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise ParamError(f"empty k range [{self.k_min}, {self.k_max}]")
        if self.runs < 1:
            raise ParamError(f"runs must be positive, got {self.runs}")
        if self.method not in METHODS:
            raise ParamError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method == "filter":
            for k in self.ks:
                self.params_for(k)

    @property
    def ks(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def params_for(self, k: int) -> Params:
        L = 2**k
        r = self.c * 2.0 ** (k - self.r_offset)
        return make_params(self.d, self.N, L, r, self.t, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ParamError(f"unknown plan fields: {sorted(unknown)}")
        return cls(**data)
