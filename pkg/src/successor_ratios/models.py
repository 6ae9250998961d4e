"""Density heuristics for how often each even ratio occurs.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument
from .primes import PrimeTable, build_prime_table, nth_prime

DEFAULT_C2_CUTOFF = 10**7


def _require_even(r: int) -> None:
    if r < 2 or r % 2:
        raise InvalidArgument(f"ratio must be an even integer >= 2, got {r}")


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def euler_totient(r: int) -> int:
    if r < 1:
        raise InvalidArgument(f"totient needs r >= 1, got {r}")
    phi = r
    for p in _prime_divisors(r):
        phi -= phi // p
    return phi


def dirichlet_estimate(r: int, n: int) -> float:
    """Expected count N / (phi(r) ln N) of indices with ratio r."""
    _require_even(r)
    if n < 3:
        raise InvalidArgument(f"N must be >= 3, got {n}")
    return n / (euler_totient(r) * math.log(n))


@lru_cache(maxsize=None)
def twin_prime_constant(cutoff: int = DEFAULT_C2_CUTOFF) -> float:
    """Product of (1 - 1/(p-1)^2) over odd primes p <= cutoff."""
    if cutoff < 3:
        raise InvalidArgument(f"cutoff must be >= 3, got {cutoff}")
    p = build_prime_table(cutoff).primes[1:].astype(np.float64)
    return math.exp(float(np.sum(np.log1p(-1.0 / (p - 1.0) ** 2))))


def hl_singular_series(r: int, c2_cutoff: int = DEFAULT_C2_CUTOFF) -> float:
    """Hardy-Littlewood constant for L and r*L - 1 both prime.

    Equals 2 C2 times (p-1)/(p-2) for each odd prime p dividing r.
    """
    _require_even(r)
    h = 2.0 * twin_prime_constant(c2_cutoff)
    for p in _prime_divisors(r):
        if p > 2:
            h *= (p - 1) / (p - 2)
    return h


def hl_estimate_from_limit(r: int, x: float, c2_cutoff: int = DEFAULT_C2_CUTOFF) -> float:
    """Expected number of primes L <= x with r*L - 1 also prime."""
    _require_even(r)
    if x <= math.e:
        raise InvalidArgument(f"x must exceed e, got {x}")
    return hl_singular_series(r, c2_cutoff) * x / (math.log(x) * math.log(r * x))


def hl_estimate(r: int, n: int, primes: PrimeTable, c2_cutoff: int = DEFAULT_C2_CUTOFF) -> float:
    # Accepted successors up to index n never exceed p_{n-1} + 1, so L <= that / r.
    _require_even(r)
    if n < 3:
        raise InvalidArgument(f"N must be >= 3, got {n}")
    x = (nth_prime(n - 1, primes) + 1) / r
    return hl_estimate_from_limit(r, x, c2_cutoff)


def fit_constant_C(count: int, r: int, n: int) -> float:
    """count * phi(r) * ln N / N; zero when nothing was observed."""
    _require_even(r)
    if n < 3:
        raise InvalidArgument(f"N must be >= 3, got {n}")
    if count == 0:
        return 0.0
    return count * euler_totient(r) * math.log(n) / n


def fit_constant_C_alt(count: int, r: int, n: int) -> float:
    """Same as :func:`fit_constant_C` but normalised by ln(N ln N)."""
    _require_even(r)
    if n < 3:
        raise InvalidArgument(f"N must be >= 3, got {n}")
    if count == 0:
        return 0.0
    return count * euler_totient(r) * math.log(n * math.log(n)) / n


def theorem3_bound(m: int) -> float:
    """Ceiling ln m + ln ln m + 1 on accepted ratios at index m."""
    if m < 3:
        raise InvalidArgument(f"bound is defined for m >= 3, got {m}")
    lm = math.log(m)
    return lm + math.log(lm) + 1.0


@dataclass(frozen=True)
class BoundCheck:
    m: int
    bound_value: float
    ratio: int

    @property
    def satisfied(self) -> bool:
        return self.ratio < self.bound_value


def check_bound(m: int, ratio: int) -> BoundCheck:
    return BoundCheck(m=m, bound_value=theorem3_bound(m), ratio=ratio)


@dataclass(frozen=True)
class ModelEstimate:
    r: int
    N: int
    phi_r: int
    dirichlet: float
    singular_series: float
    hl_estimate: float | None
    fitted_C: float
    fitted_C_alt: float
    empirical: int

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "N": self.N,
            "phi_r": self.phi_r,
            "empirical": self.empirical,
            "dirichlet": self.dirichlet,
            "singular_series": self.singular_series,
            "hl_estimate": self.hl_estimate,
            "fitted_C": self.fitted_C,
            "fitted_C_alt": self.fitted_C_alt,
        }


def model_estimate(
    r: int,
    n: int,
    empirical: int,
    primes: PrimeTable | None = None,
    c2_cutoff: int = DEFAULT_C2_CUTOFF,
) -> ModelEstimate:
    """Collect every prediction for ratio r at bound N.

    ``hl_estimate`` is None without a prime table, or when the offset
    limit is too small for the formula.
    """
    _require_even(r)
    hl = None
    if primes is not None:
        try:
            hl = hl_estimate(r, n, primes, c2_cutoff)
        except InvalidArgument:
            hl = None
    return ModelEstimate(
        r=r,
        N=n,
        phi_r=euler_totient(r),
        dirichlet=dirichlet_estimate(r, n),
        singular_series=hl_singular_series(r, c2_cutoff),
        hl_estimate=hl,
        fitted_C=fit_constant_C(empirical, r, n),
        fitted_C_alt=fit_constant_C_alt(empirical, r, n),
        empirical=empirical,
    )
