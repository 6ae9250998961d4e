"""Smallest-prime-factor table and largest-prime-factor extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvariantViolation, TableTooSmall
from .primes import build_prime_table


@dataclass(frozen=True)
class SpfTable:
    """``spf[n]`` is the smallest prime factor of n for 2 <= n <= limit.

    Entries 0 and 1 are 0 and carry no meaning.
    """

    limit: int
    spf: np.ndarray

    def smallest(self, n: int) -> int:
        _check_range(n, self)
        return int(self.spf[n])


def _check_range(n: int, table: SpfTable) -> None:
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if n > table.limit:
        raise TableTooSmall(f"n={n} exceeds spf table limit {table.limit}")


def build_spf_table(limit: int) -> SpfTable:
    if limit < 2:
        raise InvalidArgument(f"limit must be >= 2, got {limit}")
    dtype = np.uint32 if limit < 2**32 else np.uint64
    spf = np.zeros(limit + 1, dtype=dtype)
    base = build_prime_table(max(2, math.isqrt(limit))).primes
    # Largest base prime first, so each composite ends up holding the
    # smallest prime that struck it.
    for p in base[::-1].tolist():
        spf[p * p :: p] = p
    unmarked = np.flatnonzero(spf == 0)
    spf[unmarked] = unmarked
    spf[:2] = 0
    spf.setflags(write=False)
    return SpfTable(limit=limit, spf=spf)


def largest_prime_factor(n: int, table: SpfTable) -> int:
    _check_range(n, table)
    spf = table.spf
    while True:
        p = int(spf[n])
        if p < 2:
            raise InvariantViolation(f"spf table entry for {n} is {p}")
        n //= p
        if n == 1:
            return p


def largest_prime_factors(values: np.ndarray, table: SpfTable) -> np.ndarray:
    """Vectorised :func:`largest_prime_factor` over an int array."""
    cur = np.array(values, dtype=np.int64)
    if cur.size == 0:
        return cur
    lo, hi = int(cur.min()), int(cur.max())
    if lo < 2:
        raise InvalidArgument(f"all values must be >= 2, got {lo}")
    if hi > table.limit:
        raise TableTooSmall(f"n={hi} exceeds spf table limit {table.limit}")

    spf = table.spf
    out = np.empty_like(cur)
    active = np.arange(cur.size)
    # Factors leave in non-decreasing order; the last one out is the largest.
    while active.size:
        c = cur[active]
        s = spf[c].astype(np.int64)
        if (s < 2).any():
            bad = int(c[s < 2].min())
            raise InvariantViolation(f"spf table entry for {bad} is {int(spf[bad])}")
        out[active] = s
        c //= s
        cur[active] = c
        active = active[c > 1]
    return out


def factorize(n: int, table: SpfTable) -> list[int]:
    """Prime factors of n with multiplicity, ascending."""
    _check_range(n, table)
    factors = []
    while n > 1:
        p = int(table.spf[n])
        if p < 2:
            raise InvariantViolation(f"spf table entry for {n} is {p}")
        factors.append(p)
        n //= p
    return factors


def lpf_oracle(n: int) -> int:
    """Largest prime factor by plain trial division; needs no table."""
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    largest = 1
    while n % 2 == 0:
        n //= 2
        largest = 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            largest = d
            while n % d == 0:
                n //= d
        d += 2
    return n if n > 1 else largest
