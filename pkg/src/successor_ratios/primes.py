"""Segmented sieve of Eratosthenes and 1-based nth-prime lookup."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, TableTooSmall

# 256 KiB of flags per segment, roughly one L2 cache.
DEFAULT_SEGMENT_SIZE = 1 << 18

# sieve_limit_for never returns less than p_6 = 13.
SMALL_LIMIT_FLOOR = 13
SIZING_SAFETY = 1.05


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit`` in ascending order.

    ``primes`` is a read-only int64 array, so a table can be shared
    between threads without copying.
    """

    limit: int
    primes: np.ndarray

    @property
    def count(self) -> int:
        return int(self.primes.size)

    def __len__(self) -> int:
        return self.count

    def __contains__(self, value: int) -> bool:
        i = int(np.searchsorted(self.primes, value))
        return i < self.count and int(self.primes[i]) == value


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def build_prime_table(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> PrimeTable:
    """Sieve every prime ``<= limit``.

    Only the base primes up to sqrt(limit) and one segment of flags are
    live at any time besides the output.
    """
    if limit < 2:
        raise InvalidArgument(f"limit must be >= 2, got {limit}")
    if segment_size < 1:
        raise InvalidArgument(f"segment_size must be positive, got {segment_size}")

    base = _simple_sieve(math.isqrt(limit))
    base_list = base.tolist()
    pieces = []
    for lo in range(0, limit + 1, segment_size):
        hi = min(lo + segment_size, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        if lo < 2:
            flags[: 2 - lo] = False
        for p in base_list:
            sq = p * p
            if sq >= hi:
                break
            start = max(sq, -(-lo // p) * p)
            flags[start - lo :: p] = False
        pieces.append(np.flatnonzero(flags) + lo)

    primes = np.concatenate(pieces).astype(np.int64)
    primes.setflags(write=False)
    return PrimeTable(limit=limit, primes=primes)


def nth_prime(k: int, table: PrimeTable) -> int:
    """Return p_k with p_1 = 2."""
    if k < 1:
        raise InvalidArgument(f"prime index is 1-based, got {k}")
    if k > table.count:
        raise TableTooSmall(
            f"p_{k} requested but table holds only {table.count} primes (limit {table.limit})"
        )
    return int(table.primes[k - 1])


def sieve_limit_for(n: int) -> int:
    """Return a sieve limit that holds at least ``n`` primes.

    Uses p_k < k (ln k + ln ln k) for k >= 6, padded by 5%.
    """
    if n < 6:
        return SMALL_LIMIT_FLOOR
    bound = n * (math.log(n) + math.log(math.log(n)))
    return max(SMALL_LIMIT_FLOOR, math.ceil(SIZING_SAFETY * bound))
