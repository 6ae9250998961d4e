"""Per-index ratio records, the filtered ratio multiset and its frequency order.

For m >= 3 the successor n = p_{m-1} + 1 is split as n = L * R with L its
largest prime factor.  Index m is accepted when L > m (strictly), and the
accepted R values are counted.
"""

from __future__ import annotations

import csv
import io
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .errors import InvalidArgument, InvariantViolation, TableTooSmall
from .factor import SpfTable, build_spf_table, largest_prime_factors
from .primes import PrimeTable, build_prime_table, sieve_limit_for

DEFAULT_CHUNK_SIZE = 1 << 16
FIRST_INDEX = 3

RECORD_CSV_HEADER = ("m", "p_prev", "n", "largest_prime_factor", "ratio", "accepted")
FREQUENCY_CSV_HEADER = ("ratio", "count")

T = TypeVar("T")


@dataclass(frozen=True)
class RatioRecord:
    m: int
    p_prev: int
    n: int
    largest_prime_factor: int
    ratio: int
    accepted: bool


@dataclass(frozen=True)
class RecordArrays:
    """Column-oriented records for a contiguous index range."""

    m: np.ndarray
    p_prev: np.ndarray
    n: np.ndarray
    largest_prime_factor: np.ndarray
    ratio: np.ndarray
    accepted: np.ndarray

    def __len__(self) -> int:
        return int(self.m.size)

    def record(self, i: int) -> RatioRecord:
        return RatioRecord(
            m=int(self.m[i]),
            p_prev=int(self.p_prev[i]),
            n=int(self.n[i]),
            largest_prime_factor=int(self.largest_prime_factor[i]),
            ratio=int(self.ratio[i]),
            accepted=bool(self.accepted[i]),
        )

    def __iter__(self):
        return (self.record(i) for i in range(len(self)))

    @classmethod
    def concat(cls, parts: Sequence[RecordArrays]) -> RecordArrays:
        return cls(**{k: np.concatenate([getattr(p, k) for p in parts]) for k in RECORD_CSV_HEADER})


@dataclass
class RatioMultiset:
    """Counts of accepted ratios over 3 <= m <= max_m."""

    max_m: int
    counts: dict[int, int]
    records: RecordArrays | None = field(default=None, compare=False, repr=False)

    @property
    def accepted_total(self) -> int:
        return sum(self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class Tables:
    primes: PrimeTable
    spf: SpfTable


def tables_for(max_m: int) -> Tables:
    """Build prime and spf tables large enough to scan up to ``max_m``."""
    if max_m < 1:
        raise InvalidArgument(f"max_m must be >= 1, got {max_m}")
    limit = sieve_limit_for(max_m)
    primes = build_prime_table(limit)
    if primes.count < max_m:
        raise InvariantViolation(
            f"sieve limit {limit} holds {primes.count} primes, fewer than {max_m}"
        )
    return Tables(primes=primes, spf=build_spf_table(limit))


def records_for_range(lo: int, hi: int, primes: PrimeTable, spf: SpfTable) -> RecordArrays:
    """Records for every m in [lo, hi]."""
    if lo < FIRST_INDEX:
        raise InvalidArgument(f"m must be >= {FIRST_INDEX}, got {lo}")
    if hi - 1 > primes.count:
        raise TableTooSmall(f"m={hi} needs p_{hi - 1}; table holds {primes.count} primes")
    m = np.arange(lo, hi + 1, dtype=np.int64)
    p_prev = primes.primes[lo - 2 : hi - 1]
    n = p_prev + 1
    lpf = largest_prime_factors(n, spf)
    return RecordArrays(
        m=m,
        p_prev=p_prev,
        n=n,
        largest_prime_factor=lpf,
        ratio=n // lpf,
        accepted=lpf > m,
    )


def ratio_record(m: int, primes: PrimeTable, spf: SpfTable) -> RatioRecord:
    return records_for_range(m, m, primes, spf).record(0)


def count_accepted(rec: RecordArrays) -> Counter:
    values, freq = np.unique(rec.ratio[rec.accepted], return_counts=True)
    return Counter(dict(zip(values.tolist(), freq.tolist())))


def chunk_bounds(
    start: int, stop: int, chunk_size: int = DEFAULT_CHUNK_SIZE, breaks: Iterable[int] = ()
) -> list[tuple[int, int]]:
    """Split [start, stop] into inclusive chunks; every value in ``breaks``
    ends a chunk."""
    if chunk_size < 1:
        raise InvalidArgument(f"chunk_size must be positive, got {chunk_size}")
    edges = set(range(start - 1 + chunk_size, stop, chunk_size))
    edges.update(b for b in breaks if start <= b < stop)
    edges.add(stop)
    out, lo = [], start
    for hi in sorted(edges):
        out.append((lo, hi))
        lo = hi + 1
    return out


def resolve_workers(workers: int) -> int:
    if workers < 0:
        raise InvalidArgument(f"workers must be >= 0, got {workers}")
    return workers or (os.cpu_count() or 1)


def map_chunks(fn: Callable[[int, int], T], bounds: list[tuple[int, int]], workers: int = 1) -> list[T]:
    """Apply ``fn`` to every chunk; results come back in chunk order."""
    workers = resolve_workers(workers)
    if workers == 1 or len(bounds) == 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def scan(
    max_m: int,
    primes: PrimeTable,
    spf: SpfTable,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    keep_records: bool = False,
) -> RatioMultiset:
    """Count accepted ratios for 3 <= m <= max_m.

    The result does not depend on ``workers`` or ``chunk_size``.  With
    ``keep_records`` every record (accepted or not) is retained.
    """
    if max_m < FIRST_INDEX:
        raise InvalidArgument(f"max_m must be >= {FIRST_INDEX}, got {max_m}")
    bounds = chunk_bounds(FIRST_INDEX, max_m, chunk_size)

    def work(lo, hi):
        rec = records_for_range(lo, hi, primes, spf)
        return count_accepted(rec), (rec if keep_records else None)

    total = Counter()
    parts = []
    for counts, rec in map_chunks(work, bounds, workers):
        total.update(counts)
        if rec is not None:
            parts.append(rec)
    return RatioMultiset(
        max_m=max_m,
        counts=dict(sorted(total.items())),
        records=RecordArrays.concat(parts) if keep_records else None,
    )


def check_parity(ms: RatioMultiset) -> None:
    """Raise if any accepted ratio is odd."""
    odd = [r for r in ms.counts if r % 2]
    if not odd:
        return
    detail = f"odd accepted ratio {min(odd)}"
    if ms.records is not None:
        rec = ms.records
        idx = np.flatnonzero(rec.accepted & (rec.ratio % 2 == 1))
        detail += f" at m={int(rec.m[idx[0]])}"
    raise InvariantViolation(detail)


def frequency_order(ms: RatioMultiset | dict[int, int]) -> list[int]:
    """Ratios by descending count; equal counts ordered by ascending ratio."""
    counts = ms.counts if isinstance(ms, RatioMultiset) else ms
    return sorted(counts, key=lambda r: (-counts[r], r))


def a223881_prefix(max_m: int, primes: PrimeTable, spf: SpfTable) -> list[int]:
    """Accepted indices m in [3, max_m], ascending."""
    if max_m < FIRST_INDEX:
        raise InvalidArgument(f"max_m must be >= {FIRST_INDEX}, got {max_m}")
    out = []
    for lo, hi in chunk_bounds(FIRST_INDEX, max_m):
        rec = records_for_range(lo, hi, primes, spf)
        out.extend(rec.m[rec.accepted].tolist())
    return out


def family_points(r: int, max_m: int, primes: PrimeTable, spf: SpfTable) -> list[tuple[int, int]]:
    """(L, n) for every accepted m <= max_m with ratio r; each lies on n = r * L."""
    if r < 2 or r % 2:
        raise InvalidArgument(f"ratio families exist only for even r >= 2, got {r}")
    if max_m < FIRST_INDEX:
        raise InvalidArgument(f"max_m must be >= {FIRST_INDEX}, got {max_m}")
    out = []
    for lo, hi in chunk_bounds(FIRST_INDEX, max_m):
        rec = records_for_range(lo, hi, primes, spf)
        sel = rec.accepted & (rec.ratio == r)
        out.extend(zip(rec.largest_prime_factor[sel].tolist(), rec.n[sel].tolist()))
    return out


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def frequency_csv(ms: RatioMultiset) -> str:
    return _csv_text(FREQUENCY_CSV_HEADER, ((r, ms.counts[r]) for r in frequency_order(ms)))


def records_csv(records: RecordArrays) -> str:
    rows = zip(
        records.m.tolist(),
        records.p_prev.tolist(),
        records.n.tolist(),
        records.largest_prime_factor.tolist(),
        records.ratio.tolist(),
        (int(a) for a in records.accepted.tolist()),
    )
    return _csv_text(RECORD_CSV_HEADER, rows)
