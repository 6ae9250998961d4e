"""Checkpointed scans, log-log fits and comparison against published counts."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientData, InvalidArgument
from .factor import SpfTable, lpf_oracle
from .models import DEFAULT_C2_CUTOFF, model_estimate
from .primes import PrimeTable
from .ratios import (
    DEFAULT_CHUNK_SIZE,
    FIRST_INDEX,
    RatioMultiset,
    chunk_bounds,
    count_accepted,
    frequency_order,
    map_chunks,
    records_for_range,
)

# Published reference counts, keyed by scan bound.  Used only for
# comparison, never as a substitute for computing.
REFERENCE_COUNTS: dict[int, dict[int, int]] = {
    50_000: {2: 2882, 6: 2155, 4: 1544, 8: 786, 10: 719, 12: 201, 14: 0, 16: 0},
    2_000_000: {2: 73113, 6: 55270, 4: 39251, 8: 20011, 10: 18367, 12: 5160, 14: 1, 16: 1},
}
REFERENCE_ORDER: dict[int, list[int]] = {2_000_000: [2, 6, 4, 8, 10, 12, 14, 16]}
REFERENCE_DISTINCT: dict[int, int] = {2_000_000: 8}
REFERENCE_SOURCE = "published table of empirical counts"


@dataclass
class CheckpointSeries:
    checkpoints: list[int]
    counts_at: list[dict[int, int]]

    def counts(self, r: int) -> list[int]:
        return [c.get(r, 0) for c in self.counts_at]

    def ratios(self) -> list[int]:
        return sorted(set().union(*self.counts_at)) if self.counts_at else []


@dataclass(frozen=True)
class LogLogFit:
    r: int
    points: list[tuple[float, float]]
    slope: float
    intercept: float


def _validate_checkpoints(checkpoints: Sequence[int], max_m: int) -> list[int]:
    cps = list(checkpoints)
    if not cps:
        raise InvalidArgument("at least one checkpoint is required")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise InvalidArgument(f"checkpoints must be strictly ascending: {cps}")
    if cps[0] < FIRST_INDEX or cps[-1] > max_m:
        raise InvalidArgument(f"checkpoints must lie in [{FIRST_INDEX}, {max_m}]: {cps}")
    return cps


def checkpoint_scan(
    max_m: int,
    checkpoints: Sequence[int],
    primes: PrimeTable,
    spf: SpfTable,
    *,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> CheckpointSeries:
    """One pass over [3, max_m], snapshotting counts at each checkpoint.

    Chunk edges are aligned to the checkpoints so every snapshot is a
    prefix sum of whole chunks.
    """
    cps = _validate_checkpoints(checkpoints, max_m)
    bounds = chunk_bounds(FIRST_INDEX, max_m, chunk_size, breaks=cps)
    partials = map_chunks(
        lambda lo, hi: count_accepted(records_for_range(lo, hi, primes, spf)), bounds, workers
    )
    wanted = set(cps)
    running = Counter()
    snaps = []
    for (_, hi), part in zip(bounds, partials):
        running.update(part)
        if hi in wanted:
            snaps.append(dict(sorted(running.items())))
    return CheckpointSeries(checkpoints=cps, counts_at=snaps)


def loglog_fit(series: CheckpointSeries, r: int) -> LogLogFit:
    """Ordinary least squares of ln(count) on ln(N); zero counts are dropped."""
    pts = [
        (math.log(n), math.log(c))
        for n, c in zip(series.checkpoints, series.counts(r))
        if c > 0
    ]
    if len(pts) < 2:
        raise InsufficientData(f"ratio {r} has {len(pts)} nonzero checkpoints; need 2")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return LogLogFit(r=r, points=pts, slope=float(slope), intercept=float(intercept))


def plot_tsv(fit: LogLogFit) -> str:
    return "".join(f"{x!r}\t{y!r}\n" for x, y in fit.points)


def convergence_ratio(r1: int, r2: int, series: CheckpointSeries) -> list[float | None]:
    """counts[r1] / counts[r2] per checkpoint; None where the denominator is 0."""
    return [
        (a / b if b else None) for a, b in zip(series.counts(r1), series.counts(r2))
    ]


def first_occurrence(r: int, max_m: int, primes: PrimeTable, spf: SpfTable) -> int | None:
    if r < 2 or r % 2:
        raise InvalidArgument(f"ratio must be an even integer >= 2, got {r}")
    for lo, hi in chunk_bounds(FIRST_INDEX, max_m):
        rec = records_for_range(lo, hi, primes, spf)
        hits = np.flatnonzero(rec.accepted & (rec.ratio == r))
        if hits.size:
            return int(rec.m[hits[0]])
    return None


def export_bfile(items: Iterable[int]) -> str:
    return "".join(f"{i} {v}\n" for i, v in enumerate(items, start=1))


def parse_bfile(text: str) -> list[int]:
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        idx, value = line.split()
        if int(idx) != len(values) + 1:
            raise ValueError(f"line {lineno}: expected index {len(values) + 1}, got {idx}")
        values.append(int(value))
    return values


@dataclass(frozen=True)
class Divergence:
    """An index whose table-derived record disagrees with trial division."""

    m: int
    n: int
    sieve_lpf: int
    sieve_ratio: int
    sieve_accepted: bool
    oracle_lpf: int
    oracle_ratio: int
    oracle_accepted: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def localize_divergences(
    max_m: int, primes: PrimeTable, spf: SpfTable, *, workers: int = 1
) -> list[Divergence]:
    """Re-derive every record in [3, max_m] with :func:`lpf_oracle`."""

    def work(lo, hi):
        rec = records_for_range(lo, hi, primes, spf)
        found = []
        for i, (m, n, lpf) in enumerate(
            zip(rec.m.tolist(), rec.n.tolist(), rec.largest_prime_factor.tolist())
        ):
            true_lpf = lpf_oracle(n)
            if true_lpf != lpf:
                found.append(
                    Divergence(
                        m=m,
                        n=n,
                        sieve_lpf=lpf,
                        sieve_ratio=int(rec.ratio[i]),
                        sieve_accepted=bool(rec.accepted[i]),
                        oracle_lpf=true_lpf,
                        oracle_ratio=n // true_lpf,
                        oracle_accepted=true_lpf > m,
                    )
                )
        return found

    out = []
    for part in map_chunks(work, chunk_bounds(FIRST_INDEX, max_m), workers):
        out.extend(part)
    return out


@dataclass(frozen=True)
class ReportRow:
    ratio: int
    count: int
    reference: int | None
    phi: int | None
    dirichlet: float | None
    hl: float | None
    fitted_C: float | None
    fitted_C_alt: float | None

    @property
    def match(self) -> bool | None:
        return None if self.reference is None else self.count == self.reference

    def as_dict(self) -> dict:
        return {
            "ratio": self.ratio,
            "count": self.count,
            "reference": self.reference,
            "phi": self.phi,
            "dirichlet": self.dirichlet,
            "hl": self.hl,
            "fitted_C": self.fitted_C,
            "fitted_C_alt": self.fitted_C_alt,
            "match": self.match,
        }


@dataclass
class TableReport:
    N: int
    rows: list[ReportRow]
    frequency_order: list[int]
    distinct_ratios: int
    divergences: list[Divergence] | None = None
    verified_indices: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def has_reference(self) -> bool:
        return self.N in REFERENCE_COUNTS

    @property
    def mismatched_ratios(self) -> list[int]:
        return [row.ratio for row in self.rows if row.match is False]

    @property
    def order_match(self) -> bool | None:
        ref = REFERENCE_ORDER.get(self.N)
        return None if ref is None else self.frequency_order == ref

    @property
    def distinct_match(self) -> bool | None:
        ref = REFERENCE_DISTINCT.get(self.N)
        return None if ref is None else self.distinct_ratios == ref

    @property
    def all_match(self) -> bool:
        return (
            not self.mismatched_ratios
            and self.order_match is not False
            and self.distinct_match is not False
        )

    def as_dict(self) -> dict:
        out = {
            "N": self.N,
            "rows": [row.as_dict() for row in self.rows],
            "distinct_ratios": self.distinct_ratios,
            "frequency_order": self.frequency_order,
        }
        if self.has_reference:
            ref = {
                "source": REFERENCE_SOURCE,
                "all_match": self.all_match,
                "mismatched_ratios": self.mismatched_ratios,
            }
            if self.N in REFERENCE_ORDER:
                ref["frequency_order"] = REFERENCE_ORDER[self.N]
                ref["frequency_order_match"] = self.order_match
            if self.N in REFERENCE_DISTINCT:
                ref["distinct_ratios"] = REFERENCE_DISTINCT[self.N]
                ref["distinct_ratios_match"] = self.distinct_match
            out["reference"] = ref
        if self.divergences is not None:
            out["mismatches"] = {
                "verified_indices": self.verified_indices,
                "divergent": [d.as_dict() for d in self.divergences],
            }
        if self.notes:
            out["notes"] = self.notes
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        keys = ("ratio", "count", "reference", "phi", "dirichlet", "hl", "fitted_C", "match")
        lines = [",".join(keys)]
        for row in self.rows:
            d = row.as_dict()
            lines.append(",".join("" if d[k] is None else str(d[k]) for k in keys))
        return "\n".join(lines) + "\n"


def _row(r: int, count: int, reference: int | None, n: int, primes, c2_cutoff) -> ReportRow:
    if r < 2 or r % 2:
        # Only reachable with a corrupted table; the models are undefined here.
        return ReportRow(r, count, reference, None, None, None, None, None)
    est = model_estimate(r, n, count, primes, c2_cutoff)
    return ReportRow(
        ratio=r,
        count=count,
        reference=reference,
        phi=est.phi_r,
        dirichlet=est.dirichlet,
        hl=est.hl_estimate,
        fitted_C=est.fitted_C,
        fitted_C_alt=est.fitted_C_alt,
    )


def table_report(
    ms: RatioMultiset,
    primes: PrimeTable | None = None,
    spf: SpfTable | None = None,
    *,
    c2_cutoff: int = DEFAULT_C2_CUTOFF,
    workers: int = 1,
    localize: bool = True,
) -> TableReport:
    """Per-ratio comparison of empirical counts with models and references.

    When a reference exists and disagrees, and both tables are given,
    every index is re-checked by trial division and any divergent record
    is listed.
    """
    n = ms.max_m
    ref = REFERENCE_COUNTS.get(n, {})
    order = frequency_order(ms)
    ratios = order + sorted(r for r in ref if r not in ms.counts)
    rows = [_row(r, ms.counts.get(r, 0), ref.get(r), n, primes, c2_cutoff) for r in ratios]
    report = TableReport(N=n, rows=rows, frequency_order=order, distinct_ratios=ms.distinct)

    if ref and not report.all_match and localize and primes is not None and spf is not None:
        report.divergences = localize_divergences(n, primes, spf, workers=workers)
        report.verified_indices = n - FIRST_INDEX + 1
        if not report.divergences:
            report.notes.append(
                "every index re-derived by trial division agrees with the sieve; "
                "the disagreement lies with the reference counts"
            )
    return report
