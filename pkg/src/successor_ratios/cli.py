"""Command-line entry point.

Exit codes: 0 success, 1 reference mismatch, 2 usage error,
3 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientData, InvalidArgument, InvariantViolation
from .factor import largest_prime_factor, largest_prime_factors, lpf_oracle
from .models import DEFAULT_C2_CUTOFF, model_estimate, theorem3_bound
from .primes import nth_prime
from .ratios import (
    FIRST_INDEX,
    a223881_prefix,
    check_parity,
    chunk_bounds,
    family_points,
    frequency_csv,
    frequency_order,
    records_csv,
    records_for_range,
    scan,
    tables_for,
)
from .report import (
    checkpoint_scan,
    convergence_ratio,
    export_bfile,
    loglog_fit,
    plot_tsv,
    table_report,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3

FORMATS = ("csv", "json", "tsv", "bfile")

log = logging.getLogger("successor_ratios")


@dataclass
class RunConfig:
    max_m: int
    checkpoints: list[int] | None = None
    output_format: str = "json"
    output_path: str | None = None
    workers: int = 0
    keep_records: bool = False
    c2_cutoff: int = DEFAULT_C2_CUTOFF

    def validate(self) -> None:
        if self.max_m < FIRST_INDEX:
            raise InvalidArgument(f"--max-m must be >= {FIRST_INDEX}, got {self.max_m}")
        if self.output_format not in FORMATS:
            raise InvalidArgument(f"unknown format {self.output_format!r}")
        if self.workers < 0:
            raise InvalidArgument(f"--workers must be >= 0, got {self.workers}")
        if self.c2_cutoff < 3:
            raise InvalidArgument(f"--c2-cutoff must be >= 3, got {self.c2_cutoff}")
        cps = self.checkpoints
        if cps:
            if any(b <= a for a, b in zip(cps, cps[1:])):
                raise InvalidArgument(f"--checkpoints must be strictly ascending: {cps}")
            if cps[0] < FIRST_INDEX or cps[-1] > self.max_m:
                raise InvalidArgument(f"--checkpoints must lie in [{FIRST_INDEX}, {self.max_m}]")


def emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text, encoding="utf-8", newline="")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _unsupported(cmd: str, fmt: str):
    raise InvalidArgument(f"{cmd} does not support --format {fmt}")


def cmd_scan(cfg: RunConfig) -> int:
    tables = tables_for(cfg.max_m)
    log.info("scanning m in [3, %d]", cfg.max_m)
    ms = scan(cfg.max_m, tables.primes, tables.spf, workers=cfg.workers, keep_records=cfg.keep_records)
    check_parity(ms)
    order = frequency_order(ms)

    fmt = cfg.output_format
    if fmt == "json":
        out = {
            "N": ms.max_m,
            "counts": {str(r): ms.counts[r] for r in order},
            "accepted_total": ms.accepted_total,
            "distinct_ratios": ms.distinct,
            "frequency_order": order,
        }
        if cfg.checkpoints:
            series = checkpoint_scan(
                cfg.max_m, cfg.checkpoints, tables.primes, tables.spf, workers=cfg.workers
            )
            out["checkpoints"] = [
                {"N": n, "counts": {str(r): c for r, c in counts.items()}}
                for n, counts in zip(series.checkpoints, series.counts_at)
            ]
        text = _dump(out)
    elif fmt == "csv":
        text = records_csv(ms.records) if cfg.keep_records else frequency_csv(ms)
    elif fmt == "tsv":
        text = "".join(f"{r}\t{ms.counts[r]}\n" for r in order)
    else:
        text = export_bfile(order)
    emit(text, cfg.output_path)
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    if cfg.output_format not in ("json", "csv", "bfile"):
        _unsupported("report", cfg.output_format)
    tables = tables_for(cfg.max_m)
    ms = scan(cfg.max_m, tables.primes, tables.spf, workers=cfg.workers)
    rep = table_report(ms, tables.primes, tables.spf, c2_cutoff=cfg.c2_cutoff, workers=cfg.workers)
    if cfg.output_format == "json":
        text = rep.to_json()
    elif cfg.output_format == "csv":
        text = rep.to_csv()
    else:
        text = export_bfile(rep.frequency_order)
    emit(text, cfg.output_path)
    if rep.has_reference and not rep.all_match:
        print(f"report: counts differ from the reference for ratios {rep.mismatched_ratios}",
              file=sys.stderr)
        for d in rep.divergences or []:
            print(f"report: divergent index {d.as_dict()}", file=sys.stderr)
        for note in rep.notes:
            print(f"report: {note}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _sieve_lpf(n: int, spf) -> int | None:
    try:
        return largest_prime_factor(n, spf)
    except InvariantViolation:
        return None


def _oracle_suite(n_max: int, spf) -> dict:
    try:
        fast = largest_prime_factors(np.arange(2, n_max + 1), spf).tolist()
    except InvariantViolation:
        # A corrupt entry; fall back to per-value lookups to find the first one.
        fast = [_sieve_lpf(n, spf) for n in range(2, n_max + 1)]
    for n, got in enumerate(fast, start=2):
        expected = lpf_oracle(n)
        if got != expected:
            return {
                "checked": n - 1,
                "passed": False,
                "counterexample": {"n": n, "sieve": got, "oracle": expected},
            }
    return {"checked": n_max - 1, "passed": True, "counterexample": None}


def cmd_verify(cfg: RunConfig) -> int:
    tables = tables_for(cfg.max_m)
    suites = {}
    n_max = nth_prime(cfg.max_m - 1, tables.primes) + 1
    log.info("oracle equivalence over n in [2, %d]", n_max)
    suites["oracle_equivalence"] = _oracle_suite(n_max, tables.spf)

    parity = {"checked": 0, "passed": True, "counterexample": None}
    prime_ratio = {"checked": 0, "passed": True, "counterexample": None}
    bound = {"checked": 0, "passed": True, "counterexample": None}
    reconstruction = {"checked": 0, "passed": True, "counterexample": None}

    def fail(suite, rec, **extra):
        if suite["passed"]:
            suite["passed"] = False
            suite["counterexample"] = {"m": rec.m, "n": rec.n, "lpf": rec.largest_prime_factor,
                                       "ratio": rec.ratio, **extra}

    try:
        for lo, hi in chunk_bounds(FIRST_INDEX, cfg.max_m):
            rec = records_for_range(lo, hi, tables.primes, tables.spf)
            reconstruction["checked"] += len(rec)
            bad = np.flatnonzero(rec.largest_prime_factor * rec.ratio != rec.n)
            if bad.size:
                fail(reconstruction, rec.record(int(bad[0])))

            acc = np.flatnonzero(rec.accepted)
            parity["checked"] += acc.size
            prime_ratio["checked"] += acc.size
            odd = acc[rec.ratio[acc] % 2 == 1]
            if odd.size:
                fail(parity, rec.record(int(odd[0])))
            # Accepted ratios are tiny, so trial division is enough here.
            for i in acc[rec.ratio[acc] != 2].tolist():
                r = int(rec.ratio[i])
                if r > 1 and lpf_oracle(r) == r:
                    fail(prime_ratio, rec.record(i))
                    break

            for i in acc[rec.m[acc] >= 6].tolist():
                m, r = int(rec.m[i]), int(rec.ratio[i])
                bound["checked"] += 1
                if not r < theorem3_bound(m):
                    fail(bound, rec.record(i), bound=theorem3_bound(m))
    except InvariantViolation as exc:
        reconstruction["passed"] = False
        reconstruction["counterexample"] = {"error": str(exc)}

    suites["reconstruction"] = reconstruction
    suites["parity"] = parity
    suites["prime_ratio"] = prime_ratio
    suites["ratio_bound"] = bound

    ok = all(s["passed"] for s in suites.values())
    emit(_dump({"N": cfg.max_m, "passed": ok, "suites": suites}), cfg.output_path)
    if not ok:
        first = next(name for name, s in suites.items() if not s["passed"])
        print(f"verify: {first} failed: {suites[first]['counterexample']}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_model(cfg: RunConfig, r: int, vs: int) -> int:
    if r < 2 or r % 2:
        raise InvalidArgument(f"--r must be an even integer >= 2, got {r}")
    if cfg.output_format not in ("json", "tsv"):
        _unsupported("model", cfg.output_format)
    tables = tables_for(cfg.max_m)
    cps = list(cfg.checkpoints or [])
    if not cps or cps[-1] != cfg.max_m:
        cps.append(cfg.max_m)
    series = checkpoint_scan(cfg.max_m, cps, tables.primes, tables.spf, workers=cfg.workers)
    count = series.counts_at[-1].get(r, 0)
    est = model_estimate(r, cfg.max_m, count, tables.primes, cfg.c2_cutoff)

    fit = None
    try:
        fit = loglog_fit(series, r)
    except InsufficientData:
        pass

    if cfg.output_format == "tsv":
        if fit is None:
            raise InvalidArgument("tsv output needs at least two checkpoints with nonzero counts")
        emit(plot_tsv(fit), cfg.output_path)
        return EXIT_OK

    out = {"estimate": est.as_dict()}
    if cfg.checkpoints:
        out["checkpoints"] = series.checkpoints
        out["counts"] = series.counts(r)
        out["loglog"] = None if fit is None else {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "points": [list(p) for p in fit.points],
        }
        out["convergence"] = {"vs": vs, "ratios": convergence_ratio(r, vs, series)}
    emit(_dump(out), cfg.output_path)
    return EXIT_OK


def cmd_a223881(cfg: RunConfig) -> int:
    tables = tables_for(cfg.max_m)
    emit(export_bfile(a223881_prefix(cfg.max_m, tables.primes, tables.spf)), cfg.output_path)
    return EXIT_OK


def cmd_family(cfg: RunConfig, r: int) -> int:
    if r < 2 or r % 2:
        raise InvalidArgument(f"--r must be an even integer >= 2, got {r}")
    tables = tables_for(cfg.max_m)
    pts = family_points(r, cfg.max_m, tables.primes, tables.spf)
    emit("".join(f"{lpf}\t{n}\n" for lpf, n in pts), cfg.output_path)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-m", type=int, help="scan bound N (index m runs over [3, N])")
    common.add_argument("--checkpoints", type=_int_list, help="comma-separated ascending bounds")
    common.add_argument("--format", dest="output_format", choices=FORMATS, default="json")
    common.add_argument("--out", dest="output_path", help="write here instead of stdout")
    common.add_argument("--workers", type=int, default=0, help="0 picks the CPU count")
    common.add_argument("--keep-records", action="store_true")
    common.add_argument("--c2-cutoff", type=int, default=DEFAULT_C2_CUTOFF)
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")

    parser = argparse.ArgumentParser(
        prog="successor-ratios",
        description="Ratios left after removing the largest prime factor of p_{m-1}+1.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("scan", parents=[common], help="count accepted ratios")
    sub.add_parser("report", parents=[common], help="compare counts with references and models")
    sub.add_parser("verify", parents=[common], help="run the invariant suites")
    model = sub.add_parser("model", parents=[common], help="density model for one ratio")
    model.add_argument("--r", type=int, required=True)
    model.add_argument("--vs", type=int, default=4, help="denominator ratio for convergence")
    sub.add_parser("a223881", parents=[common], help="b-file of accepted indices")
    family = sub.add_parser("family", parents=[common], help="(L, n) points of one ratio family")
    family.add_argument("--r", type=int, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(message)s",
    )
    max_m = args.max_m
    if max_m is None:
        if args.command == "model" and args.checkpoints:
            max_m = args.checkpoints[-1]
        elif args.command == "model":
            max_m = 50_000
        else:
            print("error: --max-m is required", file=sys.stderr)
            return EXIT_USAGE
    cfg = RunConfig(
        max_m=max_m,
        checkpoints=args.checkpoints,
        output_format=args.output_format,
        output_path=args.output_path,
        workers=args.workers,
        keep_records=args.keep_records,
        c2_cutoff=args.c2_cutoff,
    )
    try:
        if args.command == "model":
            if args.r < 2 or args.r % 2:
                raise InvalidArgument(f"--r must be an even integer >= 2, got {args.r}")
        cfg.validate()
        if args.command == "scan":
            return cmd_scan(cfg)
        if args.command == "report":
            return cmd_report(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "model":
            return cmd_model(cfg, args.r, args.vs)
        if args.command == "a223881":
            return cmd_a223881(cfg)
        return cmd_family(cfg, args.r)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
