"""Frequency-ordered ratios left after removing the largest prime factor
of each prime successor p_{m-1} + 1."""

from .errors import InsufficientData, InvalidArgument, InvariantViolation, TableTooSmall
from .factor import (
    SpfTable,
    build_spf_table,
    factorize,
    largest_prime_factor,
    largest_prime_factors,
    lpf_oracle,
)
from .models import (
    ModelEstimate,
    dirichlet_estimate,
    euler_totient,
    fit_constant_C,
    hl_estimate,
    hl_estimate_from_limit,
    hl_singular_series,
    model_estimate,
    theorem3_bound,
    twin_prime_constant,
)
from .primes import PrimeTable, build_prime_table, nth_prime, sieve_limit_for
from .ratios import (
    RatioMultiset,
    RatioRecord,
    a223881_prefix,
    family_points,
    frequency_order,
    ratio_record,
    scan,
    tables_for,
)
from .report import (
    CheckpointSeries,
    LogLogFit,
    checkpoint_scan,
    convergence_ratio,
    export_bfile,
    first_occurrence,
    loglog_fit,
    parse_bfile,
    table_report,
)

__version__ = "0.1.0"
