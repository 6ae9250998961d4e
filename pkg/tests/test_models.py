import math
from math import gcd

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from successor_ratios import (
    InvalidArgument,
    build_prime_table,
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
from successor_ratios.models import check_bound, fit_constant_C_alt

TWIN_PRIME_CONSTANT = 0.6601618158468696


def totient_by_gcd(r):
    return sum(1 for k in range(1, r + 1) if gcd(k, r) == 1)


def c2_oracle(cutoff):
    with mpmath.workdps(30):
        prod = mpmath.mpf(1)
        for p in sympy.primerange(3, cutoff + 1):
            prod *= 1 - mpmath.mpf(1) / (p - 1) ** 2
        return prod


@pytest.mark.parametrize("r, expected", [(1, 1), (10, 4), (16, 8), (2, 1), (6, 2), (4, 2), (8, 4), (12, 4), (14, 6)])
def test_totient_examples(r, expected):
    assert totient_by_gcd(r) == expected
    assert euler_totient(r) == expected


def test_totient_matches_gcd_count():
    for r in range(1, 600):
        assert euler_totient(r) == totient_by_gcd(r)


@settings(max_examples=200)
@given(st.integers(1, 1000), st.integers(1, 1000))
def test_totient_multiplicative(a, b):
    if gcd(a, b) == 1:
        assert euler_totient(a * b) == euler_totient(a) * euler_totient(b)


def test_totient_rejects_zero():
    with pytest.raises(InvalidArgument):
        euler_totient(0)


def test_dirichlet_examples():
    assert math.log(50000) == pytest.approx(10.8198, abs=1e-4)
    assert dirichlet_estimate(2, 50000) == pytest.approx(4621.1, abs=0.1)
    assert dirichlet_estimate(8, 50000) == pytest.approx(1155.3, abs=0.05)
    assert dirichlet_estimate(6, 50000) == pytest.approx(2310.6, abs=0.05)
    for n in (3, 100, 10**6):
        assert dirichlet_estimate(2, n) / dirichlet_estimate(6, n) == pytest.approx(2.0, rel=1e-15)


def test_dirichlet_equal_totient_equal_estimate():
    assert dirichlet_estimate(8, 1000) == dirichlet_estimate(10, 1000) == dirichlet_estimate(12, 1000)


@pytest.mark.parametrize("r", [1, 3, 15])
def test_odd_ratio_rejected(r):
    for fn in (
        lambda: dirichlet_estimate(r, 100),
        lambda: hl_singular_series(r),
        lambda: hl_estimate_from_limit(r, 100.0),
        lambda: fit_constant_C(1, r, 100),
    ):
        with pytest.raises(InvalidArgument):
            fn()


@pytest.mark.parametrize("cutoff", [10, 1000, 100_000])
def test_twin_prime_constant_matches_oracle(cutoff):
    assert twin_prime_constant(cutoff) == pytest.approx(float(c2_oracle(cutoff)), rel=1e-12)


def test_twin_prime_constant_default():
    assert twin_prime_constant() == pytest.approx(TWIN_PRIME_CONSTANT, rel=1e-8)


def test_singular_series_examples():
    h2 = hl_singular_series(2)
    assert h2 == pytest.approx(1.3203, abs=5e-5)
    assert hl_singular_series(4) == h2
    assert hl_singular_series(6) == 2 * h2
    assert hl_singular_series(6) == pytest.approx(2.6406, abs=1e-4)


@pytest.mark.parametrize("r", [2, 4, 6, 10, 12, 18, 30, 36, 90, 210, 1024])
def test_singular_series_depends_on_odd_radical(r):
    odd_rad = math.prod(p for p in sympy.primefactors(r) if p > 2)
    assert hl_singular_series(r) == pytest.approx(hl_singular_series(2 * odd_rad), rel=1e-15)
    assert hl_singular_series(r) > 0


def hl_oracle(r, x):
    h = 2 * c2_oracle(10**5)
    for p in sympy.primefactors(r):
        if p > 2:
            h *= mpmath.mpf(p - 1) / (p - 2)
    x = mpmath.mpf(x)
    return float(h * x / (mpmath.log(x) * mpmath.log(r * x)))


def test_hl_estimate_from_limit_examples():
    v2 = hl_estimate_from_limit(2, 1e5)
    assert v2 == pytest.approx(939.5, abs=0.1)
    assert v2 == pytest.approx(hl_oracle(2, 1e5), rel=1e-5)
    e2 = math.e**2
    assert hl_estimate_from_limit(2, e2) == pytest.approx(
        hl_singular_series(2) * e2 / (2 * math.log(2 * e2)), rel=1e-14
    )
    # Direct evaluation gives 1723.93 for r=6.
    v6 = hl_estimate_from_limit(6, 1e5)
    assert v6 == pytest.approx(hl_oracle(6, 1e5), rel=1e-5)
    assert v6 == pytest.approx(1723.93, abs=0.01)


def test_hl_estimate_from_limit_domain():
    with pytest.raises(InvalidArgument):
        hl_estimate_from_limit(2, math.e)


def test_hl_estimate_examples():
    primes = build_prime_table(1000)
    assert sympy.prime(24) == 89
    assert hl_estimate(2, 25, primes) == pytest.approx(3.47, abs=0.005)
    assert hl_estimate(2, 25, primes) == pytest.approx(hl_oracle(2, 45), rel=1e-5)
    assert hl_estimate(4, 25, primes) == pytest.approx(hl_oracle(4, 22.5), rel=1e-5)
    assert hl_estimate(4, 25, primes) == pytest.approx(2.1204, abs=1e-4)
    # x / (ln x ln 2x) dips just above e; it increases once x >= 6 (N >= 7).
    assert hl_estimate(2, 6, primes) < hl_estimate(2, 5, primes)
    values = [hl_estimate(2, n, primes) for n in range(7, 160)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_fit_constant_examples():
    assert fit_constant_C(2882, 2, 50000) == pytest.approx(0.6237, abs=1e-4)
    assert fit_constant_C(2155, 6, 50000) == pytest.approx(0.9326, abs=1e-4)
    assert fit_constant_C(0, 4, 50000) == 0.0
    assert fit_constant_C_alt(0, 4, 50000) == 0.0
    assert fit_constant_C_alt(2882, 2, 50000) == pytest.approx(
        2882 * math.log(50000 * math.log(50000)) / 50000
    )


@pytest.mark.parametrize("m, expected", [(6, 3.3749), (16, 4.7925), (3, 2.1929)])
def test_theorem3_bound_examples(m, expected):
    direct = float(mpmath.log(m) + mpmath.log(mpmath.log(m)) + 1)
    assert theorem3_bound(m) == pytest.approx(direct, rel=1e-14)
    assert theorem3_bound(m) == pytest.approx(expected, abs=1e-3)


def test_theorem3_bound_domain():
    with pytest.raises(InvalidArgument):
        theorem3_bound(2)


def test_bound_check():
    assert check_bound(13, 2).satisfied
    # Unfiltered index 12 has ratio 16; the bound does not cover it.
    assert not check_bound(12, 16).satisfied


def test_model_estimate_fields():
    primes = build_prime_table(700_000)
    est = model_estimate(6, 50000, 2155, primes)
    assert est.phi_r == 2
    assert est.dirichlet == pytest.approx(2310.6, abs=0.05)
    assert est.fitted_C == pytest.approx(0.9326, abs=1e-4)
    assert est.singular_series == 2 * hl_singular_series(2)
    assert est.hl_estimate > 0
    assert model_estimate(2, 3, 0, build_prime_table(10)).hl_estimate is None
