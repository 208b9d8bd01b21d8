import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from zetapair import arithmetic as A
from zetapair import special
from zetapair.errors import DomainError, InsufficientTablesError, InvalidArgumentError


def test_lambda_small_values():
    t = A.build_tables(10)
    want = [0, math.log(2), math.log(3), math.log(2), math.log(5), 0, math.log(7), math.log(2), math.log(3), 0]
    np.testing.assert_allclose(t.von_mangoldt[1:11], want, rtol=0, atol=1e-15)
    assert t.mobius[6] == 1


def test_divisor_sums(tables_small):
    t = tables_small
    N = t.limit
    lam_sum = np.zeros(N + 1)
    mu_sum = np.zeros(N + 1, dtype=np.int64)
    phi_sum = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        lam_sum[d::d] += t.von_mangoldt[d]
        mu_sum[d::d] += t.mobius[d]
        phi_sum[d::d] += t.totient[d]
    n = np.arange(1, N + 1)
    np.testing.assert_allclose(lam_sum[1:], np.log(n), atol=1e-11)
    assert mu_sum[1] == 1 and not mu_sum[2:].any()
    np.testing.assert_array_equal(phi_sum[1:], n)


def test_tables_against_sympy(tables_small):
    t = tables_small
    assert t.primes.tolist() == list(sympy.primerange(2, t.limit + 1))
    for n in (1, 2, 12, 30, 97, 210, 1001, 9973, 10_000):
        assert t.mobius[n] == sympy.mobius(n)
        assert t.totient[n] == sympy.totient(n)
    for p in t.primes[:200]:
        assert t.mobius[p] == -1


def test_psi_against_prime_power_enumeration(tables_big):
    x = 10**6
    oracle = 0.0
    parts = []
    for p in sympy.primerange(2, x + 1):
        parts.append(math.log(p) * int(math.floor(math.log(x) / math.log(p) + 1e-12)))
    oracle = math.fsum(parts)
    assert abs(A.chebyshev_psi(x, tables_big) - oracle) < 1e-6


def test_table_cache_roundtrip(tmp_path):
    t = A.build_tables(5000, cache_dir=tmp_path)
    again = A.build_tables(5000, cache_dir=tmp_path)
    assert (tmp_path / "tables_5000.bin").exists()
    np.testing.assert_array_equal(t.von_mangoldt, again.von_mangoldt)
    np.testing.assert_array_equal(t.primes, again.primes)


def test_bad_limit():
    with pytest.raises(InvalidArgumentError):
        A.build_tables(1)


@pytest.mark.parametrize("k,c", [(1, 1), (2, -1), (6, 2), (12, 2), (30, -8)])
def test_mobius_coefficient(k, c):
    assert A.mobius_coefficient_c(k) == c


@given(st.integers(min_value=1, max_value=5000))
@settings(max_examples=60, deadline=None)
def test_mobius_coefficient_divisor_oracle(k):
    assert A.mobius_coefficient_c(k) == sum(sympy.mobius(d) * d for d in sympy.divisors(k))


def test_b_decays_and_conjugate(tables_big):
    b = A.prime_sum_B(40.0, tables_big)
    lead = math.log(2) ** 2 / 2 ** (2 * 41)
    assert abs(b.value - lead) < 1e-3 * lead
    bp = A.prime_sum_B(1j, tables_big).value
    bm = A.prime_sum_B(-1j, tables_big).value
    assert abs(bp + bm - 2 * bp.real) < 1e-14


def test_b_at_zero_against_direct_sum(tables_big):
    # independent oracle: sum over primes <= 10^6 of log^2 p/(p-1)^2 plus the
    # integral tail int_x^inf log(t)/t^2 dt = (log x + 1)/x with an RH-size margin
    p = tables_big.primes.astype(np.float64)
    direct = math.fsum((np.log(p) ** 2 / (p - 1) ** 2).tolist())
    x = float(tables_big.limit)
    tail = (math.log(x) + 1) / x
    got = A.prime_sum_B(0.0, tables_big, tail_tol=1e-4)
    assert abs(got.value.real - (direct + tail)) < 5e-6 + got.error


def test_a_identities(tables_big):
    assert abs(A.euler_product_A(0.0, tables_big).value - 1) < 1e-14
    a = A.euler_product_A(0.7j, tables_big, tail_tol=1e-4).value
    b = A.euler_product_A(-0.7j, tables_big, tail_tol=1e-4).value
    assert abs(a - np.conj(b)) < 1e-13


def test_a_near_zero_quadratic(tables_big):
    # truncated product at 30 digits over p <= 10^4; the omitted primes move
    # A(0.01i) by about u^2 log(p)^2 / p summed over p > 10^4, i.e. < 1e-7
    mpmath.mp.dps = 30
    s = mpmath.mpc(0, "0.01")
    prod = mpmath.mpf(1)
    for p in tables_big.primes[tables_big.primes <= 10_000]:
        p = mpmath.mpf(int(p))
        prod *= 1 - (1 - p ** (-s)) ** 2 / (p - 1) ** 2
    # primes above 10^4 multiply by about exp(u^2 (log x + 1) / x)
    x = 10_000.0
    oracle = complex(prod) * math.exp(0.01**2 * (math.log(x) + 1) / x)
    got = A.euler_product_A(0.01j, tables_big, tail_tol=1e-4)
    assert abs(got.value - oracle) < 2e-8
    C = abs(oracle - 1) / 0.01**2
    assert abs(got.value - 1) <= 1.01 * C * 0.01**2


def test_lambda_squared_series(tables_big):
    got = A.lambda_squared_series(4.0, tables_big)
    direct = A.lambda_squared_partial(4.0, tables_big, 10**6)
    assert abs(got.value - direct) < 1e-12
    assert got.value.imag == 0
    # n = 2 is the largest term and carries more than half of the total
    assert math.log(2) ** 2 / 16 > 0.5 * got.value.real


def test_lambda_squared_identity_s2(tables_big):
    rhs = math.fsum(A.mobius_coefficient_c(k) * special.zeta_logderiv_prime(2 * k).value.real
                    for k in range(1, 26))
    got = A.lambda_squared_series(2.0, tables_big, tail_tol=1e-6)
    assert abs(got.value.real - rhs) <= 1e-10 + got.error


def test_lambda_squared_domain(tables_small):
    with pytest.raises(DomainError):
        A.lambda_squared_series(1.0, tables_small)
    with pytest.raises(InsufficientTablesError) as err:
        A.lambda_squared_series(1.2, tables_small, tail_tol=1e-12)
    assert err.value.required_limit > tables_small.limit
