"""Sieved arithmetic tables and the prime-indexed functions built on them.

The tables (smallest prime factor, von Mangoldt, Moebius, Euler phi) come
from one linear sieve pass.  On top of them live

* ``prime_sum_B``      B(s)   = sum_p log^2 p / (p^{1+s} - 1)^2
* ``euler_product_A``  A(s)   = prod_p (1 - (1 - p^{-s})^2 / (p - 1)^2)
* ``lambda_squared_series``   sum_n Lambda(n)^2 / n^s
* ``mobius_coefficient_c``    c_k = sum_{d | k} mu(d) d

Truncated prime sums carry a tail: the smooth part of the tail is added
as a correction and the error of that correction is bounded with
Schoenfeld's estimate |theta(x) - x| < sqrt(x) log^2 x / (8 pi), x >= 599,
which holds under the Riemann hypothesis.
"""
from __future__ import annotations

import functools
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numba import njit
from scipy import integrate, special

from .errors import DomainError, InsufficientTablesError, InvalidArgumentError, ParseError

DEFAULT_LIMIT = 10**7
SCHOENFELD_MIN_X = 599.0

_CACHE_MAGIC = b"ZPTABLE\x00"
_CACHE_VERSION = 1


class Bounded(NamedTuple):
    """A value together with an absolute error bound."""

    value: complex | np.ndarray
    error: float | np.ndarray


@dataclass(frozen=True, eq=False)
class ArithmeticTables:
    """Arithmetic functions on 0..limit, indexed by n (index 0 unused).

    ``von_mangoldt[n]`` is Lambda(n), ``mobius[n]`` is mu(n), ``totient[n]``
    is phi(n), ``spf[n]`` the smallest prime factor.  ``primes`` holds the
    primes <= limit in ascending order.
    """

    limit: int
    spf: np.ndarray
    von_mangoldt: np.ndarray
    mobius: np.ndarray
    totient: np.ndarray
    primes: np.ndarray

    @property
    def log_primes(self) -> np.ndarray:
        lp = self.__dict__.get("_log_primes")
        if lp is None:
            lp = np.log(self.primes.astype(np.float64))
            object.__setattr__(self, "_log_primes", lp)
        return lp


@njit(cache=True)
def _linear_sieve(limit):
    spf = np.zeros(limit + 1, dtype=np.int32)
    primes = np.empty(max(16, int(1.3 * limit / max(math.log(limit), 1.0)) + 16), dtype=np.int64)
    count = 0
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[count] = i
            count += 1
        j = 0
        while j < count:
            p = primes[j]
            if p > spf[i] or p * i > limit:
                break
            spf[p * i] = p
            j += 1
    return spf, primes[:count].copy()


@njit(cache=True)
def _derived_tables(spf):
    n_max = spf.shape[0] - 1
    lam = np.zeros(n_max + 1, dtype=np.float64)
    mu = np.zeros(n_max + 1, dtype=np.int8)
    phi = np.zeros(n_max + 1, dtype=np.int64)
    if n_max >= 1:
        mu[1] = 1
        phi[1] = 1
    for n in range(2, n_max + 1):
        p = spf[n]
        m = n // p
        if m == 1:
            lam[n] = math.log(p)
            mu[n] = -1
            phi[n] = p - 1
        elif spf[m] == p:
            mu[n] = 0
            phi[n] = phi[m] * p
            # prime power iff m is a power of p
            if lam[m] > 0.0 and spf[m] == p:
                lam[n] = lam[m]
        else:
            mu[n] = -mu[m]
            phi[n] = phi[m] * (p - 1)
    return lam, mu, phi


def build_tables(limit: int = DEFAULT_LIMIT, cache_dir: str | os.PathLike | None = None) -> ArithmeticTables:
    """Sieve Lambda, mu, phi and the primes up to ``limit``.

    When ``cache_dir`` is given (or ``ZETAPAIR_CACHE`` is set) the tables
    are read from / written to a binary cache file there.
    """
    limit = int(limit)
    if limit < 2:
        raise InvalidArgumentError(f"table limit must be >= 2, got {limit}")
    if cache_dir is None:
        cache_dir = os.environ.get("ZETAPAIR_CACHE")
    path = None
    if cache_dir:
        path = Path(cache_dir) / f"tables_{limit}.bin"
        if path.exists():
            try:
                return load_tables(path)
            except ParseError:
                pass
    spf, primes = _linear_sieve(limit)
    lam, mu, phi = _derived_tables(spf)
    tables = ArithmeticTables(limit, spf, lam, mu, phi, primes)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_tables(tables, path)
    return tables


def save_tables(tables: ArithmeticTables, path) -> None:
    """Write the binary cache: magic, version, limit, then one record per n.

    Record layout (little endian, 13 bytes): spf int32, mu int8, phi int64.
    Lambda is not stored; it is rebuilt from spf on load.
    """
    rec = np.zeros(tables.limit + 1, dtype=np.dtype([("spf", "<i4"), ("mu", "i1"), ("phi", "<i8")]))
    rec["spf"] = tables.spf
    rec["mu"] = tables.mobius
    rec["phi"] = tables.totient
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IQ", _CACHE_VERSION, tables.limit))
        fh.write(rec.tobytes())


def load_tables(path) -> ArithmeticTables:
    with open(path, "rb") as fh:
        head = fh.read(len(_CACHE_MAGIC) + 12)
        if head[: len(_CACHE_MAGIC)] != _CACHE_MAGIC:
            raise ParseError(f"{path}: not a table cache file")
        version, limit = struct.unpack("<IQ", head[len(_CACHE_MAGIC):])
        if version != _CACHE_VERSION:
            raise ParseError(f"{path}: unsupported cache version {version}")
        dt = np.dtype([("spf", "<i4"), ("mu", "i1"), ("phi", "<i8")])
        rec = np.frombuffer(fh.read(), dtype=dt)
    if rec.shape[0] != limit + 1:
        raise ParseError(f"{path}: truncated cache ({rec.shape[0]} records, expected {limit + 1})")
    spf = np.ascontiguousarray(rec["spf"]).astype(np.int32)
    lam, _, _ = _derived_tables(spf)
    idx = np.arange(limit + 1)
    primes = idx[(spf == idx) & (idx >= 2)].astype(np.int64)
    return ArithmeticTables(int(limit), spf, lam, np.ascontiguousarray(rec["mu"]).copy(),
                            np.ascontiguousarray(rec["phi"]).copy(), primes)


# ---------------------------------------------------------------------------
# prime sums

@njit(cache=True, fastmath=False)
def _cexpm1(a, b):
    # exp(a + ib) - 1 without cancellation for small arguments
    ea = math.exp(a)
    sb = math.sin(b)
    s2 = math.sin(0.5 * b)
    re = math.expm1(a) * math.cos(b) - 2.0 * s2 * s2
    return complex(re, ea * sb)


@njit(cache=True)
def _cphi(z):
    # (exp(z) - 1) / z
    if abs(z) < 1e-4:
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    return _cexpm1(z.real, z.imag) / z


@njit(cache=True)
def _clog1p_over(x):
    # log(1 + x) / x
    if abs(x) < 1e-5:
        return 1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x))
    r2 = 2.0 * x.real + x.real * x.real + x.imag * x.imag
    return complex(0.5 * math.log1p(r2), math.atan2(x.imag, 1.0 + x.real)) / x


@njit(cache=True)
def _prime_kernel(s_arr, primes, logp):
    """Return (sum_p log^2 p/(p^{1+s}-1)^2, sum_p log1p(x_p)/s^2) per s.

    x_p = -(1 - p^{-s})^2 / (p - 1)^2; the second sum equals log A(s) / s^2
    and stays finite at s = 0.  Kahan-compensated accumulation, written in
    real arithmetic for speed.
    """
    m = s_arr.shape[0]
    out_b = np.empty(m, dtype=np.complex128)
    out_a = np.empty(m, dtype=np.complex128)
    for k in range(m):
        s = s_arr[k]
        sr = s.real
        si = s.imag
        abs_s = abs(s)
        inv_s = 1.0 / s if abs_s > 0 else 0j
        isr = inv_s.real
        isi = inv_s.imag
        s2r = sr * sr - si * si
        s2i = 2 * sr * si
        # Kahan accumulators for B (br, bi) and log A / s^2 (ar, ai)
        br = 0.0
        bi = 0.0
        cbr = 0.0
        cbi = 0.0
        ar = 0.0
        ai = 0.0
        car = 0.0
        cai = 0.0
        for j in range(primes.shape[0]):
            p = float(primes[j])
            lp = logp[j]
            mag = math.exp(-sr * lp)
            ang = si * lp
            er = mag * math.cos(ang)
            ei = -mag * math.sin(ang)  # p^{-s}
            xr = er / p
            xi = ei / p
            dr = 1.0 - xr
            di = -xi
            dd = dr * dr + di * di
            rr = (xr * dr + xi * di) / dd
            ri = (xi * dr - xr * di) / dd
            l2 = lp * lp
            tbr = l2 * (rr * rr - ri * ri)
            tbi = l2 * 2.0 * rr * ri
            y = tbr - cbr
            t = br + y
            cbr = (t - br) - y
            br = t
            y = tbi - cbi
            t = bi + y
            cbi = (t - bi) - y
            bi = t
            # q = (1 - p^{-s}) / s
            if abs_s * lp > 1e-2:
                nr = 1.0 - er
                ni = -ei
                qr = nr * isr - ni * isi
                qi = nr * isi + ni * isr
            else:
                q = lp * _cphi(-s * lp)
                qr = q.real
                qi = q.imag
            pm = (p - 1.0) * (p - 1.0)
            x2r = -(qr * qr - qi * qi) / pm
            x2i = -(2.0 * qr * qi) / pm
            xpr = s2r * x2r - s2i * x2i
            xpi = s2r * x2i + s2i * x2r
            if xpr * xpr + xpi * xpi < 1e-10:
                # log1p(z)/z = 1 - z/2 + z^2/3 - z^3/4
                z2r = xpr * xpr - xpi * xpi
                z2i = 2 * xpr * xpi
                z3r = z2r * xpr - z2i * xpi
                z3i = z2r * xpi + z2i * xpr
                lr = 1.0 - 0.5 * xpr + z2r / 3.0 - 0.25 * z3r
                li = -0.5 * xpi + z2i / 3.0 - 0.25 * z3i
            else:
                lz = _clog1p_over(complex(xpr, xpi))
                lr = lz.real
                li = lz.imag
            tar = x2r * lr - x2i * li
            tai = x2r * li + x2i * lr
            y = tar - car
            t = ar + y
            car = (t - ar) - y
            ar = t
            y = tai - cai
            t = ai + y
            cai = (t - ai) - y
            ai = t
        out_b[k] = complex(br, bi)
        out_a[k] = complex(ar, ai)
    return out_b, out_a


def _schoenfeld_eps(x):
    return np.sqrt(x) * np.log(x) ** 2 / (8 * math.pi)


@functools.lru_cache(maxsize=4096)
def _moment(lo: float, alpha: float, j: int, weighted: bool) -> float:
    """int_lo^inf x^alpha log^j x [eps(x)] dx, eps the Schoenfeld error term.

    Computed in the variable y = log(x / lo) where the integrand decays
    exponentially.  Cached: tail bounds reuse a handful of moments.
    """
    ll = math.log(lo)

    expo = alpha + 1 + (0.5 if weighted else 0.0)
    power = j + (2 if weighted else 0)
    scale = 1 / (8 * math.pi) if weighted else 1.0

    def f(y):
        x_log = ll + y
        # one combined exponent, so large y underflows instead of overflowing
        return scale * math.exp(expo * x_log + power * math.log(x_log))

    val, _ = integrate.quad(f, 0.0, np.inf, limit=200, epsrel=1e-10)
    return float(val)


def _as_array(s):
    arr = np.asarray(s, dtype=np.complex128)
    return arr, arr.ndim == 0


def _b_tail(s, n):
    """Smooth tail of B beyond n and its error bound (RH)."""
    a = 1.0 + s
    ln = math.log(n)
    tail = 0j
    for j in (2, 3):
        c = j * a - 1.0
        tail += (j - 1) * np.exp((1.0 - j * a) * ln) * (ln / c + 1.0 / c**2)
    sigma = a.real
    mag_a = abs(a)
    kappa = 1.01 / (1.0 - n ** (-sigma)) ** 3
    f0 = ln * n ** (-2 * sigma) * kappa
    # Stieltjes integration by parts against theta(x) - x
    alpha = -2 * sigma - 1
    err = _schoenfeld_eps(n) * f0 + kappa * (_moment(n, alpha, 0, True) + 2 * mag_a * _moment(n, alpha, 1, True))
    # j >= 4 terms of the smooth integral
    err += 3.0 * ln * n ** (1 - 4 * sigma) / max(4 * sigma - 1, 1e-3)
    return tail, err


def _a_tail(s, n):
    """Smooth tail of log A / s^2 beyond n and a bound on its error.

    With q(x) = (1 - x^{-s}) / s the tail is approximated by
    -int_n^inf q(x)^2 / (x^2 log x) dx, an exponential-integral combination.
    The bound is uniform as s -> 0 because |q(x)| <= x^{|Re s|} log x.
    """
    ln = math.log(n)
    if abs(s) < 1e-3:
        e2 = math.exp(-ln) * (1 / ln + 1 / ln**2)
        e3 = -math.exp(-ln) * (1 / ln + 2 / ln**2 + 2 / ln**3)
        tail_s2 = -(ln**2 * e2 + s * ln**3 * e3)
    else:
        tail_s2 = -(special.exp1(ln) - 2 * special.exp1((1 + s) * ln) + special.exp1((1 + 2 * s) * ln)) / s**2
    g = 2.0 * abs(s.real)
    s2 = abs(s) ** 2
    # replacing 1/(p-1)^2 by 1/p^2 and log1p(y)/y by 1
    det = 3.0 * _moment(n - 1, g - 3, 2, False) + s2 * _moment(n - 1, 2 * g - 4, 4, False)
    rh = 3.0 * _moment(n, g - 3, 0, True) + (2.0 + g) * _moment(n, g - 3, 1, True)
    err = det + _schoenfeld_eps(n) * n**g * ln / n**2 + rh
    return tail_s2, err


def _check_strip(s_arr, lo, what):
    if np.any(s_arr.real <= lo):
        raise DomainError(f"{what}: requires Re s > {lo}")


def _required_limit(tail_fn, s, tail_tol, start):
    n = max(start, 2 * int(SCHOENFELD_MIN_X))
    while n < 10**13:
        if tail_fn(s, n)[1] <= tail_tol:
            return n
        n *= 2
    return n




def _prime_sums(s_arr, tables):
    primes = tables.primes
    return _prime_kernel(np.ascontiguousarray(s_arr.ravel()), primes, tables.log_primes)


def prime_sum_B(s, tables: ArithmeticTables, tail_tol: float = 1e-6) -> Bounded:
    """B(s) = sum_p log^2 p / (p^{1+s} - 1)^2, vectorized over ``s``.

    The primes <= ``tables.limit`` are summed directly; the remainder is
    replaced by its smooth approximation and the returned error bounds the
    difference.  Raises InsufficientTablesError if that bound exceeds
    ``tail_tol``.
    """
    s_arr, scalar = _as_array(s)
    _check_strip(s_arr + 1.0, 0.5, "prime_sum_B")
    n = float(tables.limit)
    if n < SCHOENFELD_MIN_X:
        raise InsufficientTablesError("prime tail bound needs tables to at least 599", 2 * int(SCHOENFELD_MIN_X))
    direct, _ = _prime_sums(s_arr, tables)
    vals = np.empty(s_arr.size, dtype=np.complex128)
    errs = np.empty(s_arr.size)
    for i, sv in enumerate(s_arr.ravel()):
        tail, err = _b_tail(complex(sv), n)
        if err > tail_tol:
            need = _required_limit(_b_tail, complex(sv), tail_tol, tables.limit)
            raise InsufficientTablesError(f"B tail bound {err:.3g} exceeds {tail_tol:.3g}", need)
        vals[i] = direct[i] + tail
        errs[i] = err
    vals = vals.reshape(s_arr.shape)
    errs = errs.reshape(s_arr.shape)
    if scalar:
        return Bounded(complex(vals), float(errs))
    return Bounded(vals, errs)


def _log_a_over_s2(s_arr, tables, tail_tol):
    n = float(tables.limit)
    if n < SCHOENFELD_MIN_X:
        raise InsufficientTablesError("prime tail bound needs tables to at least 599", 2 * int(SCHOENFELD_MIN_X))
    _, direct = _prime_sums(s_arr, tables)
    vals = np.empty(s_arr.size, dtype=np.complex128)
    errs = np.empty(s_arr.size)
    for i, sv in enumerate(s_arr.ravel()):
        sv = complex(sv)
        tail_s2, err = _a_tail(sv, n)
        if err > tail_tol:
            need = _required_limit(lambda s, m: _a_tail(s, m), sv, tail_tol, tables.limit)
            raise InsufficientTablesError(f"A tail bound {err:.3g} exceeds {tail_tol:.3g}", need)
        vals[i] = direct[i] + tail_s2
        errs[i] = err
    return vals.reshape(s_arr.shape), errs.reshape(s_arr.shape)


def euler_product_A(s, tables: ArithmeticTables, tail_tol: float = 1e-6) -> Bounded:
    """A(s) = prod_p (1 - (1 - p^{-s})^2 / (p - 1)^2) near the imaginary axis.

    The product is evaluated as exp(s^2 * S) where S = log A / s^2 is summed
    in a form that does not cancel for small s.
    """
    s_arr, scalar = _as_array(s)
    if np.any(np.abs(s_arr.real) >= 0.5):
        raise DomainError("euler_product_A: requires |Re s| < 1/2")
    la, err = _log_a_over_s2(s_arr, tables, tail_tol)
    vals = np.exp(s_arr**2 * la)
    errs = err * np.abs(s_arr) ** 2 * np.abs(vals) * 1.0000001
    if scalar:
        return Bounded(complex(vals), float(errs))
    return Bounded(vals, errs)


def a_minus_one_over_s2(s, tables: ArithmeticTables, tail_tol: float = 1e-6) -> Bounded:
    """(A(s) - 1) / s^2, finite at s = 0 (where it equals A''(0)/2)."""
    s_arr, scalar = _as_array(s)
    la, err = _log_a_over_s2(s_arr, tables, tail_tol)
    z = s_arr**2 * la
    small = np.abs(z) < 1e-4
    phi = np.where(small, 1 + z * (0.5 + z / 6), np.expm1(z) / np.where(small, 1.0, z))
    vals = la * phi
    errs = err * np.abs(phi) * (1.0 + np.abs(z)) * 1.0000001
    if scalar:
        return Bounded(complex(vals), float(errs))
    return Bounded(vals, errs)


def euler_product_A_expansion(s, tables: ArithmeticTables, n_max: int | None = None) -> complex:
    """A(s) through its squarefree expansion sum_n mu(n)/phi(n)^2 prod_{p|n} (1 - p^{-s})^2.

    Independent cross-check of ``euler_product_A``: it never forms the
    product and sums over integers rather than primes.
    """
    n_max = tables.limit if n_max is None else min(int(n_max), tables.limit)
    s = complex(s)
    return complex(_squarefree_expansion(s, tables.spf[: n_max + 1], tables.mobius[: n_max + 1],
                                         tables.totient[: n_max + 1]))


@njit(cache=True)
def _squarefree_expansion(s, spf, mu, phi):
    n_max = spf.shape[0] - 1
    g = np.zeros(n_max + 1, dtype=np.complex128)  # prod_{p | n} (1 - p^{-s})^2 for squarefree n
    if n_max >= 1:
        g[1] = 1.0
    total = complex(1.0, 0.0)
    comp = 0j
    for n in range(2, n_max + 1):
        if mu[n] == 0:
            continue
        p = spf[n]
        lp = math.log(p)
        e = -_cexpm1(-s.real * lp, -s.imag * lp)
        g[n] = g[n // p] * e * e
        term = mu[n] * g[n] / (float(phi[n]) * float(phi[n]))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
    return total + comp


def mobius_coefficient_c(k: int) -> int:
    """c_k = sum_{d | k} mu(d) d, via factorization of k (multiplicative, c_{p^a} = 1 - p)."""
    k = int(k)
    if k < 1:
        raise InvalidArgumentError(f"c_k needs k >= 1, got {k}")
    out = 1
    n = k
    p = 2
    while p * p <= n:
        if n % p == 0:
            out *= 1 - p
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out *= 1 - n
    return out


def _l2_tail(s, n):
    """Smooth tail of sum_{p > n} log^2 p p^{-s} and its RH error bound."""
    ln = math.log(n)
    c = s - 1.0
    tail = np.exp(-c * ln) * (ln / c + 1.0 / c**2)
    sigma = s.real
    f0 = ln * n ** (-sigma)
    err = _schoenfeld_eps(n) * f0 + _moment(n, -sigma - 1, 0, True) + abs(s) * _moment(n, -sigma - 1, 1, True)
    # prime powers p^k with p > n, k >= 2
    err += 4.0 * ln**2 * n ** (1 - 2 * sigma) / max(2 * sigma - 1, 1e-3)
    return tail, err


def lambda_squared_series(s, tables: ArithmeticTables, tail_tol: float = 1e-6) -> Bounded:
    """sum_n Lambda(n)^2 / n^s for Re s > 1.

    All prime powers built from primes <= limit are summed exactly; the
    primes above the limit enter through the smooth tail with an RH bound.
    """
    s = complex(s)
    if s.real <= 1.0:
        raise DomainError("lambda_squared_series: requires Re s > 1")
    n = float(tables.limit)
    if n < SCHOENFELD_MIN_X:
        raise InsufficientTablesError("tail bound needs tables to at least 599", 2 * int(SCHOENFELD_MIN_X))
    tail, err = _l2_tail(s, n)
    if err > tail_tol:
        need = _required_limit(_l2_tail, s, tail_tol, tables.limit)
        raise InsufficientTablesError(f"Lambda^2 tail bound {err:.3g} exceeds {tail_tol:.3g}", need)
    lp = tables.log_primes
    total = 0j
    # k-th powers: p^{-ks} log^2 p summed while the terms matter
    k = 1
    while True:
        terms = lp**2 * np.exp(-k * s * lp)
        total += _fsum_complex(terms)
        if np.abs(terms[0]) < 1e-20:
            break
        k += 1
    return Bounded(total + tail, err + 1e-16 * abs(total))


def lambda_squared_partial(s, tables: ArithmeticTables, n_max: int) -> complex:
    """Plain truncated sum_{n <= n_max} Lambda(n)^2 / n^s (no tail)."""
    n_max = min(int(n_max), tables.limit)
    lam = tables.von_mangoldt[1 : n_max + 1]
    idx = np.nonzero(lam)[0]
    n = (idx + 1).astype(np.float64)
    terms = lam[idx] ** 2 * np.exp(-complex(s) * np.log(n))
    return _fsum_complex(terms)


def chebyshev_psi(x: float, tables: ArithmeticTables) -> float:
    """psi(x) = sum_{n <= x} Lambda(n)."""
    x = int(math.floor(x))
    if x > tables.limit:
        raise InsufficientTablesError(f"psi({x}) needs tables to {x}", x)
    return math.fsum(tables.von_mangoldt[1 : x + 1])


def _fsum_complex(arr) -> complex:
    arr = np.asarray(arr)
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


class PrimeSums(NamedTuple):
    """B(s), A(s) and (A(s) - 1)/s^2 from one pass over the primes, with error bounds."""

    B: np.ndarray
    A: np.ndarray
    a_minus_one_over_s2: np.ndarray
    B_error: np.ndarray
    A_error: np.ndarray


def prime_sums(s, tables: ArithmeticTables, tail_tol: float = 1e-6) -> PrimeSums:
    """Evaluate B, A and (A - 1)/s^2 together (vectorized over s)."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(np.abs(s_arr.real) >= 0.5):
        raise DomainError("prime_sums: requires |Re s| < 1/2")
    n = float(tables.limit)
    if n < SCHOENFELD_MIN_X:
        raise InsufficientTablesError("prime tail bound needs tables to at least 599", 2 * int(SCHOENFELD_MIN_X))
    b_dir, a_dir = _prime_sums(s_arr, tables)
    b = np.empty_like(b_dir)
    la = np.empty_like(a_dir)
    b_err = np.empty(s_arr.size)
    a_err = np.empty(s_arr.size)
    for i, sv in enumerate(s_arr):
        sv = complex(sv)
        tb, eb = _b_tail(sv, n)
        ta, ea = _a_tail(sv, n)
        if max(eb, ea) > tail_tol:
            fn = _b_tail if eb > tail_tol else _a_tail
            raise InsufficientTablesError(f"prime tail bound {max(eb, ea):.3g} exceeds {tail_tol:.3g}",
                                          _required_limit(fn, sv, tail_tol, tables.limit))
        b[i] = b_dir[i] + tb
        la[i] = a_dir[i] + ta
        b_err[i] = eb
        a_err[i] = ea
    z = s_arr**2 * la
    small = np.abs(z) < 1e-4
    phi = np.where(small, 1 + z * (0.5 + z / 6), np.expm1(z) / np.where(small, 1.0, z))
    a_val = np.exp(z)
    return PrimeSums(b, a_val, la * phi, b_err, a_err * np.maximum(np.abs(s_arr) ** 2 * np.abs(a_val), np.abs(phi)))
