"""Zeta and gamma machinery on and near the 1-line.

zeta, zeta' and zeta'' come from one Euler-Maclaurin pass carried out on
second-order jets: every term is propagated together with its first two
derivatives in s, so all three orders share the same cutoff and the same
remainder estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special as sp

from ._constants import BERNOULLI_EVEN, STIELTJES
from .errors import ConfigError, DomainError, PoleError

LOG_PI = math.log(math.pi)
LAURENT_RADIUS = 0.05


@dataclass(frozen=True)
class EulerMaclaurinConfig:
    """Evaluation strategy for the Euler-Maclaurin sum.

    ``cutoff=None`` picks 10 * (1 + |Im s|) direct terms at each point.
    """

    cutoff: int | None = None
    bernoulli_terms: int = 12
    target_abs_error: float = 1e-12

    def __post_init__(self):
        if self.cutoff is not None and self.cutoff < 1:
            raise ConfigError("cutoff must be positive")
        if not 1 <= self.bernoulli_terms <= len(BERNOULLI_EVEN) - 1:
            raise ConfigError(f"bernoulli_terms must be in [1, {len(BERNOULLI_EVEN) - 1}]")
        if not self.target_abs_error > 0:
            raise ConfigError("target_abs_error must be positive")

    def cutoff_for(self, s: complex) -> int:
        if self.cutoff is not None:
            return int(self.cutoff)
        return int(math.ceil(10 * (1 + abs(s.imag))))


DEFAULT_EM = EulerMaclaurinConfig()

# B_{2k} / (2k)! as floats, k = 1..20
_EM_COEF = tuple(float(b / math.factorial(2 * (k + 1))) for k, b in enumerate(BERNOULLI_EVEN))


def _jmul(a, b):
    return (a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[0] * b[2] + 2 * a[1] * b[1] + a[2] * b[0])


def _em_jet(s: complex, n_cut: int, n_bern: int):
    """(zeta, zeta', zeta'') at s and the magnitude of the first omitted term of each."""
    n = np.arange(1, n_cut, dtype=np.float64)
    logn = np.log(n)
    e = np.exp(-s * logn)
    el = e * logn
    direct = (e.sum(), -el.sum(), (el * logn).sum())

    big_l = math.log(n_cut)
    en = complex(np.exp(-s * big_l))  # N^{-s}
    w = s - 1.0
    ew = en * n_cut  # N^{1-s}
    pole = (ew / w, ew * (-big_l / w - 1 / w**2), ew * (big_l**2 / w + 2 * big_l / w**2 + 2 / w**3))
    half = (0.5 * en, -0.5 * big_l * en, 0.5 * big_l**2 * en)

    total = [direct[i] + pole[i] + half[i] for i in range(3)]
    # rising product s (s+1) ... (s+2k-2) as a jet, times N^{-s-2k+1}
    base = (en, -big_l * en, big_l**2 * en)
    prod = (s, 1.0 + 0j, 0j)
    omitted = (0.0, 0.0, 0.0)
    for k in range(1, n_bern + 2):
        scale = _EM_COEF[k - 1] * float(n_cut) ** (1 - 2 * k)
        term = _jmul(prod, base)
        if k <= n_bern:
            for i in range(3):
                total[i] += scale * term[i]
        else:
            sigma = s.real + 2 * k - 1
            fac = abs(s + 2 * k - 1) / sigma if sigma > 0 else math.inf
            omitted = tuple(abs(scale * term[i]) * fac for i in range(3))
        prod = _jmul(_jmul(prod, (s + 2 * k - 1, 1.0, 0.0)), (s + 2 * k, 1.0, 0.0))
    return total, omitted


def zeta_derivatives(s, order: int = 0, cfg: EulerMaclaurinConfig = DEFAULT_EM) -> complex:
    """zeta^(order)(s) for order 0, 1 or 2 by Euler-Maclaurin summation.

    Raises PoleError at s = 1 and ConfigError when the remainder estimate
    at s exceeds ``cfg.target_abs_error``.
    """
    value, _ = zeta_derivatives_with_error(s, order, cfg)
    return value


def zeta_derivatives_with_error(s, order: int = 0, cfg: EulerMaclaurinConfig = DEFAULT_EM):
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    jet, err = zeta_jet(s, cfg)
    return jet[order], err[order]


def zeta_jet(s, cfg: EulerMaclaurinConfig = DEFAULT_EM):
    """Return ((zeta, zeta', zeta''), (err0, err1, err2)) at a scalar s."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real <= 0:
        raise DomainError("zeta_derivatives: requires Re s > 0")
    n_cut = cfg.cutoff_for(s)
    jet, err = _em_jet(s, n_cut, cfg.bernoulli_terms)
    if max(err) > cfg.target_abs_error:
        raise ConfigError(
            f"Euler-Maclaurin remainder {max(err):.2e} at s={s} exceeds target {cfg.target_abs_error:.1e} "
            f"(cutoff={n_cut}, bernoulli_terms={cfg.bernoulli_terms})"
        )
    return tuple(complex(v) for v in jet), tuple(float(e) for e in err)


@dataclass(frozen=True)
class RegularizedLogDeriv:
    """(zeta'/zeta)'(s) together with its regular part value - 1/(s-1)^2."""

    value: complex
    pole_subtracted: bool
    regular_part: complex


def _laurent_h(w: complex):
    # h(w) = w zeta(1 + w) - 1 = sum_n a_n w^{n+1}, a_n = (-1)^n gamma_n / n!
    h0 = h1 = h2 = 0j
    for n, g in enumerate(STIELTJES):
        a = (-1) ** n * g / math.factorial(n)
        h0 += a * w ** (n + 1)
        h1 += a * (n + 1) * w**n
        if n >= 1:
            h2 += a * (n + 1) * n * w ** (n - 1)
    return h0, h1, h2


def zeta_logderiv_prime(s, cfg: EulerMaclaurinConfig = DEFAULT_EM, method: str = "auto") -> RegularizedLogDeriv:
    """(zeta'/zeta)'(s).

    Away from s = 1 this is zeta''/zeta - (zeta'/zeta)^2.  Within
    |s - 1| < 0.05 (or with ``method="laurent"``) the regular part comes
    from the Laurent series in Stieltjes constants, which avoids the
    cancellation against 1/(s-1)^2.
    """
    s = complex(s)
    w = s - 1.0
    if w == 0:
        raise PoleError("(zeta'/zeta)' has a pole at s = 1")
    if method not in ("auto", "direct", "laurent"):
        raise DomainError(f"unknown method {method!r}")
    use_laurent = method == "laurent" or (method == "auto" and abs(w) < LAURENT_RADIUS)
    if use_laurent:
        h0, h1, h2 = _laurent_h(w)
        r = h1 / (1 + h0)
        reg = h2 / (1 + h0) - r * r
        return RegularizedLogDeriv(reg + 1 / w**2, True, reg)
    (z0, z1, z2), _ = zeta_jet(s, cfg)
    ld = z1 / z0
    val = z2 / z0 - ld * ld
    return RegularizedLogDeriv(val, False, val - 1 / w**2)


def logderiv_prime_regular(s, cfg: EulerMaclaurinConfig = DEFAULT_EM) -> complex:
    """(zeta'/zeta)'(s) - 1/(s-1)^2, finite at s = 1 (value -gamma_1*2 - gamma_0^2 there)."""
    s = complex(s)
    if s == 1:
        h0, h1, h2 = _laurent_h(0j)
        return h2 - h1 * h1
    return zeta_logderiv_prime(s, cfg).regular_part


def zeta_regular_part(s, cfg: EulerMaclaurinConfig = DEFAULT_EM) -> complex:
    """zeta(s) - 1/(s-1), finite at s = 1."""
    s = complex(s)
    w = s - 1.0
    if abs(w) < LAURENT_RADIUS:
        h0, _, _ = _laurent_h(w)
        return h0 / w if w != 0 else complex(STIELTJES[0])
    return zeta_jet(s, cfg)[0][0] - 1 / w


def _check_gamma_poles(z):
    zr = np.real(z)
    zi = np.imag(z)
    if np.any((zi == 0) & (zr <= 0) & (zr == np.round(zr))):
        raise PoleError("pole of the gamma function at a nonpositive integer")


def digamma(z):
    """Gamma'/Gamma(z) for complex z (scalar or array).

    Delegates to scipy's complex digamma, which shifts z upward by the
    recurrence and then applies the asymptotic series.
    """
    z = np.asarray(z, dtype=np.complex128)
    _check_gamma_poles(z)
    out = sp.psi(z)
    return complex(out) if out.ndim == 0 else out


def loggamma(z):
    """Principal branch of log Gamma(z), continuous on the right half-plane."""
    z = np.asarray(z, dtype=np.complex128)
    _check_gamma_poles(z)
    out = sp.loggamma(z)
    return complex(out) if out.ndim == 0 else out


def omega_density(xi):
    """Omega(xi) / (2 pi), the mean density of zero ordinates at height xi."""
    xi = np.asarray(xi, dtype=np.float64)
    val = (np.real(sp.psi(0.25 + 0.5j * np.abs(xi))) - LOG_PI) / (2 * math.pi)
    return float(val) if val.ndim == 0 else val


# theta(t) ~ (t/2) log(t/2pi) - t/2 - pi/8 + sum_k c_k / t^(2k-1)
_THETA_SERIES = tuple(
    float(c)
    for c in (Fraction(1, 48), Fraction(7, 5760), Fraction(31, 80640), Fraction(127, 430080), Fraction(511, 1216512))
)
THETA_ASYMPTOTIC_MIN = 10.0


def rs_theta(t):
    """Riemann-Siegel theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi.

    Asymptotic series for t >= 10; the principal log-gamma below, which is
    the branch continuous from theta(0) = 0.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0):
        raise DomainError("rs_theta: requires t > 0")
    out = np.empty_like(t)
    hi = t >= THETA_ASYMPTOTIC_MIN
    if np.any(hi):
        th = t[hi]
        inv = 1.0 / th
        inv2 = inv * inv
        corr = 0.0
        for c in reversed(_THETA_SERIES):
            corr = corr * inv2 + c
        out[hi] = 0.5 * th * np.log(th / (2 * math.pi)) - 0.5 * th - math.pi / 8 + corr * inv
    lo = ~hi
    if np.any(lo):
        tl = t[lo]
        out[lo] = np.imag(sp.loggamma(0.25 + 0.5j * tl)) - 0.5 * tl * LOG_PI
    return float(out) if out.ndim == 0 else out


def rs_theta_prime(t):
    """theta'(t) = Omega(t) / 2 = pi * omega_density(t)."""
    return math.pi * np.asarray(omega_density(t)) if np.ndim(t) else math.pi * omega_density(t)


def smooth_count(T):
    """theta(T)/pi + 1, the smooth part of the zero count N(T)."""
    val = np.asarray(rs_theta(T)) / math.pi + 1.0
    return float(val) if val.ndim == 0 else val
