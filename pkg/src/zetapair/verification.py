"""Numerical checks of exact identities linking zeros, primes and zeta.

Each check computes both sides independently and returns a CheckReport whose
``budget`` adds up every quadrature estimate and truncation bound that went
into the two sides.  A check passes when the residual stays within the
budget plus a small absolute slack for floating-point rounding.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from . import special
from .arithmetic import ArithmeticTables
from .errors import (AccuracyError, BandLimitError, DomainError, InsufficientTablesError, NonSmoothError,
                     PreconditionError)
from .testfn import TestFunction
from .zeros import ZeroList

TWO_PI = 2 * math.pi
SLACK = 1e-12


@dataclass(frozen=True)
class CheckReport:
    name: str
    lhs: complex
    rhs: complex
    residual: float
    budget: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "residual": self.residual,
            "budget": self.budget,
            "passed": self.passed,
            "details": self.details,
        }


def _report(name, lhs, rhs, budget, **details) -> CheckReport:
    lhs, rhs = complex(lhs), complex(rhs)
    budget = float(budget)
    if not (budget >= 0 and math.isfinite(budget)):
        raise AccuracyError(f"{name}: error budget is not finite", budget)
    budget = max(budget, SLACK)
    res = abs(lhs - rhs)
    return CheckReport(name, lhs, rhs, res, budget, bool(res <= budget + SLACK), details)


def _panels(a: float, b: float, width: float, n: int):
    """Composite Gauss-Legendre rule of order n on [a, b] with panels no wider than ``width``."""
    if b <= a:
        return np.zeros(0), np.zeros(0)
    m = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, m + 1)
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _two_rules(f, a, b, width, n=20):
    """Integral of f over [a, b] with orders n and n/2; returns (value, |difference|)."""
    vals = []
    for order in (n, n // 2):
        x, w = _panels(a, b, width, order)
        y = f(x)
        vals.append(complex(math.fsum((w * np.real(y)).tolist()), math.fsum((w * np.imag(y)).tolist())))
    return vals[0], abs(vals[0] - vals[1])


def _csum(values) -> complex:
    v = np.asarray(values)
    return complex(math.fsum(np.real(v).tolist()), math.fsum(np.imag(v).tolist()))


def _sup_hat(f: TestFunction) -> tuple:
    lo, hi = f.support
    x, w = _panels(lo, hi, (hi - lo) / 64, 16)
    h = np.abs(f.eval_hat(x))
    return float(np.sum(w * h)), float(np.sum(w * h * np.abs(x)))


# ---------------------------------------------------------------------------
# explicit formula

def explicit_formula_check(g: TestFunction, zeros: ZeroList, tables: ArithmeticTables,
                           level: float = 1e-14) -> CheckReport:
    """Sum over zeros of g_hat(gamma/2pi) minus the Omega integral against the prime side.

    ``g`` is the compactly supported function of the identity; it is the
    ``hat`` of the TestFunction, so g_hat(xi) = g.eval(-xi).  Both signs of
    each ordinate are summed.
    """
    X = g.require_band_limited()
    if g.parity != "even" and g.shift:
        X = max(abs(g.support[0]), abs(g.support[1]))
    n_max = int(math.floor(math.exp(X)))
    if n_max > tables.limit:
        raise InsufficientTablesError(f"prime side needs Lambda(n) for n <= {n_max}", n_max)
    U = g.decay_radius(level)
    height = TWO_PI * U
    if not zeros.turing_verified or zeros.height_covered < height or zeros.lower > 0:
        raise PreconditionError(f"explicit formula needs verified zeros on (0, {height:.6g}]")

    def ghat(xi):
        return g.eval(-np.asarray(xi))

    gam = zeros.ordinates[zeros.ordinates <= height]
    v = gam / TWO_PI
    zero_sum = _csum(ghat(v)) + _csum(ghat(-v))
    mass, moment = _sup_hat(g)
    # |d g_hat / dxi| <= 2 pi int |xi| |g|; ordinate errors enter through d(xi) = d(gamma)/2pi
    ord_err = moment * float(np.sum(zeros.abs_error[: gam.size])) * 2
    # tail beyond the cut: |g_hat| <= level there, zeros counted up to the scan cap
    cap = TWO_PI * 512.0
    tail_count = special.smooth_count(cap) + 2
    zero_tail = 2 * level * tail_count

    def omega_integrand(x):
        return TWO_PI * special.omega_density(TWO_PI * x) * ghat(x)

    om_int, om_err = _two_rules(omega_integrand, -U, U, 0.25, 20)
    om_tail = 2 * level * (2 * TWO_PI * float(np.max(np.abs(special.omega_density(np.array([TWO_PI * 512.0]))))) * 512)
    lhs = zero_sum - om_int

    def smooth_side(x):
        return (g.eval_hat(x) + g.eval_hat(-x)) * np.exp(x / 2)

    smooth, sm_err = _two_rules(smooth_side, -X, X, X / 32, 20)
    n = np.arange(2, n_max + 1)
    lam = tables.von_mangoldt[2 : n_max + 1]
    keep = lam > 0
    n, lam = n[keep], lam[keep]
    ln = np.log(n)
    prime = _csum(lam / np.sqrt(n) * (g.eval_hat(ln) + g.eval_hat(-ln)))
    rhs = smooth - prime
    interp = 2 * g.interpolation_error * (gam.size + 2 * U * 12)
    budget = ord_err + zero_tail + om_err + om_tail + sm_err + interp + 1e-13 * (abs(zero_sum) + abs(om_int) + abs(smooth) + abs(prime))
    return _report("explicit_formula", lhs, rhs, budget, zeros_used=int(gam.size), height=height,
                   primes_to=n_max, zero_sum=zero_sum.real, omega_integral=om_int.real,
                   smooth_part=smooth.real, prime_sum=prime.real, test_function=g.name)


# ---------------------------------------------------------------------------
# digamma lemma

def digamma_integral_check(J: TestFunction, a: float, b: float, sign: int = 1, tail_level: float = 1e-16) -> CheckReport:
    """int psi(a + sign i b t) J_hat(t) dt against psi(a) J(0) + int_0^inf e^{-ay}/(1-e^{-y}) [J(0) - J(-sign b y / 2pi)] dy."""
    if not (a > 0 and b > 0):
        raise DomainError("digamma check needs a > 0 and b > 0")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    try:
        S = J.require_band_limited()
        lo, hi = J.support
        lhs_tail = 0.0
    except BandLimitError:
        # exponentially decaying hat: cut where it is negligible
        S = 1.0
        while abs(J.eval_hat(S)) > tail_level:
            S *= 1.5
        lo, hi = -S, S
        lhs_tail = 4 * tail_level * abs(special.digamma(a + 1j * b * S)) * S

    def lhs_f(t):
        return special.digamma(a + sign * 1j * b * t) * J.eval_hat(t)

    lhs, lhs_err = _two_rules(lhs_f, lo, hi, (hi - lo) / 64, 20)
    j0 = complex(J.eval(0.0))
    sup_j = abs(j0) + float(np.max(np.abs(J.eval(np.linspace(0, 40, 401)))))
    Y = math.log(max(4 * sup_j / (a * tail_level), 10.0)) / a

    def rhs_f(y):
        y = np.asarray(y)
        kern = np.exp(-a * y) / -np.expm1(-y)
        return kern * (j0 - J.eval(-sign * b * y / TWO_PI))

    freq = b * max(abs(lo), abs(hi)) + 1.0  # oscillation of J(b y / 2pi) in y
    rhs_int, rhs_err = _two_rules(rhs_f, 0.0, Y, min(1.0, math.pi / freq), 20)
    rhs = special.digamma(a) * j0 + rhs_int
    rhs_tail = 2 * sup_j * math.exp(-a * Y) / (a * (1 - math.exp(-Y)))
    budget = lhs_err + lhs_tail + rhs_err + rhs_tail + 2 * J.interpolation_error * Y / a + 1e-14 * (abs(lhs) + abs(rhs))
    return _report("digamma_integral", lhs, rhs, budget, a=a, b=b, sign=sign, y_cut=Y, test_function=J.name)


# ---------------------------------------------------------------------------
# floor-function identity

def _hat_dd(f: TestFunction):
    if f.hat_dd is not None:
        return f.eval_hat_dd
    if not f.smooth:
        raise NonSmoothError(f"{f.name} has a hat with corners; its second derivative is not a function")
    h = 1e-3 * max(f.band_limit, 1e-3)

    def dd(x):
        x = np.asarray(x, dtype=np.float64)
        # fourth-order central difference
        return (-f.hat(x + 2 * h) + 16 * f.hat(x + h) - 30 * f.hat(x) + 16 * f.hat(x - h) - f.hat(x - 2 * h)) / (12 * h * h)

    return dd


def zeta_sq_regular(v):
    """|zeta(1+iv)|^2 - 1/v^2, finite at v = 0."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    out = np.empty(v.shape)
    for i, x in enumerate(v):
        g = special.zeta_regular_part(1 + 1j * x)
        im_over = -special.STIELTJES[1] if abs(x) < 1e-8 else g.imag / x
        out[i] = abs(g) ** 2 - 2 * im_over
    return out


def _bracket(x, y):
    fy = np.floor(y)
    return np.where(x <= 1.0, x * (y - fy), -fy * (x - np.floor(x)))


def _floor_rhs(F, b: float, x_max: float, y_max: float, n_y: int = 4, n_t: int = 5, dt: float = 0.05):
    """int_1^{y_max} int_0^{x_max} F(log(y/x)) bracket(x, y) dx/x^2 dy/y^2 with F supported in [-b, b].

    For fixed y the substitution x = y e^{-t} gives (1/y) int F(t) e^t bracket dt;
    the t-panels break at every t where x crosses an integer.
    """
    gy, wy = np.polynomial.legendre.leggauss(n_y)
    gt, wt = np.polynomial.legendre.leggauss(n_t)
    total = []
    n_top = int(math.floor(y_max))
    for n in range(1, n_top + 1):
        y_hi = min(n + 1.0, y_max)
        if y_hi <= n:
            break
        # subdivide short y so the log-scale stays resolved at small n
        m = max(1, int(math.ceil(math.log(y_hi / n) / dt)))
        ye = np.linspace(n, y_hi, m + 1)
        ys = (0.5 * (ye[1:] + ye[:-1])[:, None] + 0.5 * np.diff(ye)[:, None] * gy).ravel()
        wys = (0.5 * np.diff(ye)[:, None] * wy).ravel()
        for y, w_y in zip(ys, wys):
            t_lo = max(-b, math.log(y / x_max))
            t_hi = b
            if t_hi <= t_lo:
                continue
            x_lo, x_hi = y * math.exp(-t_hi), y * math.exp(-t_lo)
            ints = np.arange(math.floor(x_lo) + 1, math.ceil(x_hi))
            brk = np.concatenate([[t_lo], np.sort(np.log(y / ints[ints > 0])), [t_hi]])
            brk = brk[(brk >= t_lo) & (brk <= t_hi)]
            seg = np.diff(brk)
            k = np.maximum(1, np.ceil(seg / dt).astype(int))
            # split long segments into k equal pieces
            starts = np.repeat(brk[:-1], k) + np.concatenate([np.arange(kk) for kk in k]) * np.repeat(seg / k, k)
            widths = np.repeat(seg / k, k)
            t = (starts[:, None] + 0.5 * widths[:, None] * (gt + 1)).ravel()
            w = (0.5 * widths[:, None] * wt).ravel()
            x = y * np.exp(-t)
            vals = F(t) * np.exp(t) * _bracket(x, y) / y
            total.append(w_y / (y * y) * math.fsum((w * vals).tolist()))
    return math.fsum(total)


def floor_identity_check(f: TestFunction, x_max: float = 1e3, y_max: float = 1e3, level: float = 1e-12) -> CheckReport:
    """int f(u)(|zeta(1+2 pi i u)|^2 - 1/(2 pi u)^2) du  =  f_hat(0) + int int (f_hat - f_hat'')(log(y/x)) [bracket] dx/x^2 dy/y^2.

    The transform of (1 + 4 pi^2 u^2) f is f_hat - f_hat'' under
    f_hat(xi) = int f(u) e(-u xi) du, so that is the combination used.

    The box integral converges slowly in the box size (the truncation error
    behaves like c / size).  It is evaluated on the boxes s/4, s/2 and s,
    s = (x_max, y_max); the ratio of successive changes (close to 2) fixes
    the geometric tail, which is added to the s-box value.  The budget
    carries the difference between that tail and the plain 1/size tail,
    plus a quadrature estimate from a coarser rule on the s/4 box.
    """
    b = f.require_band_limited()
    hdd = _hat_dd(f)

    def F(t):
        return np.real(f.eval_hat(t) - hdd(t))

    U = f.decay_radius(level)
    width = min(0.25, 0.5 / b)

    # the zeta factor is even in u, so fold the integral onto [0, U] when f is
    if f.parity == "even":
        lhs, lhs_err = _two_rules(lambda u: 2 * np.real(f.eval(u)) * zeta_sq_regular(TWO_PI * u), 0.0, U, width, 16)
    else:
        lhs, lhs_err = _two_rules(lambda u: f.eval(u) * zeta_sq_regular(TWO_PI * u), -U, U, width, 16)
    grow = float(zeta_sq_regular(np.array([TWO_PI * 512.0]))[0])
    lhs_tail = 2 * level * abs(grow) * 512
    dt = min(0.05, b / 40)
    boxes = [_floor_rhs(F, b, x_max / k, y_max / k, 4, 6, dt) for k in (4, 2, 1)]
    coarse = _floor_rhs(F, b, x_max / 4, y_max / 4, 3, 5, dt * 4 / 3)
    d1, d2 = boxes[1] - boxes[0], boxes[2] - boxes[1]
    rho = d1 / d2 if d2 != 0 else math.inf
    if not (1.2 < rho < 8):
        raise AccuracyError(f"box integral does not converge geometrically (ratio {rho:.3g})", abs(d2))
    tail = d2 / (rho - 1)
    hat0 = float(np.real(f.eval_hat(0.0)))
    rhs = hat0 + boxes[2] + tail
    extrap_err = abs(tail - d2)
    quad = abs(boxes[0] - coarse)
    budget = lhs_err + lhs_tail + extrap_err + quad + f.interpolation_error * 2 * U * 10
    return _report("floor_identity", lhs, rhs, budget, x_max=x_max, y_max=y_max,
                   truncated_rhs=hat0 + boxes[2], truncated_residual=abs(lhs - hat0 - boxes[2]),
                   ratio=rho, tail_estimate=tail, rhs_quadrature_estimate=quad, test_function=f.name)


def bracket_values(x, y):
    """The bracket 1_[0,1](x) x y - floor(y)(x - floor(x)), exposed for property tests."""
    return _bracket(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))


# ---------------------------------------------------------------------------
# diagonal prime sum

def _abs_conv_tail(r: TestFunction, V: float, h: float = 0.05) -> float:
    """Upper estimate of the integral of (|r| * |r|)(v) over |v| > V."""
    U = max(r.decay_radius(1e-15), 2 * V)
    u = np.arange(-U, U + h / 2, h)
    a = np.abs(r.eval(u))
    conv = signal.fftconvolve(a, a) * h
    v = h * (np.arange(conv.size) - (a.size - 1))
    mass_out = float(np.sum(conv[np.abs(v) > V]) * h)
    # mass of |r| beyond U, where r is below 1e-15, is negligible at this scale
    return mass_out + 2e-15 * float(np.sum(a) * h)


def diagonal_sum_check(r: TestFunction, alpha1: float, alpha2: float, L: float, lam: float,
                       tables: ArithmeticTables, level: float = 1e-11) -> CheckReport:
    """Prime-power sum with weights log(n) Lambda(n)/n against its kernel integral.

    With W(xi) = r_hat(xi - alpha1 L) r_hat(-xi - alpha2 L) the left side
    is sum_n [W(-log n) + W(log n)] log(n) Lambda(n)/n, and the right side
    is lam R(0) + int K(v) R(v) dv, where R(v) = int W(xi) e(v xi) dxi and
    K(v) = 2 Re[(zeta'/zeta)'(1 + 2 pi i v) + 1/(2 pi v)^2] - 4 sin^2(pi v lam)/(2 pi v)^2.
    """
    b = r.require_band_limited()
    lo = max(alpha1 * L - b, -alpha2 * L - b)
    hi = min(alpha1 * L + b, -alpha2 * L + b)
    reach = max(abs(lo), abs(hi)) if hi > lo else 0.0
    hypothesis_ok = lam >= reach
    if not hypothesis_ok:
        warnings.warn(f"lam = {lam:.4g} is below the support reach {reach:.4g}; the identity is not expected to hold",
                      stacklevel=2)

    def W(xi):
        xi = np.asarray(xi, dtype=np.float64)
        return r.eval_hat(xi - alpha1 * L) * r.eval_hat(-xi - alpha2 * L)

    if hi <= lo:
        return _report("diagonal_sum", 0.0, 0.0, SLACK, empty=True, hypothesis_ok=bool(hypothesis_ok))
    n_max = int(math.floor(math.exp(reach)))
    if n_max > tables.limit:
        raise InsufficientTablesError(f"diagonal sum needs Lambda(n) for n <= {n_max}", n_max)
    n = np.arange(2, n_max + 1)
    lamn = tables.von_mangoldt[2 : n_max + 1]
    keep = lamn > 0
    n, lamn = n[keep], lamn[keep]
    ln = np.log(n)
    lhs = _csum((W(-ln) + W(ln)) * ln * lamn / n)

    xg, wg = _panels(lo, hi, (hi - lo) / 32, 16)
    wx = wg * W(xg)

    def R(v):
        v = np.atleast_1d(v)
        out = np.empty(v.shape, dtype=np.complex128)
        for s in range(0, v.size, 512):
            out[s : s + 512] = np.exp(2j * math.pi * np.outer(v[s : s + 512], xg)) @ wx
        return out

    def K(v):
        v = np.atleast_1d(np.asarray(v, dtype=np.float64))
        w = TWO_PI * v
        reg = np.array([special.logderiv_prime_regular(1 + 1j * x).real for x in w])
        small = np.abs(w * lam) < 1e-6
        ws = np.where(small, 1.0, w)
        osc = np.where(small, lam**2 * (1 - (w * lam) ** 2 / 12), 4 * np.sin(0.5 * w * lam) ** 2 / ws**2)
        return 2 * reg - osc

    # R decays like r's time side; cut where r has decayed
    V = r.decay_radius(level)
    freq = reach + 1.0
    width = min(0.25, 0.5 / freq)
    cache = {}

    def integrand(v):
        key = v.size
        if key not in cache:
            cache[key] = K(v)
        return cache[key] * R(v)

    integral, quad_err = _two_rules(integrand, -V, V, width, 12)
    r0 = complex(R(np.array([0.0]))[0])
    rhs = lam * r0 + integral
    # beyond the cut: R is a convolution of two copies of r (up to unimodular
    # factors), so |R| <= |r| * |r| pointwise; K is bounded by its sup on [V, 4V]
    probe = np.linspace(V, 4 * V, 33)
    sup_k = lam**2 + 2 * float(np.max(np.abs(K(probe))))
    tail = sup_k * _abs_conv_tail(r, V)
    budget = quad_err + tail + 1e-13 * (abs(lhs) + abs(rhs) + abs(lam * r0))
    return _report("diagonal_sum", lhs, rhs, budget, hypothesis_ok=bool(hypothesis_ok), primes_to=n_max,
                   v_cut=V, alpha1=alpha1, alpha2=alpha2, L=L, lam=lam, test_function=r.name)


# ---------------------------------------------------------------------------
# Dirichlet series of Lambda^2

def dirichlet_identity_check(s: float, tables: ArithmeticTables, n_max: int = 10**6, k_max: int = 20,
                             level: float = 1e-10) -> CheckReport:
    """sum_{n <= n_max} Lambda(n)^2 / n^s against sum_{k <= k_max} c_k (zeta'/zeta)'(k s).

    The prime side is a plain truncated sum, so its missing tail (the
    smooth estimate plus its RH error bound) enters the budget, together
    with a bound for the k > k_max terms of the zeta side.  ``details``
    also carries the residual after the smooth tail is added back, which
    isolates the genuine numerical error.
    """
    from .arithmetic import _l2_tail, lambda_squared_partial, mobius_coefficient_c

    s = float(s)
    if s <= 1.5:
        raise DomainError("the series identity is checked for real s > 3/2")
    if n_max > tables.limit:
        raise InsufficientTablesError(f"partial sum needs Lambda(n) for n <= {n_max}", n_max)
    lhs = lambda_squared_partial(s, tables, n_max)
    terms = []
    for k in range(1, k_max + 1):
        ck = mobius_coefficient_c(k)
        if ck:
            terms.append(ck * special.zeta_logderiv_prime(k * s).value.real)
    rhs = math.fsum(terms)
    tail, tail_err = _l2_tail(complex(s), float(n_max))
    tail = float(np.real(tail))
    # |c_k| <= k and |(zeta'/zeta)'(x)| <= 2 log^2(2) 2^{-x} for x >= 6
    k_tail = math.fsum(2 * k * math.log(2) ** 2 * 2.0 ** (-k * s) for k in range(k_max + 1, k_max + 200))
    budget = level + abs(tail) + tail_err + k_tail
    return _report("dirichlet_identity", lhs, rhs, budget, s=s, n_max=n_max, k_max=k_max,
                   smooth_tail=tail, tail_error_bound=float(tail_err), k_tail_bound=k_tail,
                   corrected_residual=abs(lhs + tail - rhs))
