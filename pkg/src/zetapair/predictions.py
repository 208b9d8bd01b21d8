"""Pair-correlation prediction kernels and the integrals built from them.

With lambda = log(t / 2 pi) and u real, the kernel Q_t is

    Q_t(u) = (1 / 2 pi^2) Re[(zeta'/zeta)'(1+iu) - B(iu)
                              + (t/2pi)^{-iu} |zeta(1+iu)|^2 A(iu)].

Both double poles at u = 0 cancel.  Writing

    P(u) = Re[(zeta'/zeta)'(1+iu) - B(iu)] + 1/u^2
    C(u) = |zeta(1+iu)|^2 A(iu) - 1/u^2

(both smooth through u = 0) the kernel becomes

    Q_t(u) = (1 / 2 pi^2) [P(u) + Re(e^{-iu lambda} C(u)) - 2 sin^2(u lambda / 2) / u^2],

which is the form used for small |u|, for t-averages and for tabulation.
"""
from __future__ import annotations

import hashlib
import math
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _cheb, arithmetic, special
from ._constants import STIELTJES
from .errors import AccuracyError, BandLimitError, DomainError, InvalidArgumentError
from .testfn import TestFunction

TWO_PI = 2 * math.pi
INV_2PI2 = 1.0 / (2 * math.pi**2)

_TABLE_WIDTH = 0.5
_TABLE_NODES = 25
_TABLE_VERSION = 1


def default_cache_dir() -> Path:
    env = os.environ.get("ZETAPAIR_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "zetapair"


@dataclass(eq=False)
class KernelContext:
    """Shared state for kernel evaluation.

    ``table_limit`` is the sieve bound used when ``tables`` is not given.
    The smooth parts P and C are tabulated on [0, u_table_max] on first use
    (and cached on disk under ``cache_dir`` when set).
    """

    tables: arithmetic.ArithmeticTables | None = None
    em_cfg: special.EulerMaclaurinConfig = special.DEFAULT_EM
    small_u_threshold: float = 1e-3
    tail_tol: float = 5e-5
    table_limit: int = 10**6
    u_table_max: float = 80.0
    cache_dir: str | os.PathLike | None = None
    use_disk_cache: bool = True
    _panels: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 < self.small_u_threshold < special.LAURENT_RADIUS:
            raise InvalidArgumentError("small_u_threshold must lie in (0, 0.05)")

    def get_tables(self) -> arithmetic.ArithmeticTables:
        if self.tables is None:
            self.tables = arithmetic.build_tables(self.table_limit)
        return self.tables

    # -- smooth parts ------------------------------------------------------
    def parts_direct(self, u):
        """(P(u), C(u)) computed from scratch at each u."""
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))
        ps = arithmetic.prime_sums(1j * u, self.get_tables(), self.tail_tol)
        reg = np.array([special.logderiv_prime_regular(1 + 1j * x, self.em_cfg) for x in u])
        g = np.array([special.zeta_regular_part(1 + 1j * x, self.em_cfg) for x in u])
        tiny = np.abs(u) < 1e-8
        im_g_over_u = np.where(tiny, -STIELTJES[1], g.imag / np.where(tiny, 1.0, u))
        p = reg.real - ps.B.real
        # (A - 1)/u^2 = -(A - 1)/s^2 with s = iu
        c = (np.abs(g) ** 2 - 2 * im_g_over_u) * ps.A - ps.a_minus_one_over_s2
        return p, c

    def _table(self):
        if self._panels is not None:
            return self._panels
        n_pan = int(math.ceil(self.u_table_max / _TABLE_WIDTH))
        path = None
        if self.use_disk_cache:
            key = f"{_TABLE_VERSION}-{self.get_tables().limit}-{n_pan}-{_TABLE_WIDTH}-{_TABLE_NODES}-{self.tail_tol}"
            digest = hashlib.sha1(key.encode()).hexdigest()[:12]
            path = Path(self.cache_dir) if self.cache_dir else default_cache_dir()
            path = path / f"kernel_parts_{digest}.npz"
            if path.exists():
                try:
                    with np.load(path) as data:
                        p_vals, c_vals = data["p"], data["c"]
                    if p_vals.shape == (n_pan, _TABLE_NODES):
                        self._panels = self._make_panels(p_vals, c_vals)
                        return self._panels
                except (OSError, KeyError, ValueError):
                    pass
        nodes = _cheb.nodes(_TABLE_WIDTH, n_pan, _TABLE_NODES)
        p_vals, c_vals = self.parts_direct(nodes.ravel())
        p_vals = p_vals.reshape(nodes.shape)
        c_vals = c_vals.reshape(nodes.shape)
        if path is not None:
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".tmp.npz")
                np.savez(tmp, p=p_vals, c=c_vals)
                os.replace(tmp, path)
            except OSError:
                pass
        self._panels = self._make_panels(p_vals, c_vals)
        return self._panels

    @staticmethod
    def _make_panels(p_vals, c_vals):
        return (
            _cheb.Panels.from_values(_TABLE_WIDTH, p_vals),
            _cheb.Panels.from_values(_TABLE_WIDTH, c_vals.real),
            _cheb.Panels.from_values(_TABLE_WIDTH, c_vals.imag),
        )

    @property
    def table_error(self) -> float:
        return max(p.error for p in self._table())

    def parts(self, u):
        """(P(u), C(u)) from the table where it applies, directly elsewhere."""
        u = np.atleast_1d(np.asarray(u, dtype=np.float64))
        au = np.abs(u)
        p = np.empty(u.shape)
        c = np.empty(u.shape, dtype=np.complex128)
        inside = au < self.u_table_max
        if np.any(inside):
            tp, tcr, tci = self._table()
            a = au[inside]
            p[inside] = tp(a)
            c[inside] = tcr(a) + 1j * tci(a)
        if np.any(~inside):
            p[~inside], c[~inside] = self.parts_direct(au[~inside])
        c = np.where(u < 0, np.conj(c), c)
        return p, c


# ---------------------------------------------------------------------------
# pointwise kernels

def _log_height(t, extend=False):
    t = np.asarray(t, dtype=np.float64)
    if np.any(t <= 0) or (not extend and np.any(t <= TWO_PI)):
        raise DomainError("kernels need t > 2 pi")
    return np.log(t / TWO_PI)


def _sin2_over_u2(u, lam):
    """2 sin^2(u lam / 2) / u^2 with its limit lam^2 / 2 at u = 0."""
    u = np.asarray(u, dtype=np.float64)
    small = np.abs(u * lam) < 1e-6
    us = np.where(small, 1.0, u)
    return np.where(small, 0.5 * lam**2 * (1 - (u * lam) ** 2 / 12), 2 * np.sin(0.5 * u * lam) ** 2 / us**2)


def _grouped(lam, u, p, c):
    return INV_2PI2 * (p + np.real(np.exp(-1j * u * lam) * c) - _sin2_over_u2(u, lam))


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def q_kernel(t, u, ctx: KernelContext, path: str = "auto", extend: bool = False):
    """Q_t(u).  ``path`` selects "direct" (the literal bracket), "grouped",
    "table" (grouped form with the tabulated smooth parts, for dense grids)
    or "auto" (direct for |u| >= ctx.small_u_threshold, grouped below)."""
    lam = _log_height(t, extend)
    u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if path not in ("auto", "direct", "grouped", "table"):
        raise InvalidArgumentError(f"unknown path {path!r}")
    if path == "table":
        p, c = ctx.parts(u_arr)
        out = _grouped(lam, u_arr, p, c)
        return float(out[0]) if np.ndim(u) == 0 else out
    out = np.empty(u_arr.shape)
    direct = np.abs(u_arr) >= ctx.small_u_threshold if path == "auto" else np.full(u_arr.shape, path == "direct")
    if np.any(direct & (u_arr == 0)):
        raise DomainError("the direct path is singular at u = 0")
    if np.any(direct):
        ud = u_arr[direct]
        ps = arithmetic.prime_sums(1j * ud, ctx.get_tables(), ctx.tail_tol)
        vals = np.empty(ud.shape)
        for i, x in enumerate(ud):
            (z0, z1, z2), _ = special.zeta_jet(1 + 1j * x, ctx.em_cfg)
            ld = z2 / z0 - (z1 / z0) ** 2
            osc = np.exp(-1j * x * lam) * abs(z0) ** 2 * ps.A[i]
            vals[i] = INV_2PI2 * (ld - ps.B[i] + osc).real
        out[direct] = vals
    if np.any(~direct):
        ug = u_arr[~direct]
        p, c = ctx.parts_direct(np.abs(ug))
        c = np.where(ug < 0, np.conj(c), c)
        out[~direct] = _grouped(lam, ug, p, c)
    return float(out[0]) if np.ndim(u) == 0 else out


def q_tilde_kernel(t, u, ctx: KernelContext, extend: bool = False, tabulated: bool = False):
    """Q~_t(u): Q_t with the zeta-zeta-A product replaced by e^{-+iu lambda}/u^2."""
    lam = _log_height(t, extend)
    u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
    p, _ = ctx.parts(u_arr) if tabulated else ctx.parts_direct(np.abs(u_arr))
    out = INV_2PI2 * (p - _sin2_over_u2(u_arr, lam))
    return float(out[0]) if np.ndim(u) == 0 else out


def gue_kernel(t, u, form: str = "closed"):
    """K_t(u) = -(lambda/2pi)^2 K(lambda u / 2pi), K(x) = (sin pi x / pi x)^2.

    ``form="closed"`` evaluates the equivalent -sin^2(lambda u / 2)/(pi u)^2
    (finite at u = 0); ``form="sinc"`` the scaled sine-kernel form.
    """
    lam = _log_height(t)
    u = np.asarray(u, dtype=np.float64)
    if form == "sinc":
        d = lam / TWO_PI
        return _scalar(-(d**2) * np.sinc(d * u) ** 2)
    if form != "closed":
        raise InvalidArgumentError(f"unknown form {form!r}")
    return _scalar(-0.5 * _sin2_over_u2(u, lam) / math.pi**2)


# ---------------------------------------------------------------------------
# t-averages over [0, T]

def density_sq_tavg(T):
    """(1/T) int_0^T (log(t/2pi)/2pi)^2 dt = (l^2 - 2 l + 2)/(4 pi^2), l = log(T/2pi)."""
    ell = math.log(T / TWO_PI)
    return (ell * ell - 2 * ell + 2) / (4 * math.pi**2)


def _m_term(u, ell):
    """(1/T) int_0^T -2 sin^2(u lambda/2)/u^2 dt in a form stable at u = 0."""
    u = np.asarray(u, dtype=np.float64)
    small = np.abs(u) < 1e-4
    us = np.where(small, 1.0, u)
    sin_over_u = np.where(small, ell * (1 - (u * ell) ** 2 / 6), np.sin(u * ell) / us)
    return (-_sin2_over_u2(u, ell) - 1 + sin_over_u) / (1 + u * u)


def _osc_avg(u, ell, c):
    # (1/T) int_0^T Re((t/2pi)^{-iu} C) dt = Re(C e^{-iu l} / (1 - iu))
    return np.real(c * np.exp(-1j * u * ell) / (1 - 1j * u))


def tavg_components(T, u, ctx: KernelContext, tabulated: bool = True):
    """t-averaged building blocks at height T: (P, osc, M) / (2 pi^2)."""
    if T <= TWO_PI:
        raise DomainError("t-averages need T > 2 pi")
    ell = math.log(T / TWO_PI)
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    p, c = ctx.parts(u) if tabulated else ctx.parts_direct(np.abs(u))
    if not tabulated:
        c = np.where(u < 0, np.conj(c), c)
    return INV_2PI2 * p, INV_2PI2 * _osc_avg(u, ell, c), INV_2PI2 * _m_term(u, ell)


def q_kernel_tavg(T, u, ctx: KernelContext, tabulated: bool = False):
    """(1/T) int_0^T Q_t(u) dt in closed form."""
    p, osc, m = tavg_components(T, u, ctx, tabulated)
    out = p + osc + m
    return float(out[0]) if np.ndim(u) == 0 else out


def q_tilde_tavg(T, u, ctx: KernelContext, tabulated: bool = False):
    p, _, m = tavg_components(T, u, ctx, tabulated)
    out = p + m
    return float(out[0]) if np.ndim(u) == 0 else out


def gue_tavg(T, u):
    ell = math.log(T / TWO_PI)
    return _scalar(INV_2PI2 * _m_term(u, ell))


def prediction_profile(T, u, ctx: KernelContext, kernel: str = "Q"):
    """Pair density prediction (1/T) int_0^T (lambda/2pi)^2 + kernel_t(u) dt."""
    return density_sq_tavg(T) + _avg_kernel(T, np.atleast_1d(np.asarray(u, dtype=np.float64)), ctx, kernel)


def _avg_kernel(T, u, ctx, kernel):
    p, osc, m = tavg_components(T, u, ctx, True)
    table = {
        "Q": p + osc + m,
        "Qtilde": p + m,
        "K": m,
        "D1": p + osc,  # Q - K
        "D2": osc,  # Q - Qtilde
        "D3": p,  # Qtilde - K
    }
    if kernel not in table:
        raise InvalidArgumentError(f"unknown kernel {kernel!r}")
    return table[kernel]


# ---------------------------------------------------------------------------
# integrals against a test function

@dataclass(frozen=True)
class KernelValue:
    """An integrated prediction with its error estimate and parts."""

    value: float
    error: float
    components: dict


def _outer_nodes(U, freq):
    width = min(0.5, math.pi / max(freq, 1e-9))
    n_pan = max(1, int(math.ceil(U / width)))
    edges = np.linspace(0.0, U, n_pan + 1)
    out = []
    for n_gl in (20, 10):
        x, w = np.polynomial.legendre.leggauss(n_gl)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        out.append(((mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()))
    return out


def _cut_radius(omega: TestFunction, ctx: KernelContext):
    try:
        return omega.decay_radius(1e-10), 1e-10
    except BandLimitError:
        # not band-limited (Montgomery's weight): cut at the table edge
        U = ctx.u_table_max
        return U, abs(float(np.real(omega.eval(U))))


def integrate_kernel(omega: TestFunction, alpha: float, T: float, ctx: KernelContext, kernel: str = "Q",
                     include_density: bool = True, tol: float = 1e-9) -> KernelValue:
    """int omega(u) e(alpha (log T / 2 pi) u) [density^2 + kernel](u) du for even omega.

    The density term uses omega's hat in closed form:
    int omega(u) e(u xi) du = hat(-xi).
    """
    if omega.parity != "even":
        raise InvalidArgumentError("prediction integrals need an even test function")
    if T <= TWO_PI:
        raise DomainError("T must exceed 2 pi")
    if abs(alpha) >= 1:
        warnings.warn("|alpha| >= 1 lies outside the range where the prediction is proven", stacklevel=2)
    a = alpha * math.log(T)
    ell = math.log(T / TWO_PI)
    U, edge = _cut_radius(omega, ctx)
    (x20, w20), (x10, w10) = _outer_nodes(U, abs(a) + ell + 1.0)
    vals = []
    for x, w in ((x20, w20), (x10, w10)):
        kern = _avg_kernel(T, x, ctx, kernel)
        om = np.real(omega.eval(x))
        vals.append(2 * math.fsum(w * om * np.cos(a * x) * kern))
    quad_err = abs(vals[0] - vals[1])
    sup_k = float(np.max(np.abs(_avg_kernel(T, np.linspace(0, U, 64), ctx, kernel))))
    tail = 2 * edge * sup_k * max(U, 1.0)
    err = quad_err + tail + 2 * U * ctx.table_error * float(np.max(np.abs(np.real(omega.eval(x20)))))
    dens = 0.0
    if include_density and kernel in ("Q", "Qtilde", "K"):
        dens = density_sq_tavg(T) * float(np.real(omega.eval_hat(-a / TWO_PI)))
    scale = max(1.0, abs(vals[0]) + abs(dens))
    if quad_err > tol * scale * 1e3:
        raise AccuracyError(f"outer quadrature did not settle (estimate {quad_err:.2e})", quad_err)
    return KernelValue(dens + vals[0], err, {"density": dens, "kernel": vals[0], "cut": U, "quad_err": quad_err})


def pair_prediction(omega: TestFunction, alpha: float, T: float, ctx: KernelContext, kernel: str = "Q") -> KernelValue:
    """Right side of the averaged pair-correlation statement.

    ``kernel`` may be "Q" (default), "Qtilde" or "K" (the naive GUE
    extension).
    """
    return integrate_kernel(omega, alpha, T, ctx, kernel)


def prediction_delta(omega: TestFunction, alpha: float, T: float, kind: str, ctx: KernelContext) -> KernelValue:
    """Delta_1 (Q - K), Delta_2 (Q - Q~) or Delta_3 (Q~ - K), integrated against omega."""
    key = {"D1": "D1", "delta1": "D1", "1": "D1", "D2": "D2", "delta2": "D2", "2": "D2",
           "D3": "D3", "delta3": "D3", "3": "D3"}.get(str(kind))
    if key is None:
        raise InvalidArgumentError(f"unknown delta kind {kind!r}")
    return integrate_kernel(omega, alpha, T, ctx, key, include_density=False)


def c_k_series(u, ctx: KernelContext, k_max: int = 60) -> float:
    """Re(zeta'/zeta)'(1+iu) + 1/u^2 + sum_{k>=2} c_k Re(zeta'/zeta)'(k + iku).

    This uses only zeta values and the Moebius coefficients, no primes; it
    equals 2 pi^2 (Q~_t - K_t)(u).
    """
    u = float(u)
    total = special.logderiv_prime_regular(1 + 1j * u, ctx.em_cfg).real
    for k in range(2, k_max + 1):
        ck = arithmetic.mobius_coefficient_c(k)
        if ck == 0:
            continue
        term = ck * special.zeta_logderiv_prime(k * (1 + 1j * u), ctx.em_cfg).value.real
        total += term
        if abs(term) < 1e-18 and k > 10:
            break
    return total


def windowed_prediction(r1: TestFunction, r2: TestFunction, alpha1: float, alpha2: float, T: float,
                        ctx: KernelContext, L: float | None = None, level: float = 1e-8) -> KernelValue:
    """int int [(lambda_T/2pi)^2 + Q_T(v1 - v2)] r1(v1/2pi) r2(v2/2pi) e(alpha1 L v1/2pi + alpha2 L v2/2pi).

    With W(eta) = r1_hat(eta - alpha1 L) r2_hat(-eta - alpha2 L) the double
    integral collapses to lambda^2 r1_hat(-alpha1 L) r2_hat(-alpha2 L)
    + int Q_T(v) R(v) dv, R(v) = 2 pi int W(eta) e^{i v eta} d eta.
    """
    L = math.log(T) if L is None else float(L)
    lam = math.log(T / TWO_PI)
    b1, b2 = r1.require_band_limited(), r2.require_band_limited()
    lo = max(r1.support[0] + alpha1 * L, -r2.support[1] - alpha2 * L)
    hi = min(r1.support[1] + alpha1 * L, -r2.support[0] - alpha2 * L)
    dens = lam**2 * complex(r1.eval_hat(-alpha1 * L)) * complex(r2.eval_hat(-alpha2 * L))
    if hi <= lo:
        return KernelValue(dens.real, 0.0, {"density": dens.real, "kernel": 0.0})
    x, w = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(lo, hi, 33)
    half = 0.5 * np.diff(edges)
    eta = (0.5 * (edges[1:] + edges[:-1])[:, None] + half[:, None] * x).ravel()
    weta = (half[:, None] * w).ravel() * r1.eval_hat(eta - alpha1 * L) * r2.eval_hat(-eta - alpha2 * L)

    def R(v):
        out = np.empty(v.shape, dtype=np.complex128)
        for s in range(0, v.size, 1024):
            out[s : s + 1024] = TWO_PI * (np.exp(1j * np.outer(v[s : s + 1024], eta)) @ weta)
        return out

    V = TWO_PI * max(r1.decay_radius(level), r2.decay_radius(level))
    reach = max(abs(lo), abs(hi)) + lam + 1.0
    vals = []
    for n_gl in (20, 10):
        gx, gw = np.polynomial.legendre.leggauss(n_gl)
        m = int(math.ceil(2 * V / min(0.5, math.pi / reach)))
        e = np.linspace(-V, V, m + 1)
        h = 0.5 * np.diff(e)
        v = (0.5 * (e[1:] + e[:-1])[:, None] + h[:, None] * gx).ravel()
        wv = (h[:, None] * gw).ravel()
        q = q_kernel(T, v, ctx, path="table")
        vals.append(complex(math.fsum((wv * q * R(v)).real.tolist()), math.fsum((wv * q * R(v)).imag.tolist())))
    err = abs(vals[0] - vals[1]) + 2 * V * ctx.table_error * float(np.sum(np.abs(weta))) * TWO_PI
    total = dens + vals[0]
    return KernelValue(total.real if abs(total.imag) < 1e-12 * max(1.0, abs(total)) else total, err,
                       {"density": dens, "kernel": vals[0], "cut": V})
