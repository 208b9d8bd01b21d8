"""Band-limited test functions.

Conventions: e(x) = exp(2 pi i x), the transform is
f_hat(xi) = int f(x) e(-x xi) dx, so the time side is recovered as
f(u) = int f_hat(xi) e(u xi) dxi.  A TestFunction is specified by its
``hat`` (compactly supported, closed form) and evaluates the time side
either in closed form or from a table of Chebyshev panels built once by
Gauss-Legendre quadrature of the hat.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _cheb
from .errors import BandLimitError, InvalidArgumentError

TWO_PI = 2 * math.pi

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_CHEB_N = 18  # nodes per panel
TABLE_FLOOR = 1e-13  # |f| bound beyond the tabulated range
_TABLE_CAP = 1000.0


def _gl_rule(lo: float, hi: float, u_max: float):
    """Composite Gauss-Legendre nodes/weights on [lo, hi], fine enough for e(u xi), |u| <= u_max."""
    cycles = (hi - lo) * max(u_max, 1.0)
    n_pan = int(math.ceil(cycles / 1.5)) + 4
    edges = np.linspace(lo, hi, n_pan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return x, w


@dataclass(eq=False)
class TestFunction:
    """A band-limited test function known on both sides of the transform.

    ``hat`` is vectorized and vanishes outside ``support``.  ``time`` is an
    optional closed form for the time side; without it the time side is
    tabulated on first use.  ``smooth`` records whether the hat is C-infinity
    (the Fejer hat is only continuous).
    """

    __test__ = False  # keep pytest from collecting the class

    name: str
    hat: object
    support: tuple
    parity: str = "even"
    smooth: bool = True
    time: object = None
    hat_dd: object = None
    params: dict = field(default_factory=dict)
    normalization: float = 1.0
    shift: float = 0.0
    tolerance: float = 1e-10
    _table: _cheb.Panels | None = field(default=None, repr=False)
    _decay: dict = field(default_factory=dict, repr=False)

    @property
    def band_limit(self) -> float:
        return max(abs(self.support[0]), abs(self.support[1]))

    @property
    def mass(self) -> float:
        """hat(0), which equals the integral of the time side."""
        return float(np.real(self.eval_hat(0.0)))

    def require_band_limited(self) -> float:
        if not math.isfinite(self.band_limit):
            raise BandLimitError(f"{self.name} is not band-limited")
        return self.band_limit

    # -- hat side ---------------------------------------------------------
    def eval_hat(self, xi):
        xi = np.asarray(xi, dtype=np.float64)
        out = self.hat(xi)
        return out if np.ndim(out) else float(out) if np.isrealobj(out) else complex(out)

    def eval_hat_dd(self, xi):
        if self.hat_dd is None:
            raise InvalidArgumentError(f"{self.name} has no closed-form second derivative of its hat")
        return self.hat_dd(np.asarray(xi, dtype=np.float64))

    # -- time side --------------------------------------------------------
    def eval(self, u):
        """f(u) = int hat(xi) e(u xi) dxi."""
        u = np.asarray(u, dtype=np.float64)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        if self.time is not None:
            out = self.time(u)
        else:
            au = np.abs(u)
            out = np.empty(u.shape)
            tab = self._ensure_table()
            inside = au <= tab.u_max
            if np.any(inside):
                out[inside] = tab(au[inside])
            # past the table the time side is below TABLE_FLOOR (checked by the
            # decay scan that sized the table); it is returned as 0 unless the
            # table hit its size cap, where quadrature takes over
            if np.any(~inside):
                out[~inside] = self._quadrature_even(au[~inside]) if tab.u_max >= _TABLE_CAP else 0.0
            out = out * self.normalization
        if self.shift:
            out = out * np.exp(2j * math.pi * self.shift * u)
        if scalar:
            v = out[0]
            return complex(v) if np.iscomplexobj(out) else float(v)
        return out

    __call__ = eval

    @property
    def interpolation_error(self) -> float:
        """Certified absolute error of the time side (0 for closed forms)."""
        if self.time is not None:
            return 0.0
        return max(self._ensure_table().error, TABLE_FLOOR) * abs(self.normalization)

    def _base_hat(self, xi):
        # hat before shifting and normalization, used for tabulation
        return self.hat(np.asarray(xi) + self.shift) / self.normalization

    def _quadrature_even(self, u: np.ndarray) -> np.ndarray:
        """2 int_0^b hat(xi) cos(2 pi u xi) dxi, blocked by |u|."""
        b = self.support[1] - self.shift
        out = np.empty(u.shape)
        order = np.argsort(u)
        us = u[order]
        res = np.empty(us.shape)
        start = 0
        while start < us.size:
            u_hi = max(us[start] * 2.0, us[start] + 8.0)
            stop = int(np.searchsorted(us, u_hi, side="right"))
            x, w = _gl_rule(0.0, b, u_hi)
            hw = w * self._base_hat(x)
            blk = us[start:stop]
            rows = max(1, 4_000_000 // x.size)
            for j in range(0, blk.size, rows):
                sub = blk[j : j + rows]
                res[start + j : start + j + sub.size] = 2 * np.cos(TWO_PI * np.outer(sub, x)) @ hw
            start = stop
        out[order] = res
        return out

    def _ensure_table(self) -> _cheb.Panels:
        if self._table is not None:
            return self._table
        if self.parity != "even" and not self.shift:
            raise InvalidArgumentError("tabulated time side needs an even hat")
        b = self.support[1] - self.shift
        u_max = self._table_range()
        width = min(0.75 / b, 1.0)
        n_pan = int(math.ceil(u_max / width))
        nodes = _cheb.nodes(width, n_pan, _CHEB_N)
        vals = self._quadrature_even(nodes.ravel()).reshape(n_pan, _CHEB_N)
        self._table = _cheb.Panels.from_values(width, vals)
        return self._table

    def _table_range(self) -> float:
        # tabulate until the time side is negligible, capped at |u| = 1000
        u0 = self.decay_radius(TABLE_FLOOR)
        return float(min(_TABLE_CAP, max(8.0, 1.1 * u0 + 2.0)))

    def decay_radius(self, level: float = 1e-8) -> float:
        """Smallest U0 with |f(u)| <= level for |u| >= U0 (measured on a scan).

        The scan runs outward over blocks [U, 2U] until a whole block stays
        below level / 10 (or the quadrature noise floor), capped at |u| = 512.
        """
        if level in self._decay:
            return self._decay[level]
        if not math.isfinite(self.band_limit):
            raise BandLimitError(f"{self.name} is not band-limited; no finite decay radius")
        b = max(self.support[1] - self.shift, 1e-3)
        step = 0.125 / b
        if self.time is not None:
            scale = abs(float(np.real(self.time(np.zeros(1))[0])))
        else:
            scale = abs(float(self._quadrature_even(np.zeros(1))[0]))
        noise = 1e-14 * max(1.0, scale)
        last_above = 0.0
        lo = 0.0
        hi = 8.0
        while True:
            grid = np.arange(lo, hi, step)
            if self.time is not None:
                vals = np.abs(self.time(grid))
            else:
                vals = np.abs(self._quadrature_even(grid) * self.normalization)
            above = np.nonzero(vals > level)[0]
            if above.size:
                last_above = grid[above[-1]] + step
            if vals.max() < max(level / 10, noise) or hi >= 512:
                break
            lo, hi = hi, 2 * hi
        self._decay[level] = float(last_above)
        return float(last_above)

    def shifted(self, x0: float) -> "TestFunction":
        """hat(xi - x0); the time side picks up the factor e(u x0)."""
        if self.shift:
            raise InvalidArgumentError("shift an unshifted function")
        base = self
        sh = float(x0)
        return TestFunction(
            name=f"{self.name}@{sh:g}",
            hat=lambda xi: base.hat(np.asarray(xi) - sh),
            support=(self.support[0] + sh, self.support[1] + sh),
            parity="none" if sh else self.parity,
            smooth=self.smooth,
            time=None if self.time is None else self.time,
            hat_dd=None if self.hat_dd is None else (lambda xi: base.hat_dd(np.asarray(xi) - sh)),
            params={**self.params, "shift": sh},
            normalization=self.normalization,
            shift=sh,
            tolerance=self.tolerance,
            _table=self._table,
            _decay=dict(self._decay),
        )


def make_fejer(scale: float = 1.0) -> TestFunction:
    """Fejer pair: hat (1 - |xi|/scale)_+ / scale  <->  (sin(pi scale u) / (pi scale u))^2.

    The 1/scale factor keeps f(0) = 1; it is recorded as ``normalization``.
    The hat has corners, so ``smooth`` is False.
    """
    s = float(scale)
    if not s > 0:
        raise InvalidArgumentError("fejer scale must be positive")

    def hat(xi):
        return np.maximum(1 - np.abs(xi) / s, 0.0) / s

    def time(u):
        return np.sinc(s * np.asarray(u)) ** 2

    return TestFunction(name=f"fejer(scale={s:g})", hat=hat, support=(-s, s), smooth=False,
                        time=time, params={"scale": s}, normalization=1.0 / s)


def make_smooth_bump(band_limit: float = 1.0, normalize_mass: bool = True) -> TestFunction:
    """hat(xi) = exp(1 - 1/(1 - (xi/b)^2)) on |xi| < b, else 0.

    With ``normalize_mass`` hat(0) = 1, i.e. the time side has mass 1;
    otherwise the factor e is dropped and hat(0) = 1/e.
    """
    b = float(band_limit)
    if not b > 0:
        raise InvalidArgumentError("band_limit must be positive")
    c = 1.0 if normalize_mass else 0.0

    def hat(xi):
        t = np.asarray(xi, dtype=np.float64) / b
        inside = np.abs(t) < 1
        q = 1.0 / (1.0 - np.where(inside, t * t, 0.0))
        return np.where(inside, np.exp(c - q), 0.0)

    def hat_dd(xi):
        t = np.asarray(xi, dtype=np.float64) / b
        inside = np.abs(t) < 1
        t2 = np.where(inside, t * t, 0.0)
        q = 1.0 / (1.0 - t2)
        h = np.exp(c - q)
        return np.where(inside, -2 * h * (q**2 + 4 * t2 * q**3 - 2 * t2 * q**4) / b**2, 0.0)

    return TestFunction(name=f"bump(band={b:g})", hat=hat, support=(-b, b), hat_dd=hat_dd,
                        params={"band": b, "normalize_mass": bool(normalize_mass)})


def montgomery_weight() -> TestFunction:
    """w(u) = 4/(4 + u^2) with hat 2 pi exp(-4 pi |xi|).  Not band-limited."""

    def hat(xi):
        return TWO_PI * np.exp(-4 * math.pi * np.abs(xi))

    def time(u):
        u = np.asarray(u, dtype=np.float64)
        return 4.0 / (4.0 + u * u)

    return TestFunction(name="montgomery-w", hat=hat, support=(-math.inf, math.inf), smooth=True,
                        time=time, params={})


def parse_spec(spec: str) -> TestFunction:
    """Build a test function from 'family:key=value,...' (fejer, bump, montgomery-w)."""
    family, _, rest = spec.strip().partition(":")
    kv = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        if "=" not in part:
            raise InvalidArgumentError(f"bad test-function parameter {part!r}")
        k, v = part.split("=", 1)
        kv[k.strip()] = v.strip()
    known = {"fejer": ("scale",), "bump": ("band", "normalize", "shift"), "montgomery-w": (), "montgomery": ()}
    if family not in known:
        raise InvalidArgumentError(f"unknown test-function family {family!r}")
    extra = sorted(set(kv) - set(known[family]))
    if extra:
        raise InvalidArgumentError(f"unknown parameters {extra} for {family}")
    try:
        if family == "fejer":
            return make_fejer(float(kv.get("scale", 1.0)))
        if family == "bump":
            norm = kv.get("normalize", "true").lower() not in ("0", "false", "no")
            f = make_smooth_bump(float(kv.get("band", 1.0)), norm)
            return f.shifted(float(kv["shift"])) if "shift" in kv else f
    except ValueError as exc:
        raise InvalidArgumentError(f"bad test-function spec {spec!r}: {exc}") from None
    return montgomery_weight()
