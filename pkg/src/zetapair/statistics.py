"""Empirical pair statistics over computed zero ordinates.

All pair sweeps work on the sorted ordinate array in fixed blocks of
``BLOCK`` consecutive left indices.  Each block walks the offsets
k = 1, 2, ... until every difference in the block exceeds the truncation
radius, and reduces its terms with ``math.fsum`` (exactly rounded).  Block
partials are then combined with another ``fsum`` in block order.  Because
the block boundaries never depend on the worker count, results are
bit-identical for any ``threads`` value.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BandLimitError, InvalidArgumentError, PreconditionError
from .testfn import TestFunction
from .zeros import ZeroList

TWO_PI = 2 * math.pi
BLOCK = 2048
TRUNCATION_LEVEL = 1e-8


@dataclass(frozen=True)
class PairSumResult:
    value: complex
    pairs_used: int
    truncation_radius: float
    neglected_bound: float
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Histogram:
    """Counts of positive differences in right-closed bins (lo + k w, lo + (k+1) w]."""

    bin_width: float
    origin: float
    counts: np.ndarray
    range: tuple

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.bin_width * np.arange(self.counts.size + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[1:] + e[:-1])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


# ---------------------------------------------------------------------------
# preconditions

def _require_prefix(zeros: ZeroList, T: float) -> np.ndarray:
    """Ordinates in (0, T], insisting the list is complete there."""
    if not zeros.turing_verified:
        raise PreconditionError("zero list is not Turing-verified; run zeros-verify first")
    if zeros.lower > 0 or zeros.count_offset:
        raise PreconditionError(f"zero list starts at {zeros.lower}, statistics over (0, T] need it to start at 0")
    if zeros.height_covered < T:
        raise PreconditionError(f"zero list covers heights up to {zeros.height_covered:.6g} < T = {T:.6g}")
    g = np.asarray(zeros.ordinates, dtype=np.float64)
    return g[: int(np.searchsorted(g, T, side="right"))]


def truncation_radius(omega: TestFunction, level: float = TRUNCATION_LEVEL) -> float:
    """Smallest U with |omega(u)| <= level for |u| >= U; infinite when omega is not band-limited."""
    try:
        return float(omega.decay_radius(level))
    except BandLimitError:
        return math.inf


# ---------------------------------------------------------------------------
# the sweep

def _block_diffs(g: np.ndarray, i0: int, i1: int, radius: float):
    """Yield positive differences g[i+k] - g[i] <= radius for i in [i0, i1), k = 1, 2, ..."""
    n = g.size
    k = 1
    while i0 + k < n:
        hi = min(i1, n - k)
        d = g[i0 + k : hi + k] - g[i0:hi]
        keep = d <= radius
        if not keep.any():
            return
        yield d[keep] if not keep.all() else d
        k += 1


def _run_blocks(g: np.ndarray, work, threads: int):
    starts = list(range(0, g.size, BLOCK))
    if threads <= 1 or len(starts) <= 1:
        return [work(i0, min(i0 + BLOCK, g.size)) for i0 in starts]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(lambda i0: work(i0, min(i0 + BLOCK, g.size)), starts))


def _fsum(arrays) -> float:
    parts = [math.fsum(a.tolist()) for a in arrays if a.size]
    return math.fsum(parts)


def weighted_pair_total(g: np.ndarray, weight, radius: float, threads: int = 1):
    """Sum over ordered pairs i != j with |g_i - g_j| <= radius of weight(g_i - g_j).

    ``weight`` maps an array of positive differences d to the combined
    contribution of both orders, weight(d) + weight(-d), as a complex
    array.  Returns (total, pairs) where pairs counts ordered pairs.
    """

    def work(i0, i1):
        re, im, cnt = [], [], 0
        for d in _block_diffs(g, i0, i1, radius):
            w = weight(d)
            re.append(np.real(w))
            if np.iscomplexobj(w):
                im.append(np.imag(w))
            cnt += d.size
        return _fsum(re), _fsum(im), cnt

    res = _run_blocks(g, work, threads)
    total = complex(math.fsum(r[0] for r in res), math.fsum(r[1] for r in res))
    return total, 2 * sum(r[2] for r in res)


# ---------------------------------------------------------------------------
# public statistics

def pair_sum(zeros: ZeroList, omega: TestFunction, alpha: float, T: float, L: float | None = None,
             threads: int = 1, radius: float | None = None) -> PairSumResult:
    """(1/T) sum over ordered pairs 0 < g != g' <= T of omega(g - g') e(alpha L (g - g') / 2 pi).

    L defaults to log T.  Pairs farther apart than the truncation radius of
    omega are dropped; ``neglected_bound`` bounds their total contribution.
    """
    g = _require_prefix(zeros, T)
    L = math.log(T) if L is None else float(L)
    freq = alpha * L  # e(alpha L d / 2 pi) = exp(i freq d)
    U = truncation_radius(omega) if radius is None else float(radius)
    if omega.parity == "even":

        def weight(d):
            return 2 * np.real(omega.eval(d)) * np.cos(freq * d)
    else:

        def weight(d):
            ph = np.exp(1j * freq * d)
            return omega.eval(d) * ph + omega.eval(-d) * np.conj(ph)

    total, pairs = weighted_pair_total(g, weight, U, threads)
    n = g.size
    dropped = n * (n - 1) - pairs
    sup_tail = TRUNCATION_LEVEL if radius is None else float(np.max(np.abs(omega.eval(np.array([U])))))
    bound = sup_tail * dropped / T if math.isfinite(U) else 0.0
    value = total / T
    if omega.parity == "even":
        value = complex(value.real, 0.0)
    return PairSumResult(value, int(pairs), float(U), float(bound),
                         {"T": T, "L": L, "alpha": alpha, "zeros_used": int(n), "omega": omega.name})


def pair_sum_bruteforce(zeros: ZeroList, omega: TestFunction, alpha: float, T: float, L: float | None = None) -> complex:
    """The same double sum over all ordered pairs, O(N^2) memory; an oracle for small lists."""
    g = _require_prefix(zeros, T)
    L = math.log(T) if L is None else float(L)
    d = g[:, None] - g[None, :]
    off = ~np.eye(g.size, dtype=bool)
    vals = omega.eval(d[off]) * np.exp(1j * alpha * L * d[off])
    return complex(math.fsum(np.real(vals).tolist()), math.fsum(np.imag(vals).tolist())) / T


def _montgomery_w(d):
    return 4.0 / (4.0 + d * d)


def montgomery_F(zeros: ZeroList, alpha, T: float, threads: int = 1):
    """(2 pi / (T log T)) sum over 0 < g, g' <= T of T^{i alpha (g - g')} w(g - g').

    The diagonal g = g' is included.  Every pair is summed (w decays only
    like 1/u^2, so no truncation is applied).  ``alpha`` may be an array.
    """
    g = _require_prefix(zeros, T)
    alphas = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    logT = math.log(T)
    freqs = alphas * logT

    def work(i0, i1):
        acc = [[] for _ in freqs]
        for d in _block_diffs(g, i0, i1, math.inf):
            w = 2 * _montgomery_w(d)
            for j, f in enumerate(freqs):
                acc[j].append(w * np.cos(f * d))
        return [_fsum(a) for a in acc]

    res = _run_blocks(g, work, threads)
    out = np.array([math.fsum([g.size] + [r[j] for r in res]) for j in range(freqs.size)])
    out *= TWO_PI / (T * logT)
    return float(out[0]) if np.ndim(alpha) == 0 else out


def montgomery_F_bruteforce(zeros: ZeroList, alpha: float, T: float) -> float:
    g = _require_prefix(zeros, T)
    d = g[:, None] - g[None, :]
    vals = _montgomery_w(d) * np.cos(alpha * math.log(T) * d)
    return TWO_PI / (T * math.log(T)) * math.fsum(vals.ravel().tolist())


def montgomery_F_reference(alpha, T: float):
    """alpha + T^{-2 alpha} log T, the large-T shape of F on 0 < alpha < 1."""
    a = np.abs(np.asarray(alpha, dtype=np.float64))
    return a + T ** (-2 * a) * math.log(T)


def diff_histogram(zeros: ZeroList, bin_width: float, range: tuple = (0.0, 30.0), threads: int = 1) -> Histogram:
    """Histogram of the positive differences g - g' (g > g') in right-closed bins."""
    lo, hi = float(range[0]), float(range[1])
    if not bin_width > 0:
        raise InvalidArgumentError("bin_width must be positive")
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise InvalidArgumentError("histogram range must be finite with hi > lo")
    nbins = int(round((hi - lo) / bin_width))
    if nbins < 1 or abs(nbins * bin_width - (hi - lo)) > 1e-9 * max(1.0, hi - lo):
        raise InvalidArgumentError("range length must be a whole number of bins")
    g = np.asarray(zeros.ordinates, dtype=np.float64)

    def work(i0, i1):
        counts = np.zeros(nbins, dtype=np.int64)
        for d in _block_diffs(g, i0, i1, hi):
            d = d[d > lo]
            idx = np.ceil((d - lo) / bin_width).astype(np.int64) - 1
            np.clip(idx, 0, nbins - 1, out=idx)
            counts += np.bincount(idx, minlength=nbins)
        return counts

    counts = np.sum(_run_blocks(g, work, threads), axis=0) if g.size > 1 else np.zeros(nbins, dtype=np.int64)
    return Histogram(float(bin_width), lo, np.asarray(counts, dtype=np.int64), (lo, hi))


def moving_average(x: np.ndarray, width: int = 5) -> np.ndarray:
    """Centered moving average; the ends use the shorter available window."""
    x = np.asarray(x, dtype=np.float64)
    half = width // 2
    c = np.concatenate([[0.0], np.cumsum(x)])
    i = np.arange(x.size)
    a = np.maximum(i - half, 0)
    b = np.minimum(i + half + 1, x.size)
    return (c[b] - c[a]) / (b - a)


def local_minima(x: np.ndarray) -> np.ndarray:
    """Indices of strict interior local minima (plateaus count once, at their middle)."""
    x = np.asarray(x)
    out = []
    i = 1
    while i < x.size - 1:
        j = i
        while j + 1 < x.size - 1 and x[j + 1] == x[i]:
            j += 1
        if x[i - 1] > x[i] and x[j + 1] > x[j]:
            out.append((i + j) // 2)
        i = j + 1
    return np.asarray(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# windowed statistic

def _window_sums(g, t, r: TestFunction, freq, radius):
    """sum over g with |g - t| <= radius of r((g - t)/2pi) exp(i freq (g - t)), for each t."""
    lo = np.searchsorted(g, t - radius, side="left")
    hi = np.searchsorted(g, t + radius, side="right")
    width = int(np.max(hi - lo)) if t.size else 0
    out = np.zeros(t.size, dtype=np.complex128)
    for k in np.arange(width):
        idx = lo + k
        ok = idx < hi
        if not ok.any():
            break
        nu = g[np.where(ok, idx, 0)] - t
        val = r.eval(nu / TWO_PI) * np.exp(1j * freq * nu)
        out += np.where(ok, val, 0.0)
    return out


def windowed_pair_statistic(zeros: ZeroList, r1: TestFunction, r2: TestFunction, sigma: TestFunction,
                            T: float, H: float, alpha1: float, alpha2: float, L: float | None = None,
                            gl_nodes: int = 10, level: float = TRUNCATION_LEVEL) -> complex:
    """(1/H) int sigma((t-T)/H) sum_{g != g'} r1((g-t)/2pi) r2((g'-t)/2pi) e(...) dt.

    The inner double sum is evaluated in product form,
    S1(t) S2(t) - sum_g r1 r2 (...), so each t costs O(zeros in window).
    The t-integral uses Gauss-Legendre panels of width min(mean gap, H/50)
    over |t - T| <= H * (decay radius of sigma).  Zeros farther from t
    than where r1, r2 drop below ``level`` are skipped.
    """
    if H > T or H <= 0:
        raise InvalidArgumentError("need 0 < H <= T")
    if abs(sigma.mass - 1) > 1e-9:
        raise InvalidArgumentError("sigma must have mass 1")
    L = math.log(T) if L is None else float(L)
    f1, f2 = alpha1 * L, alpha2 * L
    rad_r = TWO_PI * max(truncation_radius(r1, level), truncation_radius(r2, level))
    rad_s = H * truncation_radius(sigma)
    if not (math.isfinite(rad_r) and math.isfinite(rad_s)):
        raise BandLimitError("windowed statistic needs band-limited r1, r2 and sigma")
    need = (T - rad_s - rad_r, T + rad_s + rad_r)
    have_lo = zeros.lower if zeros.count_offset or zeros.lower > 0 else 0.0
    if not zeros.turing_verified or need[1] > zeros.height_covered or (need[0] > 0 and need[0] < have_lo):
        raise PreconditionError(f"zero coverage insufficient: need a verified list over [{max(need[0], 0):.6g}, {need[1]:.6g}]")
    g = np.asarray(zeros.ordinates, dtype=np.float64)
    t, wt = _t_rule(T, H, rad_s, gl_nodes)
    total = 0j
    for s in range(0, t.size, 20000):
        ts = t[s : s + 20000]
        s1 = _window_sums(g, ts, r1, f1, rad_r)
        s2 = _window_sums(g, ts, r2, f2, rad_r)
        diag = _window_sums(g, ts, _product(r1, r2), f1 + f2, rad_r)
        integrand = np.real(sigma.eval((ts - T) / H)) * (s1 * s2 - diag)
        total += complex(math.fsum((wt[s : s + 20000] * integrand.real).tolist()),
                         math.fsum((wt[s : s + 20000] * integrand.imag).tolist()))
    return total / H


def _t_rule(T, H, rad_s, gl_nodes):
    gap = TWO_PI / math.log(max(T, 4 * TWO_PI) / TWO_PI)
    width = min(gap, H / 50)
    a, b = T - rad_s, T + rad_s
    n_pan = int(math.ceil((b - a) / width))
    edges = np.linspace(a, b, n_pan + 1)
    x, w = np.polynomial.legendre.leggauss(gl_nodes)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def windowed_pair_statistic_bruteforce(zeros: ZeroList, r1: TestFunction, r2: TestFunction, sigma: TestFunction,
                                       T: float, H: float, alpha1: float, alpha2: float, L: float | None = None,
                                       gl_nodes: int = 10) -> complex:
    """Oracle: the full N x N double sum over every listed zero at each t node.

    Shares only the t-quadrature rule with :func:`windowed_pair_statistic`;
    there is no windowing in gamma and no product-form shortcut.  Cost is
    O(N^2) per node, so keep N in the hundreds.
    """
    L = math.log(T) if L is None else float(L)
    f1, f2 = alpha1 * L, alpha2 * L
    t, wt = _t_rule(T, H, H * truncation_radius(sigma), gl_nodes)
    g = np.asarray(zeros.ordinates, dtype=np.float64)
    sig = np.real(sigma.eval((t - T) / H))
    vals = np.empty(t.size, dtype=np.complex128)
    for k, tk in enumerate(t):
        nu = g - tk
        a = r1.eval(nu / TWO_PI) * np.exp(1j * f1 * nu)
        b = r2.eval(nu / TWO_PI) * np.exp(1j * f2 * nu)
        m = np.outer(a, b)
        np.fill_diagonal(m, 0.0)
        vals[k] = m.sum()
    terms = wt * sig * vals
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist())) / H


class _product:
    """Pointwise product r1 * r2, exposing only what _window_sums needs."""

    def __init__(self, a: TestFunction, b: TestFunction):
        self.a, self.b = a, b

    def eval(self, u):
        return self.a.eval(u) * self.b.eval(u)
