"""Zeros of zeta on the critical line: Hardy Z, zero search, Turing check, zero files.

Completeness is certified with Turing's method in the form

    |int_{t1}^{t2} S(t) dt| <= 2.067 + 0.059 log t2,   168 pi < t1 < t2,

(Trudgian 2011).  Found sign changes are genuine zeros, so the counting
function of a list can only undercount; integrating that undercount
against the bound on both sides of a height T pins N(T) to an integer
interval.  The list is complete below T when the interval collapses to the
number of listed ordinates.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from . import special
from ._constants import RS_REMAINDER, TURING_A, TURING_B, TURING_MIN_T
from ._rs_coeffs import RS_COEFFS
from .errors import DomainError, IncompleteListError, InvalidArgumentError, ParseError, PreconditionError

TWO_PI = 2 * math.pi
EM_RS_SWITCH = 1000.0
FIRST_ZERO_FLOOR = 14.0  # no zero ordinates in (0, 14]; classical

_RS_TABLE = np.zeros((len(RS_COEFFS), max(len(c) for c in RS_COEFFS)))
for _k, _c in enumerate(RS_COEFFS):
    _RS_TABLE[_k, : len(_c)] = _c


# ---------------------------------------------------------------------------
# Hardy Z

@njit(cache=True)
def _rs_kernel(t, theta, coeffs, n_corr):
    out = np.empty(t.shape[0])
    for i in range(t.shape[0]):
        ti = t[i]
        tau = math.sqrt(ti / (2 * math.pi))
        m = int(math.floor(tau))
        acc = 0.0
        for n in range(1, m + 1):
            acc += math.cos(theta[i] - ti * math.log(n)) / math.sqrt(n)
        z = tau - m - 0.5
        corr = 0.0
        inv = 1.0
        for k in range(n_corr + 1):
            row = coeffs[k]
            poly = 0.0
            for j in range(row.shape[0] - 1, -1, -1):
                poly = poly * z + row[j]
            corr += poly * inv
            inv /= tau
        sign = 1.0 if (m - 1) % 2 == 0 else -1.0
        out[i] = 2.0 * acc + sign * corr / math.sqrt(tau)
    return out


def _em_config(t: float) -> special.EulerMaclaurinConfig:
    return special.EulerMaclaurinConfig(cutoff=int(math.ceil(t / 2)) + 20, bernoulli_terms=12, target_abs_error=1e-10)


def _z_em(t: np.ndarray) -> np.ndarray:
    theta = special.rs_theta(t)
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        jet, _ = special._em_jet(complex(0.5, ti), _em_config(ti).cutoff, 12)
        out[i] = (np.exp(1j * theta[i]) * jet[0]).real
    return out


def hardy_z(t, method: str = "auto", corrections: int = 4):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it), real for real t.

    ``method="rs"`` uses the Riemann-Siegel main sum with ``corrections``
    remainder terms C_1..C_k (at most 4); ``"em"`` uses Euler-Maclaurin on
    the critical line; ``"auto"`` takes EM below t = 1000 and RS above.
    """
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(arr < 2):
        raise DomainError("hardy_z: requires t >= 2")
    if not 0 <= corrections < len(RS_COEFFS):
        raise InvalidArgumentError(f"corrections must be in [0, {len(RS_COEFFS) - 1}]")
    if method not in ("auto", "rs", "em"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    out = np.empty_like(arr)
    use_em = np.zeros(arr.shape, bool) if method == "rs" else (arr < EM_RS_SWITCH if method == "auto" else np.ones(arr.shape, bool))
    if np.any(~use_em):
        tr = np.ascontiguousarray(arr[~use_em])
        out[~use_em] = _rs_kernel(tr, special.rs_theta(tr), _RS_TABLE, corrections)
    if np.any(use_em):
        out[use_em] = _z_em(arr[use_em])
    return float(out[0]) if np.ndim(t) == 0 else out


def hardy_z_error_bound(t, method: str = "auto", corrections: int = 4):
    """Bound on |Z(t) - computed| for the chosen evaluation path."""
    t = np.asarray(t, dtype=np.float64)
    rs = RS_REMAINDER[corrections] * t ** (-(2 * corrections + 3) / 4)
    em = np.full_like(t, 1e-10)
    if method == "rs":
        return rs
    if method == "em":
        return em
    return np.where(t < EM_RS_SWITCH, em, rs)


# ---------------------------------------------------------------------------
# zero lists

@dataclass(frozen=True, eq=False)
class ZeroList:
    """Ascending zero ordinates with completeness metadata.

    ``lower``/``height_covered`` delimit the interval the list claims to
    cover; ``count_offset`` is N(lower), the number of ordinates at or below
    ``lower``, so absolute counts are ``count_offset + #(ordinates <= T)``.
    """

    ordinates: np.ndarray
    height_covered: float
    abs_error: np.ndarray
    provenance: str = "computed"
    turing_verified: bool = False
    lower: float = 0.0
    count_offset: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return int(self.ordinates.shape[0])

    def count_below(self, T: float) -> int:
        """N(T) implied by the list (absolute, using count_offset)."""
        return self.count_offset + int(np.searchsorted(self.ordinates, T, side="right"))

    def first(self, n: int) -> "ZeroList":
        """The first n ordinates, with coverage ending midway to the next one."""
        if n > len(self):
            raise PreconditionError(f"list holds {len(self)} ordinates, {n} requested")
        if n == len(self):
            return self
        top = 0.5 * (self.ordinates[n - 1] + self.ordinates[n])
        return replace(self, ordinates=self.ordinates[:n].copy(), abs_error=self.abs_error[:n].copy(), height_covered=float(top))

    def window(self, lo: float, hi: float) -> "ZeroList":
        i0 = int(np.searchsorted(self.ordinates, lo, side="right"))
        i1 = int(np.searchsorted(self.ordinates, hi, side="right"))
        return replace(self, ordinates=self.ordinates[i0:i1].copy(), abs_error=self.abs_error[i0:i1].copy(),
                       lower=float(lo), height_covered=float(hi), count_offset=self.count_offset + i0)


def mean_gap(t):
    """2 pi / log(t / 2 pi), floored so the grid stays sane at small heights."""
    t = np.asarray(t, dtype=np.float64)
    return TWO_PI / np.log(np.maximum(t, 4 * TWO_PI) / TWO_PI)


@dataclass(frozen=True)
class SearchConfig:
    points_per_gap: float = 4.0
    window_gaps: float = 40.0
    max_refinements: int = 3
    xtol: float = 1e-11
    method: str = "auto"


def _grid(lo: float, hi: float, per_gap: float) -> np.ndarray:
    pts = [lo]
    t = lo
    # step in chunks: the spacing is smooth so a vector of steps is fine
    while t < hi:
        chunk = t + np.cumsum(np.full(256, 1.0)) * float(mean_gap(t)) / per_gap
        pts.extend(chunk[chunk < hi].tolist())
        t = float(chunk[-1])
    pts.append(hi)
    return np.unique(np.asarray(pts))


def _suspicious(tg, zg):
    # interior grid points where |Z| dips without a sign change on either side
    a, b, c = zg[:-2], zg[1:-1], zg[2:]
    same = (np.sign(a) == np.sign(b)) & (np.sign(b) == np.sign(c))
    dip = (np.abs(b) < np.abs(a)) & (np.abs(b) < np.abs(c))
    return np.nonzero(same & dip)[0] + 1


def _scan(lo: float, hi: float, cfg: SearchConfig, density: float):
    """Sign-change brackets of Z on [lo, hi]."""
    tg = _grid(lo, hi, cfg.points_per_gap * density)
    zg = hardy_z(tg, cfg.method)
    for _ in range(2):
        sus = _suspicious(tg, zg)
        if sus.size == 0:
            break
        extra = np.concatenate([np.linspace(tg[i - 1], tg[i + 1], 18)[1:-1] for i in sus])
        extra = np.setdiff1d(extra, tg)
        tg = np.concatenate([tg, extra])
        zg = np.concatenate([zg, hardy_z(extra, cfg.method)])
        order = np.argsort(tg)
        tg, zg = tg[order], zg[order]
    exact = np.nonzero(zg == 0.0)[0]
    sc = np.nonzero(np.sign(zg[:-1]) * np.sign(zg[1:]) < 0)[0]
    return tg, zg, sc, exact


def _refine(a, b, fa, fb, cfg: SearchConfig):
    """Vectorized Illinois iteration on brackets [a, b] with fa*fb < 0."""
    a = a.copy()
    b = b.copy()
    fa = fa.copy()
    fb = fb.copy()
    side = np.zeros(a.shape, dtype=np.int8)
    active = np.ones(a.shape, bool)
    for it in range(100):
        active &= (b - a) > cfg.xtol
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        aa, bb, ffa, ffb = a[idx], b[idx], fa[idx], fb[idx]
        c = (aa * ffb - bb * ffa) / (ffb - ffa)
        bad = ~((c > aa) & (c < bb)) | (it % 8 == 7)
        c = np.where(bad, 0.5 * (aa + bb), c)
        fc = hardy_z(c, cfg.method)
        left = np.sign(fc) == np.sign(ffa)  # root lies in [c, b]
        hit = fc == 0
        # update
        new_a = np.where(left, c, aa)
        new_b = np.where(left, bb, c)
        new_fa = np.where(left, fc, ffa)
        new_fb = np.where(left, ffb, fc)
        s = side[idx]
        # Illinois: halve the retained endpoint's value when the same side moves twice
        new_fb = np.where(left & (s == 1), new_fb * 0.5, new_fb)
        new_fa = np.where(~left & (s == -1), new_fa * 0.5, new_fa)
        side[idx] = np.where(left, 1, -1)
        new_a = np.where(hit, c, new_a)
        new_b = np.where(hit, c, new_b)
        a[idx], b[idx], fa[idx], fb[idx] = new_a, new_b, new_fa, new_fb
    root = 0.5 * (a + b)
    width = b - a
    return root, width


def _locate(lo, hi, cfg, density):
    tg, zg, sc, exact = _scan(lo, hi, cfg, density)
    roots, width = _refine(tg[sc], tg[sc + 1], zg[sc], zg[sc + 1], cfg)
    roots = np.concatenate([roots, tg[exact]])
    width = np.concatenate([width, np.zeros(exact.size)])
    order = np.argsort(roots)
    roots, width = roots[order], width[order]
    # error: bracket width plus evaluation error over local slope
    h = 1e-6
    slope = np.abs(hardy_z(roots + h, cfg.method) - hardy_z(roots - h, cfg.method)) / (2 * h) if roots.size else roots
    zerr = hardy_z_error_bound(roots, cfg.method) if roots.size else roots
    err = width + zerr / np.maximum(slope, 1e-300)
    keep = (roots > lo) & (roots <= hi)
    return roots[keep], err[keep]


def _integral_smooth(a: float, b: float) -> float:
    x, w = np.polynomial.legendre.leggauss(64)
    n = max(1, int(math.ceil((b - a) / 10)))
    edges = np.linspace(a, b, n + 1)
    tot = 0.0
    for l, r in zip(edges[:-1], edges[1:]):
        tt = 0.5 * (r - l) * x + 0.5 * (r + l)
        tot += 0.5 * (r - l) * float(np.dot(w, special.smooth_count(tt)))
    return tot


def _integral_count(ords: np.ndarray, a: float, b: float, ref: float) -> float:
    """int_a^b c(t) dt, c(t) = #(ref, t] for t > ref and -#(t, ref] for t < ref."""
    if b <= ref:
        sel = ords[(ords > a) & (ords <= ref)]
        # each zero g in (a, ref] contributes -(g - a)
        return -float(np.sum(sel - a))
    sel = ords[(ords > ref) & (ords <= b)]
    return float(np.sum(b - sel))


def turing_bracket(ordinates: np.ndarray, listed_below: int, T: float, h: float, lower_known: bool):
    """Integer interval [lo, hi] containing N(T).

    ``listed_below`` is the number of genuine zeros known at or below T
    (always a lower bound).  The lower window is used only when it lies
    above 168 pi; the upper window must.
    """
    if T <= TURING_MIN_T:
        raise DomainError(f"Turing bracket needs T > 168 pi, got {T}")
    sm_up = _integral_smooth(T, T + h)
    up = (TURING_A + TURING_B * math.log(T + h) - (_integral_count(ordinates, T, T + h, T) - sm_up)) / h
    n_hi = math.floor(up + 1e-12)
    n_lo = listed_below
    if T - h > TURING_MIN_T and not lower_known:
        sm_dn = _integral_smooth(T - h, T)
        dn = (-TURING_A - TURING_B * math.log(T) - (_integral_count(ordinates, T - h, T, T) - sm_dn)) / h
        n_lo = max(n_lo, math.ceil(dn - 1e-12))
    return n_lo, n_hi


def _nudge(T: float, ords: np.ndarray) -> float:
    # keep the bracket height away from an ordinate
    i = np.searchsorted(ords, T)
    for j in (i - 1, i):
        if 0 <= j < ords.size and abs(ords[j] - T) < 1e-6:
            return T + 1e-5
    return T


def turing_count_check(zeros: ZeroList, T: float, window_gaps: float = 40.0) -> int:
    """Certify N(T) for a list with absolute anchoring (count_offset).

    Below 168 pi the check is run at a certification height just above it
    and carried down: all listed zeros are genuine, so a complete count
    at the higher point forces completeness below.
    """
    T = float(T)
    ords = zeros.ordinates
    h = window_gaps * float(mean_gap(max(T, TURING_MIN_T)))
    T_cert = max(T, TURING_MIN_T + 1.0)
    T_cert = _nudge(T_cert, ords)
    if zeros.height_covered < T_cert + h:
        raise PreconditionError(
            f"Turing check at {T_cert:.3f} needs zeros through {T_cert + h:.3f}; list covers {zeros.height_covered:.3f}"
        )
    if zeros.lower > T:
        raise PreconditionError(f"list starts at {zeros.lower}, above T={T}")
    listed = zeros.count_below(T_cert)
    n_lo, n_hi = turing_bracket(ords, listed, T_cert, h, lower_known=False)
    if n_lo != n_hi:
        raise IncompleteListError(
            f"Turing bracket at T={T_cert:.4f} gives N(T) in [{n_lo}, {n_hi}] with {listed} listed",
            (zeros.lower, T_cert),
        )
    return zeros.count_below(T)


def find_zeros(t_lo: float, t_hi: float, cfg: SearchConfig = SearchConfig()) -> ZeroList:
    """All zero ordinates in (t_lo, t_hi], Turing-verified.

    The scan extends below t_lo (to the zero-free start when t_lo is low)
    and above t_hi far enough for the Turing windows.
    """
    t_lo = float(t_lo)
    t_hi = float(t_hi)
    if not (t_lo < t_hi):
        raise InvalidArgumentError("find_zeros: requires t_lo < t_hi")
    if t_lo < 0:
        raise DomainError("find_zeros: requires t_lo >= 0")
    h_top = cfg.window_gaps * float(mean_gap(max(t_hi, TURING_MIN_T)))
    T_top = max(t_hi, TURING_MIN_T + 1.0)
    h_lo = cfg.window_gaps * float(mean_gap(max(t_lo, TURING_MIN_T)))
    from_bottom = t_lo - h_lo <= TURING_MIN_T + 1.0
    start = 2.0 if from_bottom else t_lo - h_lo
    density = 1.0
    for attempt in range(cfg.max_refinements + 1):
        ords, errs = _locate(start, T_top + h_top * 1.05, cfg, density)
        T_top_n = _nudge(T_top, ords)
        if from_bottom:
            if ords.size and ords[0] <= FIRST_ZERO_FLOOR:
                raise IncompleteListError("sign change below the classical first zero", (start, FIRST_ZERO_FLOOR))
            offset = 0
        else:
            t_lo_n = _nudge(t_lo, ords)
            # the list is relative here, so both windows must pin N(t_lo)
            n_lo, n_hi = turing_bracket(ords, 0, t_lo_n, h_lo, lower_known=False)
            if n_lo != n_hi:
                density *= 2
                continue
            offset = n_lo - int(np.searchsorted(ords, t_lo_n, side="right"))
        listed_top = offset + int(np.searchsorted(ords, T_top_n, side="right"))
        b_lo, b_hi = turing_bracket(ords, listed_top, T_top_n, h_top, lower_known=False)
        if b_lo == b_hi == listed_top:
            keep = (ords > t_lo) & (ords <= t_hi)
            below = offset + int(np.searchsorted(ords, t_lo, side="right"))
            return ZeroList(
                ordinates=ords[keep],
                height_covered=t_hi,
                abs_error=errs[keep],
                provenance="computed",
                turing_verified=True,
                lower=t_lo,
                count_offset=below,
                meta={"grid_density": density, "certified_at": T_top_n, "certified_count": listed_top},
            )
        density *= 2
    raise IncompleteListError(f"Turing check failed after {cfg.max_refinements} grid refinements", (t_lo, t_hi))


def height_of_zero(n: int) -> float:
    """Height where smooth_count reaches n + 1/2 (approximate location of the n-th zero)."""
    lo, hi = 10.0, 20.0
    while special.smooth_count(hi) < n + 0.5:
        hi *= 2
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if special.smooth_count(mid) < n + 0.5:
            lo = mid
        else:
            hi = mid
    return hi


def first_zeros(n: int, cfg: SearchConfig = SearchConfig()) -> ZeroList:
    """The first n zero ordinates, Turing-verified."""
    if n < 1:
        raise InvalidArgumentError("first_zeros: n must be positive")
    T = height_of_zero(n) + 5 * float(mean_gap(height_of_zero(n)))
    while True:
        zl = find_zeros(0.0, T, cfg)
        if len(zl) > n:
            return zl.first(n)
        T += 10 * float(mean_gap(T))


def s_of_t(T: float, zeros: ZeroList) -> float:
    """S(T) = N(T) - smooth_count(T) from a verified list."""
    if not zeros.turing_verified:
        raise PreconditionError("s_of_t needs a Turing-verified zero list")
    if not (zeros.lower <= T <= zeros.height_covered):
        raise PreconditionError(f"T={T} outside verified range [{zeros.lower}, {zeros.height_covered}]")
    return zeros.count_below(T) - special.smooth_count(T)


# ---------------------------------------------------------------------------
# files

def save_zeros(zeros: ZeroList, sink) -> None:
    """Write one ordinate per line (12 significant digits) after '#' metadata lines."""
    lines = [
        "# zetapair zero list",
        f"# provenance={zeros.provenance}",
        f"# lower={zeros.lower!r}",
        f"# height_covered={zeros.height_covered!r}",
        f"# count_offset={zeros.count_offset}",
        f"# turing_verified={'true' if zeros.turing_verified else 'false'}",
        f"# max_abs_error={float(np.max(zeros.abs_error)) if len(zeros) else 0.0:.3e}",
    ]
    body = "\n".join(lines + [f"{x:.12g}" for x in zeros.ordinates]) + "\n"
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="ascii") as fh:
            fh.write(body)
    else:
        sink.write(body)


def load_zeros(source, trust_metadata: bool = False) -> ZeroList:
    """Parse a plain-text zero file.

    ``source`` is a path, text stream or byte stream.  Metadata in '#'
    lines is recorded; the Turing flag is honored only with
    ``trust_metadata=True``.
    """
    name = "stream"
    if isinstance(source, (str, os.PathLike)):
        name = os.fspath(source)
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8 text: {exc}") from None
    meta = {}
    vals = []
    prev = -math.inf
    for lineno, raw in enumerate(io.StringIO(data), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        try:
            x = float(line)
        except ValueError:
            raise ParseError(f"cannot parse ordinate {line!r}", lineno) from None
        if not math.isfinite(x) or x <= 0:
            raise ParseError(f"ordinate must be positive and finite, got {line!r}", lineno)
        if x <= prev:
            raise ParseError(f"ordinates not strictly ascending ({x} after {prev})", lineno)
        vals.append(x)
        prev = x
    ords = np.asarray(vals, dtype=np.float64)
    try:
        height = float(meta.get("height_covered", ords[-1] if ords.size else 0.0))
        lower = float(meta.get("lower", 0.0))
        offset = int(meta.get("count_offset", 0))
        err = float(meta.get("max_abs_error", 0.0))
    except ValueError as exc:
        raise ParseError(f"bad metadata value: {exc}") from None
    err = max(err, 0.5 * 10.0 ** (math.floor(math.log10(ords[-1])) - 11)) if ords.size else err
    verified = trust_metadata and meta.get("turing_verified") == "true"
    return ZeroList(
        ordinates=ords,
        height_covered=height,
        abs_error=np.full(ords.shape, err),
        provenance=f"loaded({os.path.basename(name)})",
        turing_verified=verified,
        lower=lower,
        count_offset=offset,
        meta=meta,
    )
