"""Command-line interface.

    zetapair zeros-compute --from 0 --to 100 --out z.txt
    zetapair zeros-verify --in z.txt --T 100
    zetapair paircorr --zeros z.txt --omega bump:band=0.9 --alpha 0:0.5:0.1
    zetapair histogram --zeros z.txt --bin 0.1 --range 0:30 --overlay
    zetapair predict --kernel K --T 1000 --u 0
    zetapair compare --zeros z.txt --alpha-grid 0:0.5:0.1
    zetapair montgomery --zeros z.txt --alpha 0.2,0.4,0.6,0.8
    zetapair verify --suite all
    zetapair report --zeros z.txt --out-dir report/
    zetapair rerun --from out.csv --out again.csv

Data commands print CSV to stdout, or write it to ``--out`` together with a
JSON sidecar of the same stem.  Failures print a JSON error object on stderr
and exit with 2 (precondition or bad input), 3 (accuracy) or 4 (parse).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__, arithmetic, predictions, statistics, testfn, verification, zeros
from .errors import InvalidArgumentError, PreconditionError, ZetaPairError, IncompleteListError
from .export import RunConfig, csv_text, read_csv, sidecar_path, write_metadata

log = logging.getLogger("zetapair")

ORDINATE_TOL = 1e-6  # agreement required between a file and the recount


# ---------------------------------------------------------------------------
# argument helpers

def parse_grid(text: str) -> np.ndarray:
    """'a:b:step' (inclusive), 'a:b' with step 1, or a comma list."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1.0)
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise ValueError
            lo, hi, step = parts
            n = int(math.floor((hi - lo) / step + 1e-9))
            return np.round(lo + step * np.arange(n + 1), 12)
        return np.array([float(p) for p in text.split(",") if p.strip()])
    except ValueError:
        raise InvalidArgumentError(f"cannot read grid {text!r}; use a:b:step or a comma list") from None


def parse_range(text: str) -> tuple:
    parts = str(text).split(":")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except (ValueError, IndexError):
        raise InvalidArgumentError(f"cannot read range {text!r}; use lo:hi") from None
    if len(parts) != 2 or not hi > lo:
        raise InvalidArgumentError(f"range {text!r} must be lo:hi with hi > lo")
    return lo, hi


def _ctx(args) -> predictions.KernelContext:
    kw = {"table_limit": args.table_limit}
    if args.cache_dir:
        kw["cache_dir"] = args.cache_dir
    return predictions.KernelContext(**kw)


def _tables(args, limit=None):
    return arithmetic.build_tables(limit or args.table_limit, cache_dir=args.cache_dir)


def load_verified(path, verify: bool = False, T: float | None = None):
    """Load a zero file; with ``verify`` the contents are re-derived and compared."""
    zl = zeros.load_zeros(path, trust_metadata=not verify)
    if verify:
        zl = recount(zl, T if T is not None else zl.height_covered)["zeros"]
    return zl


def recount(zl: zeros.ZeroList, T: float) -> dict:
    """Independent search over the file's range; every ordinate must reappear."""
    if len(zl) == 0:
        raise PreconditionError("zero file holds no ordinates")
    T = float(T)
    lo = float(zl.lower)
    ref = zeros.find_zeros(lo, T)
    mine = zl.ordinates[zl.ordinates <= T]
    if mine.size != len(ref):
        raise IncompleteListError(
            f"file lists {mine.size} ordinates in ({lo:g}, {T:g}] but the recount finds {len(ref)}", (lo, T))
    dev = float(np.max(np.abs(mine - ref.ordinates))) if mine.size else 0.0
    if dev > ORDINATE_TOL:
        i = int(np.argmax(np.abs(mine - ref.ordinates)))
        raise IncompleteListError(f"ordinate {mine[i]!r} disagrees with the recount {ref.ordinates[i]!r}", (lo, T))
    return {"zeros": ref, "count": ref.count_below(T), "max_deviation": dev}


def _default_T(zl: zeros.ZeroList, T):
    if T is not None:
        return float(T)
    if len(zl) == 0:
        raise PreconditionError("zero file holds no ordinates")
    return float(zl.ordinates[-1])


# ---------------------------------------------------------------------------
# output

def emit(args, command: str, header, rows, **meta) -> str:
    config = RunConfig(command, _params(args))
    text = csv_text(config, header, rows)
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
        write_metadata(sidecar_path(args.out), config, **meta)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return text


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "verbose")}


def _plot_path(args, suffix=""):
    if not args.out:
        raise InvalidArgumentError("--plot needs --out (the figure is written next to the CSV)")
    return os.path.splitext(args.out)[0] + suffix + ".png"


# ---------------------------------------------------------------------------
# commands

def cmd_zeros_compute(args):
    t0 = time.perf_counter()
    if args.count is not None:
        zl = zeros.first_zeros(args.count)
    else:
        if args.to is None:
            raise InvalidArgumentError("give --to or --count")
        zl = zeros.find_zeros(args.lo, args.to)
    if args.out:
        zeros.save_zeros(zl, args.out)
    else:
        zeros.save_zeros(zl, sys.stdout)
    summary = {"count": len(zl), "lower": zl.lower, "height_covered": zl.height_covered,
               "turing_verified": zl.turing_verified, "seconds": round(time.perf_counter() - t0, 3)}
    if args.out:
        print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_zeros_verify(args):
    zl = zeros.load_zeros(args.inp)
    T = float(args.T) if args.T is not None else zl.height_covered
    res = recount(zl, T)
    ref = res["zeros"]
    # the recount is itself Turing-certified, so its N(T) is the verified count
    out = {"file": args.inp, "T": T, "verified_count": int(res["count"]), "listed": int(np.sum(zl.ordinates <= T)),
           "max_deviation": res["max_deviation"]}
    if args.out:
        zeros.save_zeros(ref, args.out)
        out["written"] = args.out
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_paircorr(args):
    zl = load_verified(args.zeros, args.verify_zeros)
    T = _default_T(zl, args.T)
    omega = testfn.parse_spec(args.omega)
    rows = []
    for a in parse_grid(args.alpha):
        r = statistics.pair_sum(zl, omega, float(a), T, L=args.L, threads=args.threads)
        rows.append((a, r.value.real, r.value.imag, r.pairs_used, r.truncation_radius, r.neglected_bound))
    emit(args, "paircorr", ("alpha", "re", "im", "pairs", "truncation_radius", "neglected_bound"), rows,
         T=T, zeros=len(zl), test_function=omega.name)
    return 0


def histogram_rows(zl, bin_width, rng, threads, overlay, T, ctx):
    h = statistics.diff_histogram(zl, bin_width, rng, threads=threads)
    e = h.edges
    cols = [e[:-1], e[1:], h.centers, h.counts]
    header = ["left", "right", "center", "count"]
    if overlay:
        prof = predictions.prediction_profile(T, h.centers, ctx, "Q")
        cols.append(T * bin_width * prof)
        header.append("predicted")
    return h, header, list(zip(*cols))


def cmd_histogram(args):
    zl = load_verified(args.zeros, args.verify_zeros)
    T = _default_T(zl, args.T)
    rng = parse_range(args.range)
    h, header, rows = histogram_rows(zl, args.bin, rng, args.threads, args.overlay, T,
                                     _ctx(args) if args.overlay else None)
    emit(args, "histogram", header, rows, T=T, zeros=len(zl), total_pairs=h.total)
    if args.plot:
        from . import plotting

        over = [r[4] for r in rows] if args.overlay else None
        plotting.histogram_figure(_plot_path(args), h.edges, h.counts, over, title=f"{len(zl)} zeros")
    return 0


KERNELS = ("Q", "K", "Qtilde")


def _pointwise(kernel, T, u, ctx):
    if kernel == "K":
        return np.asarray(predictions.gue_kernel(T, u), dtype=float)
    if kernel == "Qtilde":
        return np.asarray(predictions.q_tilde_kernel(T, u, ctx, tabulated=u.size > 64))
    return np.asarray(predictions.q_kernel(T, u, ctx, path="table" if u.size > 64 else "auto"))


def _averaged(kernel, T, u, ctx):
    if kernel == "K":
        return np.asarray(predictions.gue_tavg(T, u), dtype=float)
    if kernel == "Qtilde":
        return np.asarray(predictions.q_tilde_tavg(T, u, ctx, tabulated=True))
    return np.asarray(predictions.q_kernel_tavg(T, u, ctx, tabulated=True))


def cmd_predict(args):
    if (args.u is None) == (args.u_grid is None):
        raise InvalidArgumentError("give exactly one of --u and --u-grid")
    u = np.atleast_1d(parse_grid(args.u if args.u is not None else args.u_grid)).astype(float)
    kernels = KERNELS if args.kernel == "all" else (args.kernel,)
    ctx = _ctx(args)
    fn = _averaged if args.average else _pointwise
    cols = [np.atleast_1d(fn(k, args.T, u, ctx)) for k in kernels]
    emit(args, "predict", ["u", *kernels], list(zip(u, *cols)), T=args.T, averaged=bool(args.average))
    if args.plot:
        from . import plotting

        plotting.curves_figure(_plot_path(args), u, dict(zip(kernels, cols)), "u", "kernel value",
                               title=f"T = {args.T:g}")
    return 0


def compare_rows(zl, omega, alphas, T, ctx, kernel, threads, L=None):
    rows = []
    for a in alphas:
        lhs = statistics.pair_sum(zl, omega, float(a), T, L=L, threads=threads)
        rhs = predictions.pair_prediction(omega, float(a), T, ctx, kernel)
        d = lhs.value.real - rhs.value
        rows.append((a, lhs.value.real, rhs.value, d, abs(d), rhs.error, lhs.neglected_bound))
    return rows


COMPARE_HEADER = ("alpha", "lhs", "rhs", "diff", "abs_diff", "rhs_error", "lhs_neglected")


def cmd_compare(args):
    zl = load_verified(args.zeros, args.verify_zeros)
    T = _default_T(zl, args.T)
    omega = testfn.parse_spec(args.omega)
    if args.L is not None and abs(args.L - math.log(T)) > 1e-12:
        raise InvalidArgumentError("the prediction side is defined with L = log T only")
    rows = compare_rows(zl, omega, parse_grid(args.alpha_grid), T, _ctx(args), args.kernel, args.threads)
    emit(args, "compare", COMPARE_HEADER, rows, T=T, zeros=len(zl), test_function=omega.name, kernel=args.kernel)
    if args.plot:
        from . import plotting

        r = np.array(rows, dtype=float)
        plotting.comparison_figure(_plot_path(args), r[:, 0], r[:, 1], r[:, 2], title=omega.name)
    return 0


def cmd_montgomery(args):
    zl = load_verified(args.zeros, args.verify_zeros)
    T = _default_T(zl, args.T)
    alphas = parse_grid(args.alpha)
    F = np.atleast_1d(statistics.montgomery_F(zl, alphas, T, threads=args.threads))
    ref = np.atleast_1d(statistics.montgomery_F_reference(alphas, T))
    emit(args, "montgomery", ("alpha", "F", "reference", "diff"), list(zip(alphas, F, ref, F - ref)), T=T, zeros=len(zl))
    if args.plot:
        from . import plotting

        plotting.curves_figure(_plot_path(args), alphas, {"F": F, r"$\alpha + T^{-2\alpha}\log T$": ref},
                               r"$\alpha$", r"$F(\alpha)$")
    return 0


SUITES = ("explicit", "digamma", "floor", "diagonal", "dirichlet")


def run_suite(name: str, args) -> list:
    if name == "explicit":
        zl = load_verified(args.zeros, args.verify_zeros) if args.zeros else zeros.find_zeros(0.0, 5000.0)
        tab = _tables(args, 10**4)
        return [verification.explicit_formula_check(testfn.make_smooth_bump(b), zl, tab) for b in (1.0, 2.0, 3.0)]
    if name == "digamma":
        J = testfn.make_smooth_bump(1.0)
        return [verification.digamma_integral_check(J, 0.25, 1.0),
                verification.digamma_integral_check(J.shifted(0.3), 0.25, 1.0, sign=-1),
                verification.digamma_integral_check(testfn.montgomery_weight(), 0.25, 1.0)]
    if name == "floor":
        return [verification.floor_identity_check(testfn.make_smooth_bump(1.0))]
    if name == "diagonal":
        return [verification.diagonal_sum_check(testfn.make_smooth_bump(1.0), 0.3, -0.3, math.log(1e3),
                                                math.log(1e3 / (2 * math.pi)), _tables(args, 10**4))]
    if name == "dirichlet":
        tab = _tables(args, 10**6)
        return [verification.dirichlet_identity_check(s, tab) for s in (2.0, 3.0)]
    raise InvalidArgumentError(f"unknown suite {name!r}")


def cmd_verify(args):
    names = SUITES if args.suite == "all" else tuple(s.strip() for s in args.suite.split(","))
    reports = []
    for name in names:
        t0 = time.perf_counter()
        got = run_suite(name, args)
        log.info("%s: %d checks in %.1f s", name, len(got), time.perf_counter() - t0)
        reports.extend(got)
    rows = [(r.name, r.lhs.real, r.lhs.imag, r.rhs.real, r.rhs.imag, r.residual, r.budget, r.passed) for r in reports]
    emit(args, "verify", ("check", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "budget", "passed"), rows,
         reports=[r.to_dict() for r in reports])
    return 0 if all(r.passed for r in reports) else 3


def cmd_report(args):
    from . import plotting
    from .export import write_csv

    os.makedirs(args.out_dir, exist_ok=True)
    zl = load_verified(args.zeros, args.verify_zeros)
    T = _default_T(zl, args.T)
    ctx = _ctx(args)
    omega = testfn.parse_spec(args.omega)
    base = _params(args)
    files = {}

    def out(name):
        return os.path.join(args.out_dir, name)

    h, header, rows = histogram_rows(zl, args.bin, parse_range(args.range), args.threads, True, T, ctx)
    write_csv(out("histogram.csv"), RunConfig("report/histogram", base), header, rows)
    plotting.histogram_figure(out("histogram.png"), h.edges, h.counts, [r[4] for r in rows],
                              title=f"differences of the first {len(zl)} zeros")
    files["histogram"] = ["histogram.csv", "histogram.png"]

    u = np.round(np.linspace(0.0, 30.0, 601), 12)
    prof = {k: predictions.prediction_profile(T, u, ctx, k) for k in KERNELS}
    write_csv(out("profile.csv"), RunConfig("report/profile", base), ("u", *KERNELS),
              list(zip(u, *(prof[k] for k in KERNELS))))
    plotting.curves_figure(out("profile.png"), u, prof, "u", "predicted pair density", marks=plotting.MARKS,
                           title=f"T = {T:.6g}")
    files["profile"] = ["profile.csv", "profile.png"]

    alphas = parse_grid(args.alpha_grid)
    rows = compare_rows(zl, omega, alphas, T, ctx, "Q", args.threads)
    write_csv(out("compare.csv"), RunConfig("report/compare", base), COMPARE_HEADER, rows)
    r = np.array(rows, dtype=float)
    plotting.comparison_figure(out("compare.png"), r[:, 0], r[:, 1], r[:, 2], title=omega.name)
    files["compare"] = ["compare.csv", "compare.png"]

    ma = np.array([0.2, 0.4, 0.6, 0.8]) if args.skip_dense_montgomery else np.round(np.arange(0.05, 1.0001, 0.05), 12)
    F = np.atleast_1d(statistics.montgomery_F(zl, ma, T, threads=args.threads))
    ref = np.atleast_1d(statistics.montgomery_F_reference(ma, T))
    write_csv(out("montgomery.csv"), RunConfig("report/montgomery", base), ("alpha", "F", "reference", "diff"),
              list(zip(ma, F, ref, F - ref)))
    plotting.curves_figure(out("montgomery.png"), ma, {"F": F, "reference": ref}, r"$\alpha$", r"$F(\alpha)$")
    files["montgomery"] = ["montgomery.csv", "montgomery.png"]

    write_metadata(out("report.json"), RunConfig("report", base), T=T, zeros=len(zl), files=files)
    print(json.dumps({"out_dir": args.out_dir, "files": files}, sort_keys=True))
    return 0


def cmd_rerun(args):
    """Re-run the command recorded in a CSV written by this tool."""
    config, _, _ = read_csv(args.source)
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices  # noqa: SLF001
    if config.command not in sub:
        raise InvalidArgumentError(f"{config.command!r} cannot be re-run on its own")
    ns = argparse.Namespace(**config.params)
    ns.func = sub[config.command].get_default("func")
    ns.out = args.out
    ns.threads = args.threads
    ns.cache_dir = args.cache_dir
    ns.plot = False
    return ns.func(ns)


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    common.add_argument("--cache-dir", default=None, help="table cache directory (default: $ZETAPAIR_CACHE)")
    common.add_argument("--table-limit", type=int, default=10**6, help="sieve bound for the prime tables")
    common.add_argument("-v", "--verbose", action="store_true")

    zsrc = argparse.ArgumentParser(add_help=False)
    zsrc.add_argument("--zeros", required=True, help="zero file written by zeros-compute")
    zsrc.add_argument("--T", type=float, default=None, help="height (default: the last ordinate)")
    zsrc.add_argument("--verify-zeros", action="store_true", help="re-derive the zeros instead of trusting the file")

    outp = argparse.ArgumentParser(add_help=False)
    outp.add_argument("--out", default=None, help="CSV path (a .json sidecar is written next to it)")
    outp.add_argument("--plot", action="store_true", help="also write a PNG next to the CSV")

    p = argparse.ArgumentParser(prog="zetapair", description="zeta zeros and their pair correlation")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("zeros-compute", parents=[common], help="compute Turing-verified zero ordinates")
    s.add_argument("--from", dest="lo", type=float, default=0.0)
    s.add_argument("--to", type=float, default=None)
    s.add_argument("--count", type=int, default=None, help="the first N zeros instead of a height range")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_zeros_compute)

    s = sub.add_parser("zeros-verify", parents=[common], help="recount and certify a zero file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--T", type=float, default=None)
    s.add_argument("--out", default=None, help="write the certified list here")
    s.set_defaults(func=cmd_zeros_verify)

    s = sub.add_parser("paircorr", parents=[common, zsrc, outp], help="weighted pair sums over zeros")
    s.add_argument("--omega", default="bump:band=0.9", help="test function, e.g. bump:band=0.9 or fejer:scale=1")
    s.add_argument("--alpha", default="0", help="value, list or a:b:step grid")
    s.add_argument("--L", type=float, default=None, help="frequency scale (default log T)")
    s.set_defaults(func=cmd_paircorr)

    s = sub.add_parser("histogram", parents=[common, zsrc, outp], help="histogram of zero differences")
    s.add_argument("--bin", type=float, default=0.1)
    s.add_argument("--range", default="0:30")
    s.add_argument("--overlay", action="store_true", help="add the predicted count per bin")
    s.set_defaults(func=cmd_histogram)

    s = sub.add_parser("predict", parents=[common, outp], help="evaluate prediction kernels")
    s.add_argument("--kernel", choices=(*KERNELS, "all"), default="Q")
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--u", default=None)
    s.add_argument("--u-grid", default=None)
    s.add_argument("--average", action="store_true", help="average over heights in [0, T]")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("compare", parents=[common, zsrc, outp], help="measured pair sums against the prediction")
    s.add_argument("--omega", default="bump:band=0.9")
    s.add_argument("--alpha-grid", default="0:0.5:0.1")
    s.add_argument("--kernel", choices=KERNELS, default="Q")
    s.add_argument("--L", type=float, default=None)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("montgomery", parents=[common, zsrc, outp], help="Montgomery's F(alpha)")
    s.add_argument("--alpha", default="0.2,0.4,0.6,0.8")
    s.set_defaults(func=cmd_montgomery)

    s = sub.add_parser("verify", parents=[common, outp], help="numerical identity checks")
    s.add_argument("--suite", default="all", help=f"comma list from {', '.join(SUITES)} or 'all'")
    s.add_argument("--zeros", default=None, help="zeros to height 5000 for the explicit formula (else computed)")
    s.add_argument("--verify-zeros", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("report", parents=[common], help="CSV tables and PNG figures in one directory")
    s.add_argument("--zeros", required=True)
    s.add_argument("--T", type=float, default=None)
    s.add_argument("--verify-zeros", action="store_true")
    s.add_argument("--out-dir", required=True)
    s.add_argument("--omega", default="bump:band=0.9")
    s.add_argument("--bin", type=float, default=0.1)
    s.add_argument("--range", default="0:30")
    s.add_argument("--alpha-grid", default="0:0.9:0.1")
    s.add_argument("--skip-dense-montgomery", action="store_true", help="F at four alphas only")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("rerun", parents=[common], help="repeat the run recorded in a CSV header")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_rerun)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return int(args.func(args) or 0)
    except ZetaPairError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "OSError", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
