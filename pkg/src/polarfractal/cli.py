"""Command-line interface.

Subcommands: threshold, plot-fractal, construct, measure, selfsim, heavy,
walk, entropy.  Output is deterministic given the flags; every stochastic
path requires --seed.  Exit codes: 0 ok, 1 usage or parse error, 2
unresolved result or violation found, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import codes, fractal, thresholds
from .errors import ResourceLimitError, UnresolvedError
from .expansions import is_dyadic, parse_rational

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNRESOLVED = 2
EXIT_RESOURCE = 3

_PLOT_DEFAULT_DEPTH = 40
_SELFSIM_DEFAULT_QMAX = 300


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        raise _UsageError(message)


def _fmt(x: float) -> str:
    """17 significant digits: exact round trip for binary64, '.' decimal
    point, no locale dependence."""
    return format(float(x), ".17g")


def _print(out, text: str) -> None:
    out.write(text + "\n")


def _parse_depths(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise _UsageError(f"bad integer list {text!r}") from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="polarfractal",
                     description="Fractal structure of polar and Reed-Muller "
                                 "index sets: thresholds, constructions, and "
                                 "desk-scale verification tables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("threshold", help="polarization threshold of a rational")
    p.add_argument("x", help="rational in [0,1], e.g. 2/3 or 0.4")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("plot-fractal",
                       help="threshold-estimate curve on a dyadic grid")
    p.add_argument("--grid-exponent", "-m", type=int, required=True,
                   help="emit one point per odd numerator over 2^(m+1)")
    p.add_argument("--depth", type=int, default=_PLOT_DEFAULT_DEPTH,
                   help="prefix length fed to the estimator (default 40)")
    p.add_argument("--include-dyadics", action="store_true",
                   help="also emit the dyadic grid spikes at theta = 1")
    p.add_argument("--iter-budget", type=int, default=600,
                   help="classifier iteration cap per grid point (default 600)")
    p.add_argument("--output", "-o", help="write to file instead of stdout")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("construct", help="polar or Reed-Muller index set")
    kind = p.add_subparsers(dest="kind", required=True)
    pp = kind.add_parser("polar")
    pp.add_argument("--eps", type=float, required=True)
    pp.add_argument("--n", type=int, required=True)
    pp.add_argument("--k", type=int, required=True, help="set size")
    pr = kind.add_parser("rm")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--r", type=int, required=True, help="order")
    for sp in (pp, pr):
        sp.add_argument("--matrix-out", help="also write the generator matrix")
        sp.add_argument("--matrix-format", choices=("text", "binary"),
                        default="text")
        sp.add_argument("--json", action="store_true")

    p = sub.add_parser("measure", help="good/bad leaf fractions per depth")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--depths", required=True, help="comma list, e.g. 10,16,20")
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--trials", type=int,
                   help="Monte Carlo trials for depths beyond 24")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("selfsim", help="self-similarity order/implication checks")
    p.add_argument("--set", choices=("threshold", "heavy"), default="threshold")
    p.add_argument("--n", type=int, required=True, help="cell depth")
    p.add_argument("--cell", type=int, help="single cell index (default: all)")
    p.add_argument("--samples", type=int, default=20, help="samples per cell")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rho", help="heavy exponent (required for --set heavy)")
    p.add_argument("--denominator-max", type=int, default=_SELFSIM_DEFAULT_QMAX)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("heavy", help="heavy-set membership of a rational")
    p.add_argument("x")
    p.add_argument("--rho", required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("walk", help="zero-crossing tables of the weight walk")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true",
                   help="exact identity table at horizon 2n+1")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-nonneg", action="store_true",
                   help="report the never-negative walk fraction instead")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("entropy", help="entropy-count dimension witness")
    p.add_argument("--rho", required=True)
    p.add_argument("--n", required=True, help="comma list of horizons")
    p.add_argument("--json", action="store_true")

    return parser


def _cmd_threshold(args, out) -> int:
    x = parse_rational(args.x)
    result = thresholds.threshold_of_rational(x)
    if args.json:
        _print(out, json.dumps({
            "x": str(x), "theta": result.theta,
            "certainty": result.certainty.value,
            "multiplicity_flag": result.multiplicity_flag}))
    else:
        _print(out, f"x = {x}")
        _print(out, f"theta = {_fmt(result.theta)}")
        _print(out, f"certainty = {result.certainty.value}")
        _print(out, f"multiple_interior_fixed_points = "
                    f"{str(result.multiplicity_flag).lower()}")
    return EXIT_OK


def _plot_rows(m: int, depth: int, include_dyadics: bool,
               iter_budget: int) -> list[tuple[float, float]]:
    if m < 1:
        raise _UsageError("grid exponent must be >= 1")
    if m > 16:
        raise ResourceLimitError("grid exponent capped at 16")
    if depth < 1:
        raise _UsageError("depth must be >= 1")
    count = 1 << m
    prefixes = np.empty((count, depth), dtype=np.uint8)
    xs = np.empty(count)
    for j in range(count):
        # Abscissa is the cell midpoint (odd numerator, so no coarse dyadic
        # is hit).  The estimated sequence continues the cell bits with the
        # balanced alternating tail; complementary cells then get exactly
        # complementary bit sequences, which keeps the curve symmetric.
        bits = [(j >> (m - 1 - i)) & 1 for i in range(m)]
        while len(bits) < depth:
            bits.append(1 - bits[-1])
        prefixes[j] = bits[:depth]
        xs[j] = (2 * j + 1) / (1 << (m + 1))
    theta = thresholds.threshold_estimate_batch(prefixes, iter_budget=iter_budget)
    rows = list(zip(xs.tolist(), theta.tolist()))
    if include_dyadics:
        rows.extend((j / (1 << m), 1.0) for j in range(1, count))
        rows.sort()
    return rows


def _cmd_plot_fractal(args, out) -> int:
    rows = _plot_rows(args.grid_exponent, args.depth, args.include_dyadics,
                      args.iter_budget)
    sink = open(args.output, "w") if args.output else out
    try:
        if args.json:
            _print(sink, json.dumps({
                "grid_exponent": args.grid_exponent, "depth": args.depth,
                "points": [[x, th] for x, th in rows]}))
        else:
            _print(sink, "x,theta")
            for x, th in rows:
                _print(sink, f"{_fmt(x)},{_fmt(th)}")
    finally:
        if args.output:
            sink.close()
    return EXIT_OK


def _cmd_construct(args, out) -> int:
    if args.kind == "polar":
        index_set = codes.polar_index_set(args.eps, args.n, args.k)
    else:
        index_set = codes.rm_index_set(args.r, args.n)
    if args.matrix_out:
        gm = codes.generator_matrix(index_set)
        if args.matrix_format == "text":
            with open(args.matrix_out, "w") as fh:
                fh.write(codes.matrix_to_text(gm))
        else:
            with open(args.matrix_out, "wb") as fh:
                fh.write(codes.matrix_to_bytes(gm))
    if args.json:
        _print(out, codes.index_set_to_json(index_set))
    else:
        meta = ", ".join(f"{k} = {v}" for k, v in index_set.meta.items())
        _print(out, f"kind = {index_set.kind}, n = {index_set.n}, {meta}")
        _print(out, "indices = " + " ".join(str(i) for i in index_set.indices))
    return EXIT_OK


def _cmd_measure(args, out) -> int:
    depths = _parse_depths(args.depths)
    if args.trials is not None and args.seed is None:
        raise _UsageError("--seed is required with --trials")
    estimates = fractal.measure_scan(args.eps, depths, args.delta,
                                     mc_trials=args.trials, seed=args.seed,
                                     threads=args.threads)
    if args.json:
        _print(out, json.dumps([{
            "depth": e.depth, "eps": e.eps, "delta": e.delta_good,
            "fraction_good": e.fraction_good, "fraction_bad": e.fraction_bad,
            "fraction_unresolved": e.fraction_unresolved} for e in estimates]))
    else:
        _print(out, "depth,fraction_good,fraction_bad,fraction_unresolved")
        for e in estimates:
            _print(out, f"{e.depth},{_fmt(e.fraction_good)},"
                        f"{_fmt(e.fraction_bad)},{_fmt(e.fraction_unresolved)}")
    return EXIT_OK


def _random_cell_samples(rng: random.Random, n: int, k: int, count: int,
                         qmax: int) -> list[Fraction]:
    lo, hi = fractal.cell_bounds(n, k)
    # Cells of width 2^-n always contain non-dyadic p/(3*2^n), so widen the
    # denominator universe when the requested cap cannot reach the cell.
    qmax = max(qmax, 3 << n)
    samples = []
    attempts = 0
    while len(samples) < count:
        attempts += 1
        if attempts > 100_000 * max(count, 1):
            raise _UsageError(
                f"could not sample cell {k} at depth {n}; raise --denominator-max")
        q = rng.randrange(3, qmax + 1)
        lo_p = int(lo * q) + 1
        hi_p = int(hi * q) if Fraction(int(hi * q), q) < hi else int(hi * q) - 1
        if lo_p > hi_p:
            continue
        x = Fraction(rng.randrange(lo_p, hi_p + 1), q)
        if is_dyadic(x) or not lo < x < hi:
            continue
        samples.append(x)
    return samples


def _cmd_selfsim(args, out) -> int:
    if args.set == "heavy" and args.rho is None:
        raise _UsageError("--rho is required for --set heavy")
    cells = [args.cell] if args.cell else list(range(1, (1 << args.n) + 1))
    rng = random.Random(args.seed)
    checked = 0
    violations = []
    for k in cells:
        samples = _random_cell_samples(rng, args.n, k, args.samples,
                                       args.denominator_max)
        checked += len(samples)
        if args.set == "threshold":
            violations.extend(fractal.selfsim_threshold_check(samples, args.n, k))
        else:
            violations.extend(fractal.heavy_selfsim_check(
                samples, Fraction(args.rho), args.n, k))
    if args.json:
        def as_doc(v):
            if args.set == "threshold":
                return {"x": str(v.x), "n": v.n, "k": v.k,
                        "theta_left": v.theta_left, "theta": v.theta,
                        "theta_right": v.theta_right, "defect": v.defect}
            return {"x": str(v.x), "rho": str(v.rho), "n": v.n, "k": v.k,
                    "member_left": v.member_left, "member": v.member,
                    "member_right": v.member_right}

        _print(out, json.dumps({
            "set": args.set, "n": args.n, "checked": checked,
            "violations": [as_doc(v) for v in violations]}))
    else:
        _print(out, f"checked = {checked}")
        _print(out, f"violations = {len(violations)}")
        for v in violations:
            _print(out, f"  {v}")
    return EXIT_UNRESOLVED if violations else EXIT_OK


def _cmd_heavy(args, out) -> int:
    x = parse_rational(args.x)
    rho = Fraction(args.rho)
    member = codes.heavy_membership(x, rho)
    if args.json:
        _print(out, json.dumps({"x": str(x), "rho": str(rho), "member": member}))
    else:
        _print(out, f"member = {str(member).lower()}")
    return EXIT_OK


def _cmd_walk(args, out) -> int:
    if args.min_nonneg:
        if args.trials is None or args.seed is None:
            raise _UsageError("--min-nonneg requires --trials and --seed")
        frac = fractal.walk_min_nonnegative_fraction(args.n, args.trials,
                                                     args.seed, args.threads)
        if args.json:
            _print(out, json.dumps({"n": args.n, "trials": args.trials,
                                    "seed": args.seed,
                                    "fraction_min_nonnegative": frac}))
        else:
            _print(out, f"fraction_min_nonnegative = {_fmt(frac)}")
        return EXIT_OK
    if args.exhaustive:
        rows = fractal.feller_identity_table(args.n)
        defective = any(row.defect != 0 for row in rows)
        if args.json:
            _print(out, json.dumps([{
                "r": row.r, "prob": str(row.prob),
                "closed_form": str(row.closed_form),
                "cumulative": str(row.cumulative), "bound": row.bound,
                "defect": str(row.defect)} for row in rows]))
        else:
            _print(out, "r,prob,closed_form,cumulative,bound,defect")
            for row in rows:
                _print(out, f"{row.r},{row.prob},{row.closed_form},"
                            f"{row.cumulative},{_fmt(row.bound)},{row.defect}")
        return EXIT_UNRESOLVED if defective else EXIT_OK
    if args.trials is None or args.seed is None:
        raise _UsageError("walk needs --exhaustive or --trials with --seed")
    stats = fractal.walk_distribution(args.n, trials=args.trials,
                                      seed=args.seed, threads=args.threads)
    odd = args.n % 2 == 1
    m = (args.n - 1) // 2

    def exact_of(r: int) -> str:
        if not odd:
            return ""
        return _fmt(float(fractal.crossing_count_closed_form(args.n, r)))

    if args.json:
        _print(out, json.dumps({
            "n": stats.n, "total": stats.total, "seed": stats.seed,
            "counts": {str(r): c for r, c
                       in sorted(stats.counts_by_crossings.items())}}))
    else:
        _print(out, "r,count,empirical_prob,exact_prob,bound")
        for r, c in sorted(stats.counts_by_crossings.items()):
            bound = _fmt(fractal.crossing_cdf_bound(m, r)) if odd else ""
            _print(out, f"{r},{c},{_fmt(c / stats.total)},{exact_of(r)},{bound}")
    return EXIT_OK


def _cmd_entropy(args, out) -> int:
    rho = Fraction(args.rho)
    horizons = _parse_depths(args.n)
    rows = [(n, fractal.entropy_count(n, rho),
             fractal.binary_entropy(float(rho))) for n in horizons]
    if args.json:
        _print(out, json.dumps([{"n": n, "entropy_count": e, "h2": h}
                                for n, e, h in rows]))
    else:
        _print(out, "n,entropy_count,h2")
        for n, e, h in rows:
            _print(out, f"{n},{_fmt(e)},{_fmt(h)}")
    return EXIT_OK


_HANDLERS = {
    "threshold": _cmd_threshold,
    "plot-fractal": _cmd_plot_fractal,
    "construct": _cmd_construct,
    "measure": _cmd_measure,
    "selfsim": _cmd_selfsim,
    "heavy": _cmd_heavy,
    "walk": _cmd_walk,
    "entropy": _cmd_entropy,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnresolvedError as exc:
        print(f"unresolved: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVED
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
