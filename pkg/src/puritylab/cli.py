"""Command-line experiment runner.

Every subcommand writes a CSV table (to ``--out`` or stdout).  With ``--out``
a sibling ``<out>.manifest`` records the parameters and a SHA-256 digest of
the table.  Exit codes: 0 success, 2 bad arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import sys
import time
import warnings

from . import __version__
from .analysis import crb_variance, fit_scaling, greedy_fidelity_limit, mse_decompose
from .core import PurityPrior
from .joint import QuadratureError, max_fidelity
from .protocols import (
    AdaptiveConfig,
    GreedyConfig,
    mc_average,
    predicted_theta2,
    simulate,
    summarize,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

DEFAULT_SEED = 20050101


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _int_list(text):
    try:
        vals = [int(float(v)) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}")
    return vals


def _float_list(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")


def _prior(args):
    if not args.lam < 1:
        raise UsageError(f"--lambda must be < 1, got {args.lam}")
    return PurityPrior(args.lam)


def _need(values, name):
    if not values:
        raise UsageError(f"{name} must not be empty")
    return values


def cmd_joint_bound(args):
    prior = _prior(args)
    rows, blocks = [], []
    for N in _need(args.N, "--N"):
        if N < 1:
            raise UsageError("N must be >= 1")
        res = max_fidelity(N, prior)
        rows.append([N, res.f_max, res.gap])
        for b in res.blocks:
            blocks.append([N, b.two_j, math.log(b.multiplicity), b.r_j, b.contribution])
    extra = {}
    if args.blocks:
        extra["blocks"] = (["N", "two_j", "log_multiplicity", "r_j", "contribution"], blocks)
    return ["N", "f_max", "gap"], rows, extra


def cmd_adaptive(args):
    prior = _prior(args)
    if not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    rows = []
    for N in _need(args.N, "--N"):
        try:
            cfg = AdaptiveConfig(N, args.alpha, prior)
        except ValueError as exc:
            raise UsageError(str(exc))
        if not cfg.valid:
            warnings.warn(f"alpha={args.alpha} is outside the asymptotic validity window "
                          f"for lambda={prior.lam}")
        s = mc_average("adaptive", cfg, args.trials, args.seed, args.fixed_r, args.threads)
        rows.append([N, cfg.n0, cfg.n1, s.mean_fidelity, s.std_error,
                     N * (1.0 - s.mean_fidelity), s.mean_theta2, s.mean_theta4, cfg.valid])
    header = ["N", "N0", "N1", "mean_F", "stderr", "N_one_minus_F", "theta2", "theta4", "valid"]
    return header, rows, {}


def cmd_greedy(args):
    prior = _prior(args)
    limit = greedy_fidelity_limit(prior)
    rows = []
    for N in _need(args.N, "--N"):
        s = mc_average("greedy", GreedyConfig(N, prior), args.trials, args.seed,
                       threads=args.threads)
        rows.append([N, s.mean_fidelity, s.std_error, N * (1.0 - s.mean_fidelity), limit])
    return ["N", "mean_F", "stderr", "N_one_minus_F", "limit_F"], rows, {}


def cmd_tomography(args):
    rows = []
    for r in _need(args.r, "--r"):
        if not 0 < r <= 1:
            raise UsageError("--r values must lie in (0, 1]")
        cfg = AdaptiveConfig.from_split(args.n0, 1)
        s = mc_average("adaptive", cfg, args.trials, args.seed, r, args.threads)
        rows.append([r, args.n0, s.mean_theta2 / 2, s.theta2_std_error / 2,
                     predicted_theta2(r, args.n0) / 2, s.mean_theta4])
    return ["r", "N0", "half_theta2", "stderr", "predicted_half_theta2", "theta4"], rows, {}


def cmd_crb(args):
    prior = _prior(args)
    rows = []
    for r in _need(args.r, "--r"):
        if not 0 <= r < 1:
            raise UsageError("--r values must lie in [0, 1)")
        cfg = AdaptiveConfig(args.N, args.alpha, prior)
        batch = simulate("adaptive", cfg, args.trials, args.seed, r, args.threads)
        d = mse_decompose(batch.estimate, r)
        floor = crb_variance(r, cfg.total_copies)
        rows.append([r, cfg.total_copies, cfg.n1, d.mse, d.variance, d.bias_sq,
                     d.mse / floor, d.mse / crb_variance(r, cfg.n1)])
    header = ["r", "N", "N1", "mse", "variance", "bias_sq", "N_mse_H", "N1_mse_H"]
    return header, rows, {}


def cmd_fit(args):
    try:
        with open(args.input, newline="") as fh:
            table = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}")
    if not table:
        raise UsageError(f"{args.input} has no rows")
    cols = table[0].keys()
    if "gap" in cols:
        key = "gap"
    elif "N_one_minus_F" in cols:
        key = "N_one_minus_F"
    else:
        raise UsageError("input needs an N column and a gap or N_one_minus_F column")
    pts = [(float(row["N"]), float(row[key]) / float(row["N"])) for row in table]
    try:
        fit = fit_scaling(pts)
    except ValueError as exc:
        raise UsageError(str(exc))
    return ["coefficient", "exponent", "residual", "points"], [
        [fit.coefficient, fit.exponent, fit.residual, len(pts)]], {}


def render(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def write_manifest(path, args, digest, duration, extra_files=()):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    lines = [f"subcommand: {args.command}"]
    lines += [f"{k}: {v}" for k, v in params.items()]
    lines += [f"version: {__version__}",
              f"duration_seconds: {duration:.3f}",
              f"sha256: {digest}"]
    lines += [f"sha256_{name}: {d}" for name, d in extra_files]
    _write(path, "\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="puritylab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, mc=True):
        sp.add_argument("--lambda", dest="lam", type=float, default=0.5,
                        help="prior exponent lambda < 1 (default 0.5, Bures)")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        if mc:
            sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
            sp.add_argument("--trials", type=int, default=100_000)
            sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("joint-bound", help="optimal joint-measurement fidelity")
    sp.add_argument("--N", type=_int_list, required=True, help="comma-separated N values")
    sp.add_argument("--blocks", action="store_true", help="also write per-block rows")
    common(sp, mc=False)
    sp.set_defaults(func=cmd_joint_bound)

    sp = sub.add_parser("adaptive", help="one-step adaptive protocol")
    sp.add_argument("--N", type=_int_list, required=True)
    sp.add_argument("--alpha", type=float, default=0.8)
    sp.add_argument("--fixed-r", type=float, default=None)
    common(sp)
    sp.set_defaults(func=cmd_adaptive)

    sp = sub.add_parser("greedy", help="fixed-axis protocol")
    sp.add_argument("--N", type=_int_list, required=True)
    common(sp)
    sp.set_defaults(func=cmd_greedy)

    sp = sub.add_parser("tomography", help="direction error of three-axis tomography")
    sp.add_argument("--r", type=_float_list, required=True)
    sp.add_argument("--n0", type=int, default=30_000)
    common(sp)
    sp.set_defaults(func=cmd_tomography)

    sp = sub.add_parser("crb", help="mean squared error against the Cramer-Rao floor")
    sp.add_argument("--r", type=_float_list, required=True)
    sp.add_argument("--N", type=int, default=10**6)
    sp.add_argument("--alpha", type=float, default=0.8)
    common(sp)
    sp.set_defaults(func=cmd_crb)

    sp = sub.add_parser("fit", help="log-log scaling fit of a joint-bound or adaptive table")
    sp.add_argument("input")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("trials", "threads"):
        if getattr(args, name, 1) < 1 or (name == "trials" and getattr(args, name, 2) < 2):
            parser.error(f"--{name} is too small")
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        parser.error("--seed must be an unsigned 64-bit integer")
    start = time.perf_counter()
    try:
        header, rows, extra = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (QuadratureError, FloatingPointError) as exc:
        print(f"puritylab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(header, rows)
    if args.out is None:
        sys.stdout.write(text)
        for name, (h, r) in extra.items():
            sys.stdout.write("\n" + render(h, r))
        return EXIT_OK
    _write(args.out, text)
    extra_digests = []
    for name, (h, r) in extra.items():
        etext = render(h, r)
        _write(f"{args.out}.{name}.csv", etext)
        extra_digests.append((name, hashlib.sha256(etext.encode()).hexdigest()))
    digest = hashlib.sha256(text.encode()).hexdigest()
    write_manifest(f"{args.out}.manifest", args, digest, time.perf_counter() - start, extra_digests)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
