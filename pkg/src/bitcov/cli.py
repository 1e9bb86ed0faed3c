"""Command-line entry point: ``bitcov <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from bitcov import codec, verify
from bitcov.errors import BitcovError, FormatError
from bitcov.estimators import TAGS, EstimatorSpec, estimate, estimate_from_quantized, quantize_pf
from bitcov.experiments import (
    DEFAULT_C_GRID,
    DEFAULT_REPS,
    DEFAULT_SEED,
    ExperimentSpec,
    aggregate,
    best_c,
    run_grid,
    write_aggregate,
    write_records,
)
from bitcov.linalg import SigmaSpec, SymMatrix, frobenius_norm, operator_norm
from bitcov.sampling import SeedSpec, as_batch, derive_stream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DATA = 4
EXIT_FORMAT = 5
EXIT_IO = 6
EXIT_VERIFY = 7

# C used for na / tb / adaptive_na in n- and d-sweeps when none is given
DEFAULT_C = {"na": 0.7, "tb": 0.65, "adaptive_na": 0.35}
SWEEP_C_ESTIMATORS = "sample,na,adaptive_na,tb"
SWEEP_ND_ESTIMATORS = "sample,na,tb,pf,pf=0.9,pf=0.7,pf=0.5"


class ParseError(Exception):
    pass


def _read_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    try:
        data = [[float(tok) for tok in row.split(",")] for row in rows]
        arr = np.array(data, dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if arr.size == 0:
        return np.zeros((0, 0))
    if arr.ndim != 2:
        raise ParseError(f"{path}: rows have unequal lengths")
    return arr


def _matrix_text(m) -> str:
    a = np.asarray(m)
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in a)


def _emit_matrix(m, out) -> None:
    text = _matrix_text(m)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(tag, est, n, d, truth_path, to_stderr) -> None:
    parts = [f"estimator={tag}", f"n={n}", f"d={d}"]
    if truth_path:
        truth = SymMatrix(_read_matrix(truth_path))
        if truth.dim != d:
            raise ParseError(f"--truth is {truth.dim}x{truth.dim}, estimate is {d}x{d}")
        err = est - truth
        parts += [f"op_error={operator_norm(err)!r}", f"fro_error={frobenius_norm(err)!r}"]
    print(" ".join(parts), file=sys.stderr if to_stderr else sys.stdout)


def _stream(seed: int):
    return derive_stream(SeedSpec(seed, 0, 0))


def _estimator_from_flags(args, parser) -> EstimatorSpec:
    tag = args.estimator
    try:
        if tag in ("na", "tb"):
            if (args.lam is None) == (args.C is None):
                parser.error(f"--estimator {tag} needs exactly one of --lambda / --C")
            return EstimatorSpec(tag, lam=args.lam, C=args.C)
        if tag == "mb":
            if args.lam is None:
                parser.error("--estimator mb needs --lambda")
            return EstimatorSpec(tag, lam=args.lam)
        if tag == "adaptive_na":
            if args.C is None:
                parser.error("--estimator adaptive_na needs --C")
            return EstimatorSpec(tag, C=args.C)
        if tag == "pf":
            return EstimatorSpec(tag, shrink=1.0 if args.shrink is None else args.shrink)
        return EstimatorSpec(tag)
    except BitcovError as exc:
        parser.error(str(exc))


def cmd_estimate(args, parser) -> int:
    spec = _estimator_from_flags(args, parser)
    X = _read_matrix(args.input)
    x0 = None
    if spec.tag == "adaptive_na":
        # first row is the warm-up sample X0
        if X.shape[0] < 2:
            X = np.zeros((0, X.shape[1] if X.ndim == 2 else 0))
        else:
            x0, X = X[0], X[1:]
    X = as_batch(X)
    est = estimate(spec, X, _stream(args.seed), x0=x0)
    _emit_matrix(est, args.out)
    _summary(spec.tag, est, X.shape[0], X.shape[1], args.truth, to_stderr=not args.out)
    return EXIT_OK


def cmd_quantize(args, parser) -> int:
    s = args.shrink
    if not 0.0 < s <= 1.0:
        parser.error("--shrink must lie in (0, 1]")
    X = as_batch(_read_matrix(args.input))
    qb = quantize_pf(X, s, _stream(args.seed))
    codec.write(args.out, qb)
    print(f"wrote {args.out}: n={qb.n} d={qb.d} s={qb.shrink!r} bytes={codec.encoded_size(qb.n, qb.d)}")
    return EXIT_OK


def cmd_dequantize_estimate(args, parser) -> int:
    qb = codec.read(args.input)
    est = estimate_from_quantized(qb)
    _emit_matrix(est, args.out)
    _summary("pf", est, qb.n, qb.d, args.truth, to_stderr=not args.out)
    return EXIT_OK


def _parse_grid(text: str, cast=float) -> tuple:
    """'a:step:b' (inclusive) or 'v1,v2,...'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:step:stop, got {text!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"empty range {text!r}")
        k = int(math.floor((stop - start) / step + 1e-9))
        vals = [round(start + i * step, 10) for i in range(k + 1)]
    else:
        vals = [float(p) for p in text.split(",") if p.strip()]
    if not vals:
        raise ValueError(f"empty grid {text!r}")
    if cast is int:
        if any(v != int(v) for v in vals):
            raise ValueError(f"expected integers in {text!r}")
        return tuple(int(v) for v in vals)
    return tuple(vals)


def _parse_estimators(text: str, sweep: str) -> tuple[EstimatorSpec, ...]:
    """Comma list of ``tag`` or ``tag=value`` (C for na/tb/adaptive_na, s for pf, lambda for mb)."""
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        tag, _, val = tok.partition("=")
        if tag not in TAGS:
            raise ValueError(f"unknown estimator {tag!r}")
        v = float(val) if val else None
        if tag in ("na", "tb", "adaptive_na"):
            if v is None and sweep != "c":
                v = DEFAULT_C[tag]
            out.append(EstimatorSpec(tag, C=v))
        elif tag == "pf":
            out.append(EstimatorSpec(tag, shrink=1.0 if v is None else v))
        elif tag == "mb":
            if v is None:
                raise ValueError("mb needs mb=<lambda>")
            out.append(EstimatorSpec(tag, lam=v))
        else:
            if v is not None:
                raise ValueError(f"{tag} takes no parameter")
            out.append(EstimatorSpec(tag))
    if not out:
        raise ValueError("empty estimator list")
    return tuple(out)


def cmd_sweep(args, parser) -> int:
    sweep = args.command.split("-")[1]
    try:
        a, b, c = (float(v) for v in args.sigma.split(","))
        n_values = _parse_grid(args.n, int)
        d_values = _parse_grid(args.d, int)
        c_grid = _parse_grid(args.c_grid) if sweep == "c" else None
        default = SWEEP_C_ESTIMATORS if sweep == "c" else SWEEP_ND_ESTIMATORS
        ests = _parse_estimators(args.estimators or default, sweep)
        if args.reps < 1:
            raise ValueError("--reps must be >= 1")
        spec = ExperimentSpec(sweep, SigmaSpec(a, b, c, d_values[0]), n_values, d_values, ests,
                              reps=args.reps, c_grid=c_grid, base_seed=args.seed)
    except (ValueError, BitcovError) as exc:
        parser.error(str(exc))
    t0 = time.perf_counter()
    records = run_grid(spec, workers=args.workers)
    stats = aggregate(records)
    write_records(f"{args.out}.records.csv", records, spec)
    write_aggregate(f"{args.out}.aggregate.csv", stats)
    print(f"{len(records)} records -> {args.out}.records.csv, {args.out}.aggregate.csv "
          f"({time.perf_counter() - t0:.1f}s)", file=sys.stderr)
    if sweep == "c":
        for tag in dict.fromkeys(s.estimator for s in stats if s.param_name == "C"):
            cbest, err = best_c(stats, tag)
            print(f"best_c {tag} C={cbest!r} mean_op_error={err!r}")
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    if args.trials < 1:
        parser.error("--trials must be positive")
    results = verify.run_all(args.seed, args.trials)
    for r in results:
        print(json.dumps(r, sort_keys=True))
    failed = [r["check"] for r in results if not r["pass"]]
    print(("FAIL: " + ", ".join(failed)) if failed else "all checks passed", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bitcov", description="Two-bit dithered covariance estimation")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate a covariance matrix from an n x d CSV")
    e.add_argument("input")
    e.add_argument("--estimator", required=True, choices=TAGS)
    e.add_argument("--lambda", dest="lam", type=float)
    e.add_argument("--C", type=float)
    e.add_argument("--shrink", type=float)
    e.add_argument("--seed", type=int, default=DEFAULT_SEED)
    e.add_argument("--out")
    e.add_argument("--truth", help="reference covariance CSV; prints operator-norm error")
    e.set_defaults(func=cmd_estimate)

    q = sub.add_parser("quantize", help="two-bit quantize an n x d CSV into a Q2BC file")
    q.add_argument("input")
    q.add_argument("--shrink", type=float, default=1.0)
    q.add_argument("--seed", type=int, default=DEFAULT_SEED)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_quantize)

    dq = sub.add_parser("dequantize-estimate", help="covariance estimate from a Q2BC file")
    dq.add_argument("input")
    dq.add_argument("--out")
    dq.add_argument("--truth")
    dq.set_defaults(func=cmd_dequantize_estimate)

    for name, n_default, d_default in (("sweep-c", "500", "10"), ("sweep-n", "100:100:1000", "10"),
                                      ("sweep-d", "500", "5:5:50")):
        s = sub.add_parser(name, help=f"operator-norm error {name[-1]}-sweep")
        s.add_argument("--sigma", required=True, help="a,b,c for Sigma(a,b,c)")
        s.add_argument("--n", default=n_default)
        s.add_argument("--d", default=d_default)
        s.add_argument("--reps", type=int, default=DEFAULT_REPS)
        s.add_argument("--seed", type=int, default=DEFAULT_SEED)
        s.add_argument("--estimators", help="e.g. sample,na=0.7,tb,pf,pf=0.5")
        s.add_argument("--workers", type=int, help="parallel processes (default $BITCOV_WORKERS or 1)")
        s.add_argument("--out", required=True, help="output prefix")
        if name == "sweep-c":
            lo, hi = DEFAULT_C_GRID[0], DEFAULT_C_GRID[-1]
            s.add_argument("--c-grid", default=f"{lo}:{lo}:{hi}")
        s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the quantizer property checks")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--trials", type=int, default=1_000_000)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BitcovError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
