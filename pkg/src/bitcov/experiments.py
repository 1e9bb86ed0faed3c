"""Monte Carlo sweeps over C, n or d with paired repetitions.

Each (grid point, rep) cell draws one sample batch from the stream keyed by
(base_seed, grid_index, rep_index); every estimator in the cell sees that same
batch and draws its dither from a fork keyed by its list ordinal (and C index),
so cells are independent tasks and the output does not depend on scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from bitcov.errors import Empty, InsufficientGrid, SpecError
from bitcov.estimators import EstimatorSpec, estimate
from bitcov.linalg import SigmaSpec, frobenius_norm, make_sigma, operator_norm
from bitcov.sampling import SeedSpec, derive_stream, sample_gaussian

DEFAULT_SEED = 20240601
DEFAULT_REPS = 50
DEFAULT_C_GRID = tuple(round(0.05 * k, 10) for k in range(1, 41))

RECORD_FIELDS = ("n", "d", "sigma_a", "sigma_b", "sigma_c", "estimator", "param_name",
                 "param_value", "rep", "op_error", "fro_error", "seed")
AGGREGATE_FIELDS = ("n", "d", "estimator", "param_value", "mean_op_error", "sd_op_error", "reps")


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep. ``sweep`` names the varied axis: "n", "d" or "c"."""

    sweep: str
    sigma: SigmaSpec
    n_values: tuple[int, ...]
    d_values: tuple[int, ...]
    estimators: tuple[EstimatorSpec, ...]
    reps: int = DEFAULT_REPS
    c_grid: tuple[float, ...] | None = None
    base_seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        object.__setattr__(self, "d_values", tuple(int(v) for v in self.d_values))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.c_grid is not None:
            object.__setattr__(self, "c_grid", tuple(float(c) for c in self.c_grid))
        if self.sweep not in ("n", "d", "c"):
            raise SpecError(f"unknown sweep axis {self.sweep!r}")
        if self.reps < 1:
            raise SpecError("reps must be >= 1")
        if not self.n_values or not self.d_values or not self.estimators:
            raise SpecError("grid and estimator list must be non-empty")
        if min(self.n_values) < 1 or min(self.d_values) < 1:
            raise SpecError("n and d must be >= 1")
        fixed = {"n": ("d_values",), "d": ("n_values",), "c": ("n_values", "d_values")}[self.sweep]
        for name in fixed:
            if len(getattr(self, name)) != 1:
                raise SpecError(f"a {self.sweep}-sweep needs a single value in {name}")
        if self.sweep == "c":
            if not self.c_grid:
                raise SpecError("a c-sweep needs a non-empty c_grid")
            if min(self.c_grid) <= 0:
                raise SpecError("C values must be positive")
        for e in self.estimators:
            if e.needs_c and self.sweep != "c":
                raise SpecError(f"{e.tag} needs C or lambda outside a c-sweep")
            if e.tag == "mb" and e.lam is None:
                raise SpecError("mb needs lambda")

    def grid(self) -> list[tuple[int, int]]:
        if self.sweep == "d":
            return [(self.n_values[0], d) for d in self.d_values]
        return [(n, self.d_values[0]) for n in self.n_values]

    def configs(self) -> list[tuple[EstimatorSpec, tuple[int, int]]]:
        """Concrete estimators with their dither fork keys, in output order."""
        out = []
        for e, spec in enumerate(self.estimators):
            if spec.needs_c:
                out.extend((spec.with_c(C), (e + 1, k)) for k, C in enumerate(self.c_grid))
            else:
                out.append((spec, (e + 1, 0)))
        return out


@dataclass(frozen=True)
class RunRecord:
    n: int
    d: int
    estimator: str
    param_name: str
    param_value: float | None
    rep: int
    op_error: float
    fro_error: float
    grid_index: int = 0
    batch_digest: str = field(default="", compare=False)

    @property
    def grid_point(self) -> tuple:
        return (self.n, self.d, self.estimator, self.param_name, self.param_value)


@dataclass(frozen=True)
class AggregateStats:
    n: int
    d: int
    estimator: str
    param_name: str
    param_value: float | None
    mean: float
    sd: float
    count: int


def _run_cell(args) -> list[RunRecord]:
    base_seed, g, r, n, d, sigma, configs = args
    seed = SeedSpec(base_seed, g, r)
    rng = derive_stream(seed)
    X = sample_gaussian(n, sigma, rng)
    x0 = None
    if any(spec.tag == "adaptive_na" for spec, _ in configs):
        x0 = sample_gaussian(1, sigma, rng)[0]
    digest = hashlib.blake2b(X.tobytes(), digest_size=8).hexdigest()
    out = []
    for spec, fork in configs:
        est = estimate(spec, X, derive_stream(seed, *fork), x0=x0)
        err = est - sigma
        pname, pval = spec.param
        out.append(RunRecord(n, d, spec.tag, pname, pval, r, operator_norm(err),
                             frobenius_norm(err), g, digest))
    return out


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("BITCOV_WORKERS", "1") or 1)
    return max(1, int(workers))


def run_grid(spec: ExperimentSpec, workers: int | None = None) -> list[RunRecord]:
    """All records, ordered by (grid point, estimator config, rep)."""
    workers = resolve_workers(workers)
    configs = spec.configs()
    sigmas = {d: make_sigma(replace(spec.sigma, dim=d)) for d in sorted(set(d for _, d in spec.grid()))}
    tasks = [(spec.base_seed, g, r, n, d, sigmas[d], configs)
             for g, (n, d) in enumerate(spec.grid()) for r in range(spec.reps)]
    if workers == 1 or len(tasks) == 1:
        cells = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    records = []
    for g in range(len(spec.grid())):
        block = cells[g * spec.reps:(g + 1) * spec.reps]
        for k in range(len(configs)):
            records.extend(cell[k] for cell in block)
    return records


def aggregate(records) -> list[AggregateStats]:
    """Per-grid-point mean and sample sd (ddof=1; 0 for a single rep)."""
    records = list(records)
    if not records:
        raise Empty("no records to aggregate")
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.grid_index, *rec.grid_point), []).append(rec)
    out = []
    for key, rows in groups.items():
        errs = np.array([x.op_error for x in sorted(rows, key=lambda x: x.rep)])
        sd = float(np.std(errs, ddof=1)) if errs.size > 1 else 0.0
        _, n, d, tag, pname, pval = key
        out.append(AggregateStats(n, d, tag, pname, pval, float(errs.mean()), sd, errs.size))
    return out


def best_c(stats, tag: str) -> tuple[float, float]:
    """Grid C with the smallest mean error for ``tag``; ties go to the smaller C."""
    rows = [s for s in stats if s.estimator == tag and s.param_name == "C"]
    if not rows:
        raise Empty(f"no C-sweep statistics for {tag!r}")
    best = min(rows, key=lambda s: (s.mean, s.param_value))
    return best.param_value, best.mean


def rate_slope(stats, tag: str, param_value=None) -> float:
    """Least-squares slope of log(mean error) against log(n)."""
    rows = [s for s in stats if s.estimator == tag
            and (param_value is None or s.param_value == param_value)]
    ns = sorted({s.n for s in rows})
    if len(ns) < 4 or ns[-1] < 4 * ns[0]:
        raise InsufficientGrid("need >= 4 n-values spanning at least a 4x range")
    if len(rows) != len(ns):
        raise SpecError("several rows share an n; pass param_value to disambiguate")
    rows.sort(key=lambda s: s.n)
    x = np.log([s.n for s in rows])
    y = np.log([s.mean for s in rows])
    return float(np.polyfit(x, y, 1)[0])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_records(path, records, spec: ExperimentSpec) -> None:
    sg = spec.sigma
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for x in records:
            w.writerow([x.n, x.d, _fmt(sg.a), _fmt(sg.b), _fmt(sg.c), x.estimator, x.param_name,
                        _fmt(x.param_value), x.rep, _fmt(x.op_error), _fmt(x.fro_error),
                        spec.base_seed])


def write_aggregate(path, stats) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_FIELDS)
        for s in stats:
            w.writerow([s.n, s.d, s.estimator, _fmt(s.param_value), _fmt(s.mean), _fmt(s.sd), s.count])


def read_aggregate(path) -> list[AggregateStats]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pv = float(row["param_value"]) if row["param_value"] else None
            out.append(AggregateStats(int(row["n"]), int(row["d"]), row["estimator"], "", pv,
                                      float(row["mean_op_error"]), float(row["sd_op_error"]),
                                      int(row["reps"])))
    return out


def lambda_scale(n: int) -> float:
    """sqrt(log n), the factor turning C into a dither scale for na and tb."""
    return math.sqrt(math.log(n))
