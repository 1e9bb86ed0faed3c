"""Full-precision, sign-dithered, and triangular-dithered covariance estimators.

Every estimator takes the sample batch plus an explicit random stream and is a
pure function of them. Dither blocks are drawn n x d, row-major; the sign
estimators draw their first block, then their second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bitcov.errors import SpecError
from bitcov.linalg import SymMatrix
from bitcov.quant import QuantizedBatch, quantize_batch, triangular_unit
from bitcov.sampling import as_batch, column_max_abs

TAGS = ("sample", "na", "adaptive_na", "mb", "tb", "pf", "adaptive_sign")


def _gram(Y: np.ndarray) -> np.ndarray:
    return (Y.T @ Y) / Y.shape[0]


def _sym_cross(Y1: np.ndarray, Y2: np.ndarray) -> SymMatrix:
    M = Y1.T @ Y2
    return SymMatrix((M + M.T) / (2 * Y1.shape[0]))


def _corrected(Xq: np.ndarray, res) -> SymMatrix:
    G = _gram(Xq)
    G[np.diag_indices_from(G)] -= np.broadcast_to(np.asarray(res) ** 2 / 4.0, (G.shape[0],))
    return SymMatrix(G)


def _unit_uniform(shape, rng):
    return rng.uniform(-1.0, 1.0, shape)


def _sign(a):
    return np.where(a >= 0.0, 1.0, -1.0)


def _positive(name, v):
    if v is None or not (v > 0 and math.isfinite(v)):
        raise SpecError(f"{name} must be a positive finite number, got {v!r}")
    return float(v)


def sample_cov(X) -> SymMatrix:
    X = as_batch(X)
    return SymMatrix(_gram(X))


def est_na(X, lam: float, rng) -> SymMatrix:
    """Two independent U[-lam, lam] dithered sign measurements per entry."""
    X = as_batch(X)
    lam = _positive("lambda", lam)
    t1 = _unit_uniform(X.shape, rng)
    t2 = _unit_uniform(X.shape, rng)
    y1 = lam * _sign(X + lam * t1)
    y2 = lam * _sign(X + lam * t2)
    return _sym_cross(y1, y2)


def adaptive_scales(X, x0, C: float) -> np.ndarray:
    """Per-sample scales C * mean(||X_k||_inf, k = 0..i-1) * sqrt(log i), i = 1..n."""
    X = as_batch(X)
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x0.shape[0] != X.shape[1]:
        raise ValueError("X0 must have d entries")
    norms = np.concatenate([[np.max(np.abs(x0))], np.max(np.abs(X[:-1]), axis=1)])
    i = np.arange(1, X.shape[0] + 1, dtype=np.float64)
    running = np.cumsum(norms) / i
    return C * running * np.sqrt(np.log(i))


def est_adaptive_na(X, x0, C: float, rng) -> SymMatrix:
    X = as_batch(X)
    C = _positive("C", C)
    lam = adaptive_scales(X, x0, C)[:, None]
    t1 = _unit_uniform(X.shape, rng)
    t2 = _unit_uniform(X.shape, rng)
    y1 = lam * _sign(X + lam * t1)
    y2 = lam * _sign(X + lam * t2)
    return _sym_cross(y1, y2)


def est_mb(X, lam: float, rng) -> SymMatrix:
    """Multi-bit uniform quantizer with triangular dither, debiased by lam^2/4."""
    X = as_batch(X)
    lam = _positive("lambda", lam)
    t = triangular_unit(X.shape, rng)
    v = X + lam * t
    Xq = lam * (np.floor(v / lam) + 0.5)
    return _corrected(Xq, lam)


def est_tb(X, lam: float, rng) -> SymMatrix:
    """Four-level quantizer at a common resolution lam, triangular dither."""
    X = as_batch(X)
    lam = _positive("lambda", lam)
    qb = quantize_batch(X, np.full(X.shape[1], lam), 1.0, rng)
    return estimate_from_quantized(qb)


def estimate_from_quantized(qb: QuantizedBatch) -> SymMatrix:
    """(1/n) sum Xq Xq^T - (s*Lambda)^2 / 4 from stored codes, scales and shrink."""
    return _corrected(qb.decode(), qb.resolution)


def quantize_pf(X, s: float, rng) -> QuantizedBatch:
    X = as_batch(X)
    if not 0.0 < s <= 1.0:
        raise SpecError(f"shrink must lie in (0, 1], got {s!r}")
    return quantize_batch(X, column_max_abs(X), s, rng)


def est_pf(X, s: float = 1.0, rng=None) -> SymMatrix:
    """Parameter-free estimator: per-column scales are the column maxima, shrunk by s."""
    return estimate_from_quantized(quantize_pf(X, s, rng))


def est_adaptive_sign(X, rng) -> SymMatrix:
    """Sign-dithered estimator with per-column scales from the column maxima."""
    X = as_batch(X)
    lam = column_max_abs(X)
    t1 = _unit_uniform(X.shape, rng)
    t2 = _unit_uniform(X.shape, rng)
    y1 = lam * _sign(X + lam * t1)
    y2 = lam * _sign(X + lam * t2)
    return _sym_cross(y1, y2)


@dataclass(frozen=True)
class EstimatorSpec:
    """One estimator and its parameters.

    ``na`` and ``tb`` take either ``lam`` directly or ``C`` with
    lam = C * sqrt(log n); ``mb`` takes ``lam``; ``adaptive_na`` takes ``C``;
    ``pf`` takes ``shrink`` (default 1).
    """

    tag: str
    lam: float | None = None
    C: float | None = None
    shrink: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise SpecError(f"unknown estimator {self.tag!r}")
        lam, C, s = self.lam is not None, self.C is not None, self.shrink is not None
        allowed = {
            "sample": (), "adaptive_sign": (),
            "na": ("lam", "C"), "tb": ("lam", "C"), "mb": ("lam",),
            "adaptive_na": ("C",), "pf": ("shrink",),
        }[self.tag]
        given = [k for k, v in (("lam", lam), ("C", C), ("shrink", s)) if v]
        extra = [k for k in given if k not in allowed]
        if extra:
            raise SpecError(f"{self.tag} does not take {', '.join(extra)}")
        if self.tag in ("na", "tb") and lam and C:
            raise SpecError(f"{self.tag} takes lam or C, not both")
        if self.tag == "pf" and s and not 0.0 < self.shrink <= 1.0:
            raise SpecError("shrink must lie in (0, 1]")
        for k in ("lam", "C"):
            v = getattr(self, k)
            if v is not None:
                _positive(k, v)

    @property
    def needs_c(self) -> bool:
        """True when the spec still lacks its C (to be filled by a sweep)."""
        if self.tag in ("na", "tb"):
            return self.lam is None and self.C is None
        return self.tag == "adaptive_na" and self.C is None

    @property
    def complete(self) -> bool:
        return not self.needs_c and not (self.tag == "mb" and self.lam is None)

    @property
    def param(self) -> tuple[str, float | None]:
        if self.tag == "pf":
            return "s", 1.0 if self.shrink is None else self.shrink
        if self.C is not None:
            return "C", self.C
        if self.lam is not None:
            return "lambda", self.lam
        return "", None

    def with_c(self, C: float) -> EstimatorSpec:
        return EstimatorSpec(self.tag, C=C)

    def resolve_lambda(self, n: int) -> float:
        if self.lam is not None:
            return self.lam
        if self.C is None:
            raise SpecError(f"{self.tag} needs lam or C")
        return self.C * math.sqrt(math.log(n))


def estimate(spec: EstimatorSpec, X, rng=None, x0=None) -> SymMatrix:
    """Dispatch on ``spec.tag``. ``x0`` is the extra warm-up sample for adaptive_na."""
    X = as_batch(X)
    tag = spec.tag
    if tag == "sample":
        return sample_cov(X)
    if rng is None:
        raise ValueError(f"{tag} needs a random stream")
    if tag == "na":
        return est_na(X, spec.resolve_lambda(X.shape[0]), rng)
    if tag == "tb":
        return est_tb(X, spec.resolve_lambda(X.shape[0]), rng)
    if tag == "mb":
        if spec.lam is None:
            raise SpecError("mb needs lam")
        return est_mb(X, spec.lam, rng)
    if tag == "adaptive_na":
        if x0 is None:
            raise SpecError("adaptive_na needs the extra sample X0")
        if spec.C is None:
            raise SpecError("adaptive_na needs C")
        return est_adaptive_na(X, x0, spec.C, rng)
    if tag == "pf":
        return est_pf(X, 1.0 if spec.shrink is None else spec.shrink, rng)
    return est_adaptive_sign(X, rng)
