"""Seeded Gaussian sampling and per-column statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bitcov.errors import EmptyBatch, NonFinite
from bitcov.linalg import as_sym, sampling_factor


@dataclass(frozen=True)
class SeedSpec:
    base_seed: int
    grid_index: int = 0
    rep_index: int = 0


def derive_stream(seed: SeedSpec, *fork: int) -> np.random.Generator:
    """Philox generator keyed by (base_seed, grid_index, rep_index, *fork).

    Distinct keys give independent streams; the same key always gives the
    same stream, whatever order or process it is requested from.
    """
    key = (seed.grid_index, seed.rep_index, *fork)
    if any(k < 0 for k in key):
        raise ValueError("stream indices must be nonnegative")
    ss = np.random.SeedSequence(seed.base_seed & ((1 << 64) - 1), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def as_batch(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError("sample batch must be n x d")
    if X.shape[0] == 0:
        raise EmptyBatch("sample batch has no rows")
    if not np.all(np.isfinite(X)):
        raise NonFinite("sample batch contains NaN or Inf")
    return X


def sample_gaussian(n: int, sigma, rng: np.random.Generator) -> np.ndarray:
    """n rows of N(0, sigma) as g @ L^T, g drawn row-major."""
    L = sampling_factor(as_sym(sigma))
    g = rng.standard_normal((n, L.shape[0]))
    return g @ L.T


def column_max_abs(X) -> np.ndarray:
    """Per-column max |X_ij|: the smallest dither scales that keep the 2-bit quantizer exact."""
    return np.max(np.abs(as_batch(X)), axis=0)
