"""Dense symmetric matrices and the spectral quantities used to score estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bitcov import _backend
from bitcov.errors import NoConvergence, NonFinite, NotPSD, ZeroMatrix

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12
PSD_TOL = 1e-10


class SymMatrix:
    """Real symmetric d x d matrix, symmetrized on construction.

    The stored array is read-only; ``np.asarray(m)`` returns it without copying.
    """

    __slots__ = ("_values",)

    def __init__(self, values):
        a = np.array(values, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        a = 0.5 * (a + a.T)
        a.flags.writeable = False
        self._values = a

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None or np.dtype(dtype) == self._values.dtype:
            return self._values.copy() if copy else self._values
        return self._values.astype(dtype)

    def __sub__(self, other) -> SymMatrix:
        return SymMatrix(self._values - np.asarray(other))

    def __add__(self, other) -> SymMatrix:
        return SymMatrix(self._values + np.asarray(other))

    def __mul__(self, c: float) -> SymMatrix:
        return SymMatrix(self._values * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"

    def trace(self) -> float:
        return float(np.trace(self._values))


def as_sym(m) -> SymMatrix:
    return m if isinstance(m, SymMatrix) else SymMatrix(m)


@dataclass(frozen=True)
class SigmaSpec:
    """Parameters of (a - b) I + b 11^T + (c - a) e1 e1^T: diagonal [c, a, ..., a], off-diagonal b."""

    a: float
    b: float
    c: float
    dim: int


def make_sigma(spec: SigmaSpec) -> SymMatrix:
    if spec.dim < 1:
        raise ValueError("dim must be >= 1")
    d = spec.dim
    m = np.full((d, d), float(spec.b))
    np.fill_diagonal(m, float(spec.a))
    m[0, 0] = float(spec.c)
    out = SymMatrix(m)
    if not is_psd(out):
        raise NotPSD(f"Sigma({spec.a}, {spec.b}, {spec.c}) with d={d} is not PSD")
    return out


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has NaN or Inf entries")


def sym_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns) via cyclic Jacobi."""
    a = np.asarray(as_sym(m))
    _check_finite(a)
    w, v, sweeps = _backend.jacobi_eigh(a, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def operator_norm(m) -> float:
    w, _ = sym_eigen(m)
    return float(max(abs(w[0]), abs(w[-1])))


def effective_rank(m) -> float:
    """trace / operator norm."""
    m = as_sym(m)
    norm = operator_norm(m)
    if norm == 0.0:
        raise ZeroMatrix("effective rank of the zero matrix is undefined")
    return m.trace() / norm


def max_abs_entry(m) -> float:
    a = np.asarray(m, dtype=np.float64)
    return float(np.max(np.abs(a))) if a.size else 0.0


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=np.float64)))


def _psd_eigen(m, tol: float = PSD_TOL):
    w, v = sym_eigen(m)
    norm = max(abs(w[0]), abs(w[-1]))
    ok = w[-1] >= -tol * norm
    return ok, np.clip(w, 0.0, None), v


def is_psd(m, tol: float = PSD_TOL) -> bool:
    return bool(_psd_eigen(m, tol)[0])


def sampling_factor(m) -> np.ndarray:
    """L with L L^T == m; eigenvalues within tolerance below zero are clamped."""
    ok, w, v = _psd_eigen(m)
    if not ok:
        raise NotPSD("matrix has an eigenvalue below the PSD tolerance")
    return v * np.sqrt(w)


def psd_clip(m) -> SymMatrix:
    """Project onto the PSD cone by zeroing negative eigenvalues.

    Post-hoc utility only; no estimator applies it.
    """
    w, v = sym_eigen(m)
    w = np.clip(w, 0.0, None)
    return SymMatrix((v * w) @ v.T)
