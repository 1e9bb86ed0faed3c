"""Dithered scalar quantizers and the 2-bit batch quantizer.

Codes 0..3 map monotonically to the levels -3/2, -1/2, +1/2, +3/2 times the
column resolution, so decoding is ``(code - 1.5) * resolution``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from bitcov import _backend
from bitcov.errors import BadLength, DegenerateColumn, NonFinite

BOUNDARY_EPS = 1e-9


def _finite(a, what="input"):
    arr = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{what} contains NaN or Inf")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def q_uniform(a, lam):
    """Uniform quantizer lam * (floor(a / lam) + 1/2); elementwise on arrays."""
    a = _finite(a)
    lam = _finite(lam, "resolution")
    if np.any(lam <= 0):
        raise ValueError("resolution must be positive")
    return _out(lam * (np.floor(a / lam) + 0.5))


def q_2bit_index(a, lam):
    """Bin index in {-2, -1, 0, 1} of the four-level quantizer (half-open bins)."""
    return np.where(a < -lam, -2, np.where(a < 0.0, -1, np.where(a < lam, 0, 1)))


def q_2bit(a, lam):
    """Four-level quantizer: -3lam/2 below -lam, -lam/2 on [-lam, 0), lam/2 on [0, lam), 3lam/2 from lam up."""
    a = _finite(a)
    lam = _finite(lam, "resolution")
    if np.any(lam <= 0):
        raise ValueError("resolution must be positive")
    return _out((q_2bit_index(a, lam) + 0.5) * lam)


def sign_q(a):
    """Sign with sign(0) = +1."""
    a = _finite(a)
    return _out(np.where(a >= 0.0, 1.0, -1.0))


@dataclass(frozen=True)
class DitherKind:
    """Dither distribution at scale ``scale``.

    ``uniform`` draws U[-half_width*scale, half_width*scale]; the uniform
    quantizer pairs with half_width=0.5, the dithered sign quantizer with 1.0.
    ``triangular`` is the sum of two U[-scale/2, scale/2] draws.
    """

    tag: str = "triangular"
    scale: float = 1.0
    half_width: float = 0.5

    def __post_init__(self):
        if self.tag not in ("none", "uniform", "triangular"):
            raise ValueError(f"unknown dither kind {self.tag!r}")
        if not self.scale > 0:
            raise ValueError("dither scale must be positive")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")


def draw_dither(kind: DitherKind, shape, rng: np.random.Generator) -> np.ndarray:
    """Unit-scale draws (row-major) multiplied by ``kind.scale``."""
    if kind.tag == "none":
        return np.zeros(shape)
    if kind.tag == "uniform":
        h = kind.half_width
        return kind.scale * rng.uniform(-h, h, shape)
    t = rng.uniform(-0.5, 0.5, shape)
    t = t + rng.uniform(-0.5, 0.5, shape)
    return kind.scale * t


def triangular_unit(shape, rng: np.random.Generator) -> np.ndarray:
    return draw_dither(DitherKind("triangular"), shape, rng)


@dataclass
class QuantizedBatch:
    """n x d two-bit codes plus the per-column scales and shrink factor they were taken at."""

    codes: np.ndarray
    scales: np.ndarray
    shrink: float = 1.0
    _res: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.codes = np.ascontiguousarray(self.codes, dtype=np.uint8)
        self.scales = np.ascontiguousarray(self.scales, dtype=np.float64)
        if self.codes.ndim != 2 or self.scales.shape != (self.codes.shape[1],):
            raise ValueError("codes must be n x d and scales length d")
        if np.any(self.codes > 3):
            raise ValueError("codes must lie in 0..3")
        if not 0.0 < self.shrink <= 1.0:
            raise ValueError("shrink must lie in (0, 1]")
        self._res = self.shrink * self.scales

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def d(self) -> int:
        return self.codes.shape[1]

    @property
    def resolution(self) -> np.ndarray:
        """Effective per-column quantizer resolution s * scale."""
        return self._res

    def decode(self) -> np.ndarray:
        return (self.codes - 1.5) * self._res

    def packed(self) -> bytes:
        return pack(self.codes)


def quantize_batch(X, scales, shrink: float = 1.0, rng=None, dither=None) -> QuantizedBatch:
    """Two-bit codes of X + s*scale*tau at resolution s*scale, tau unit triangular.

    ``dither`` supplies tau directly; otherwise an n x d triangular block is
    drawn from ``rng``. Zero-scale columns must be all zero and get code 2.
    """
    X = _finite(X, "batch")
    if X.ndim != 2:
        raise ValueError("batch must be n x d")
    scales = _finite(scales, "scales").reshape(-1)
    if scales.shape[0] != X.shape[1]:
        raise ValueError("need one scale per column")
    if np.any(scales < 0):
        raise ValueError("scales must be nonnegative")
    if not 0.0 < shrink <= 1.0:
        raise ValueError("shrink must lie in (0, 1]")
    zero = scales == 0.0
    if np.any(zero):
        bad = np.flatnonzero(zero & np.any(X != 0.0, axis=0))
        if bad.size:
            raise DegenerateColumn(f"zero scale on nonzero column(s) {bad.tolist()}")
    if dither is None:
        if rng is None:
            raise ValueError("need rng or dither")
        dither = triangular_unit(X.shape, rng)
    else:
        dither = np.asarray(dither, dtype=np.float64)
        if dither.shape != X.shape:
            raise ValueError("dither shape must match the batch")
    res = shrink * scales
    codes = _backend.quantize_codes(X, res, dither)
    return QuantizedBatch(codes, scales, shrink)


def pack(codes) -> bytes:
    """Four codes per byte; code k of a group sits in bits 2k..2k+1."""
    c = np.asarray(codes)
    if c.size and (c.min() < 0 or c.max() > 3):
        raise ValueError("codes must lie in 0..3")
    return _backend.pack_codes(c.astype(np.uint8).ravel())


def unpack(buf, count: int) -> np.ndarray:
    need = (count + 3) // 4
    if count < 0 or len(buf) < need:
        raise BadLength(f"{count} codes need {need} bytes, got {len(buf)}")
    if count == 0:
        return np.zeros(0, dtype=np.uint8)
    return _backend.unpack_codes(np.frombuffer(bytes(buf[:need]), dtype=np.uint8), count)


def rescale_agreement(X, scales, tau) -> tuple[int, int, int]:
    """Compare Q_{L,2b}(X + L tau) with L * Q_1(X / L + tau) code by code.

    Returns (agreeing, compared, excluded); entries whose argument lies within
    1e-9 * scale of a bin boundary are excluded. Agreement is guaranteed only
    where |X_ij| <= scale_j.
    """
    X = _finite(X, "batch")
    tau = _finite(tau, "dither")
    scales = _finite(scales, "scales").reshape(-1)
    if np.any(scales <= 0):
        raise ValueError("scales must be positive")
    direct = _backend.quantize_codes(X, scales, tau).astype(np.int64)
    u = X / scales + tau
    rescaled = np.floor(u).astype(np.int64) + 2
    r = (X + scales * tau) / scales
    keep = np.abs(r - np.round(r)) >= BOUNDARY_EPS
    keep &= np.abs(u - np.round(u)) >= BOUNDARY_EPS
    agree = int(np.count_nonzero((direct == rescaled) & keep))
    compared = int(np.count_nonzero(keep))
    return agree, compared, int(keep.size - compared)


def rescale_identity_check(X, scales, tau) -> bool:
    agree, compared, _ = rescale_agreement(X, scales, tau)
    return agree == compared
