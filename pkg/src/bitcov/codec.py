"""Q2BC container for a QuantizedBatch.

Little-endian layout: magic ``Q2BC``, u16 version (1), u64 n, u64 d, f64 shrink,
d x f64 scales, then ceil(n*d/4) packed code bytes in row-major entry order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from bitcov.errors import FormatError
from bitcov.quant import QuantizedBatch, pack, unpack

MAGIC = b"Q2BC"
VERSION = 1
_HEADER = struct.Struct("<4sHQQd")


def encoded_size(n: int, d: int) -> int:
    return _HEADER.size + 8 * d + (n * d + 3) // 4


def to_bytes(qb: QuantizedBatch) -> bytes:
    head = _HEADER.pack(MAGIC, VERSION, qb.n, qb.d, float(qb.shrink))
    return head + qb.scales.astype("<f8").tobytes() + pack(qb.codes)


def from_bytes(buf: bytes) -> QuantizedBatch:
    if len(buf) < _HEADER.size:
        raise FormatError("truncated header")
    magic, version, n, d, shrink = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if len(buf) != encoded_size(n, d):
        raise FormatError(f"expected {encoded_size(n, d)} bytes, got {len(buf)}")
    off = _HEADER.size
    scales = np.frombuffer(buf, dtype="<f8", count=d, offset=off).astype(np.float64)
    codes = unpack(buf[off + 8 * d:], n * d).reshape(n, d)
    try:
        return QuantizedBatch(codes, scales, shrink)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def write(path, qb: QuantizedBatch) -> None:
    Path(path).write_bytes(to_bytes(qb))


def read(path) -> QuantizedBatch:
    return from_bytes(Path(path).read_bytes())
