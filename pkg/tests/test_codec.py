import struct

import numpy as np
import pytest

from bitcov import codec
from bitcov.errors import FormatError
from bitcov.quant import QuantizedBatch


def _qb(rng, n=13, d=5, s=0.7):
    return QuantizedBatch(rng.integers(0, 4, (n, d)), rng.uniform(0.1, 3.0, d), s)


def test_layout(rng):
    qb = _qb(rng)
    blob = codec.to_bytes(qb)
    magic, version, n, d, s = struct.unpack_from("<4sHQQd", blob)
    assert (magic, version, n, d, s) == (b"Q2BC", 1, 13, 5, 0.7)
    assert np.array_equal(np.frombuffer(blob, "<f8", 5, 30), qb.scales)
    assert blob[30 + 40:] == qb.packed()


@pytest.mark.parametrize("n,d", [(1, 1), (3, 5), (4, 4), (101, 7)])
def test_size_formula(rng, n, d):
    blob = codec.to_bytes(_qb(rng, n, d))
    assert len(blob) == codec.encoded_size(n, d) == 30 + 8 * d + (n * d + 3) // 4


def test_roundtrip(rng, tmp_path):
    qb = _qb(rng)
    path = tmp_path / "b.q2bc"
    codec.write(path, qb)
    back = codec.read(path)
    assert np.array_equal(back.codes, qb.codes)
    assert np.array_equal(back.scales, qb.scales) and back.shrink == qb.shrink


@pytest.mark.parametrize(
    "mutate",
    [
        lambda b: b"Q2BX" + b[4:],
        lambda b: b[:4] + struct.pack("<H", 2) + b[6:],
        lambda b: b[:-1],
        lambda b: b + b"\x00",
        lambda b: b[:10],
    ],
)
def test_corrupt(rng, mutate):
    with pytest.raises(FormatError):
        codec.from_bytes(mutate(codec.to_bytes(_qb(rng))))
