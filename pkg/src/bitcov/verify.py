"""Monte Carlo property checks run by ``bitcov verify``.

Each check returns a dict with ``check``, ``pass`` and the measured statistics.
"""

from __future__ import annotations

import math

import numpy as np

from bitcov import codec
from bitcov.estimators import est_mb, est_tb
from bitcov.quant import (
    QuantizedBatch,
    pack,
    q_2bit,
    q_uniform,
    rescale_agreement,
    triangular_unit,
    unpack,
)
from bitcov.sampling import SeedSpec, derive_stream

NOISE_POINTS = (0.0, 0.3, -0.3, 0.9, -0.9, 2.7, -2.7)


def _mc_ok(sample: np.ndarray, target: float) -> tuple[float, float, bool]:
    dev = float(sample.mean() - target)
    tol = 4.0 * float(sample.std(ddof=1)) / math.sqrt(sample.size)
    return dev, tol, abs(dev) <= tol


def quantizer_equivalence(rng, trials: int, lam: float = 1.0) -> dict:
    a = rng.uniform(-lam, lam, trials)
    a[a == -lam] = 0.0
    v = a + lam * triangular_unit(trials, rng)
    bad = int(np.count_nonzero(q_2bit(v, lam) != q_uniform(v, lam)))
    return {"check": "quantizer_equivalence", "pass": bad == 0, "trials": trials, "violations": bad}


def noise_moments(rng, trials: int, lam: float = 1.0, points=NOISE_POINTS) -> dict:
    rows, ok = [], True
    for a0 in points:
        a = a0 * lam
        xi = q_uniform(a + lam * triangular_unit(trials, rng), lam) - a
        max_abs = float(np.max(np.abs(xi)))
        m_dev, m_tol, m_ok = _mc_ok(xi, 0.0)
        s_dev, s_tol, s_ok = _mc_ok(xi * xi, lam * lam / 4.0)
        b_ok = max_abs <= 1.5 * lam
        ok &= m_ok and s_ok and b_ok
        rows.append({"a": a, "max_abs_xi": max_abs, "mean_xi": m_dev, "mean_tol": m_tol,
                     "second_moment_minus_quarter": s_dev, "second_moment_tol": s_tol})
    return {"check": "noise_moments", "pass": bool(ok), "trials": trials, "points": rows}


def cross_independence(rng, trials: int, lam: float = 1.0) -> dict:
    a = np.array([0.3, -0.9]) * lam
    xi = q_uniform(a + lam * triangular_unit((trials, 2), rng), lam) - a
    dev, tol, ok = _mc_ok(xi[:, 0] * xi[:, 1], 0.0)
    return {"check": "cross_independence", "pass": ok, "trials": trials, "mean_product": dev, "tol": tol}


def rescale_identity(rng, entries: int) -> dict:
    d = 10
    n = max(1, entries // d)
    scales = rng.uniform(0.1, 10.0, d)
    X = rng.uniform(-1.0, 1.0, (n, d)) * scales
    tau = triangular_unit((n, d), rng)
    agree, compared, excluded = rescale_agreement(X, scales, tau)
    return {"check": "rescale_identity", "pass": agree == compared, "entries": n * d,
            "compared": compared, "excluded": excluded, "agree": agree}


def codec_roundtrip(rng, count: int) -> dict:
    codes = rng.integers(0, 4, count).astype(np.uint8)
    ok = np.array_equal(unpack(pack(codes), count), codes)
    n, d = max(1, count // 7), 7
    qb = QuantizedBatch(rng.integers(0, 4, (n, d)), rng.uniform(0.5, 2.0, d), 0.5)
    blob = codec.to_bytes(qb)
    back = codec.from_bytes(blob)
    ok &= len(blob) == codec.encoded_size(n, d) and np.array_equal(back.codes, qb.codes)
    ok &= np.array_equal(back.scales, qb.scales) and back.shrink == qb.shrink
    return {"check": "codec_roundtrip", "pass": bool(ok), "codes": count, "file_bytes": len(blob)}


def tb_mb_coincidence(seed: int, batches: int = 20) -> dict:
    mism = 0
    for b in range(batches):
        rng = derive_stream(SeedSpec(seed, 1, b))
        X = rng.standard_normal((50, 5)) * rng.uniform(0.2, 3.0, 5)
        lam = float(np.max(np.abs(X)))
        s1 = derive_stream(SeedSpec(seed, 2, b))
        s2 = derive_stream(SeedSpec(seed, 2, b))
        mism += not np.array_equal(np.asarray(est_tb(X, lam, s1)), np.asarray(est_mb(X, lam, s2)))
    return {"check": "tb_mb_coincidence", "pass": mism == 0, "batches": batches, "mismatches": mism}


def run_all(seed: int, trials: int = 1_000_000) -> list[dict]:
    def rng(k):
        return derive_stream(SeedSpec(seed, 0, k))

    return [
        quantizer_equivalence(rng(0), trials),
        noise_moments(rng(1), trials),
        cross_independence(rng(2), trials),
        rescale_identity(rng(3), max(10, trials // 10)),
        codec_roundtrip(rng(4), max(8, trials // 10)),
        tb_mb_coincidence(seed),
    ]
