"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``."""

import math

import numpy as np


def jacobi_eigh(a, tol, max_sweeps):
    a = np.array(a, dtype=np.float64, copy=True)
    d = a.shape[0]
    v = np.eye(d)
    fro = math.sqrt(float(np.sum(a * a)))
    iu = np.triu_indices(d, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= tol * fro:
            return np.diagonal(a).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                cols = a[:, [p, q]]
                a[:, p] = c * cols[:, 0] - s * cols[:, 1]
                a[:, q] = s * cols[:, 0] + c * cols[:, 1]
                rows = a[[p, q], :]
                a[p, :] = c * rows[0] - s * rows[1]
                a[q, :] = s * rows[0] + c * rows[1]
                a[p, q] = a[q, p] = 0.0
                vc = v[:, [p, q]]
                v[:, p] = c * vc[:, 0] - s * vc[:, 1]
                v[:, q] = s * vc[:, 0] + c * vc[:, 1]
    return np.diagonal(a).copy(), v, -1


def quantize_codes(x, lam, t):
    x = np.asarray(x, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    val = x + lam * np.asarray(t, dtype=np.float64)
    codes = np.where(val < -lam, 0, np.where(val < 0.0, 1, np.where(val < lam, 2, 3)))
    codes[:, lam == 0.0] = 2
    return codes.astype(np.uint8)


def pack_codes(codes):
    c = np.ascontiguousarray(codes, dtype=np.uint8).ravel() & 3
    pad = (-c.size) % 4
    if pad:
        c = np.concatenate([c, np.zeros(pad, dtype=np.uint8)])
    q = c.reshape(-1, 4)
    packed = q[:, 0] | (q[:, 1] << 2) | (q[:, 2] << 4) | (q[:, 3] << 6)
    return packed.astype(np.uint8).tobytes()


def unpack_codes(buf, count):
    b = np.frombuffer(bytes(buf), dtype=np.uint8)
    shifts = np.array([0, 2, 4, 6], dtype=np.uint8)
    codes = (b[:, None] >> shifts) & 3
    return codes.ravel()[:count].astype(np.uint8)
