"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from bitcov import _kernels_py

try:
    from bitcov import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    out = []
    for d in (10, 50):
        a = rng.standard_normal((d, d))
        a = a + a.T
        out.append((f"jacobi_eigh d={d}", lambda k, a=a: k.jacobi_eigh(a.copy(), 1e-12, 100)))
    x = rng.standard_normal((500, 10))
    lam = np.max(np.abs(x), axis=0) * 0.5
    t = rng.uniform(-1, 1, x.shape)
    out.append(("quantize_codes 500x10", lambda k: k.quantize_codes(x, lam, t)))
    big = rng.standard_normal((20000, 50))
    tb = rng.uniform(-1, 1, big.shape)
    lb = np.max(np.abs(big), axis=0)
    out.append(("quantize_codes 20000x50", lambda k: k.quantize_codes(big, lb, tb)))
    codes = rng.integers(0, 4, 10**6).astype(np.uint8)
    blob = _kernels_py.pack_codes(codes)
    out.append(("pack_codes 1e6", lambda k: k.pack_codes(codes)))
    out.append(("unpack_codes 1e6", lambda k: k.unpack_codes(blob, codes.size)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':<26}" + "".join(f"{name:>14}" for name, _ in backends) + (f"{'speedup':>10}" if _kernels else ""))
    for label, fn in cases(np.random.default_rng(0)):
        times = []
        for _, mod in backends:
            timer = timeit.Timer(lambda: fn(mod))
            number, _ = timer.autorange()
            times.append(min(timer.repeat(args.repeat, number)) / number)
        row = f"{label:<26}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)
    if _kernels is None:
        print("compiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
