"""Time batched polynomial evaluation over GF(2^6) and GF(2^18).

Compares the numba kernels, the numpy fallback and the exact Python-int
path that large fields use.  Run: python benchmarks/bench_field.py
"""

import argparse
import time

import numpy as np

from dphist import _accel
from dphist.gf2 import FieldParams


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=1 << 18)
    ap.add_argument("--degree", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"numba available: {_accel.njit is not None}")
    for ell in (1, 2):
        fp = FieldParams(ell)
        coeffs = rng.integers(0, fp.order, size=(args.rows, args.degree + 1), dtype=np.uint64)
        xs = rng.integers(0, fp.order, size=args.rows, dtype=np.uint64)
        results = {}
        backends = ["numpy"] + (["numba"] if _accel.njit is not None else [])
        if "numba" in backends:
            _accel.horner(coeffs[:4], xs[:4], fp.bits, fp.half, backend="numba")   # compile
        for backend in backends:
            sec, out = timed(lambda: _accel.horner(coeffs, xs, fp.bits, fp.half, backend=backend), args.repeat)
            results[backend] = out
            print(f"GF(2^{fp.bits}) {backend:6s} {args.rows} evals: {sec * 1e3:8.1f} ms")
        sample = min(args.rows, 20000)
        rows = [[int(c) for c in r] for r in coeffs[:sample]]
        sec, out = timed(lambda: [fp.evaluate(r, int(x)) for r, x in zip(rows, xs[:sample])], 1)
        print(f"GF(2^{fp.bits}) python {sample} evals: {sec * 1e3:8.1f} ms "
              f"(~{sec * args.rows / sample * 1e3:.0f} ms scaled)")
        ref = results["numpy"]
        assert all((v == ref).all() for v in results.values())
        assert out == ref[:sample].tolist()


if __name__ == "__main__":
    main()
