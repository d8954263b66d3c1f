"""Compare the compiled and numpy grid kernels on an X-ray sized lattice.

    python3 benchmarks/bench_kernels.py [--n 400] [--repeat 3]

Reports wall time per backend and the largest disagreement between the
two relative to the condition sum, plus the error of a few nodes against
the arbitrary-precision evaluator.
"""

from __future__ import annotations

import argparse
import time

import mpmath
import numpy as np

from lavrik import kernels
from lavrik._lambda_quad import lambda_quadrature


def lattice(n: int, region=(-10.0, 30.0, -20.0, 40.0)) -> np.ndarray:
    s1, s2, t1, t2 = region
    x = np.linspace(s1, s2, n)
    y = np.linspace(t1, t2, n)
    S = x[:, None] + 1j * y[None, :]
    S[np.abs(S) < 0.1] = 0.1  # stay off the pole
    return S


def timed(fn, repeat: int):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400, help="lattice side (default 400)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--spot", type=int, default=8, help="nodes checked at high precision")
    args = ap.parse_args(argv)

    S = lattice(args.n)
    kernels.lambda_grid(S[:2, :2], backend="numpy")  # build the node table once
    results = {}
    backends = ["numpy"] + (["cython"] if kernels.compiled is not None else [])
    for name in backends:
        t, (val, cond) = timed(lambda: kernels.lambda_grid(S, backend=name), args.repeat)
        results[name] = (t, val, cond)
        print(f"{name:7s} {S.size:8d} points  {t:8.3f} s  {S.size / t:12.0f} points/s")
    if "cython" in results:
        _, a, cond = results["numpy"]
        _, b, _ = results["cython"]
        print(f"speedup  {results['numpy'][0] / results['cython'][0]:.2f}x")
        print(f"max |cython - numpy| / cond = {np.max(np.abs(a - b) / cond):.2e}")
    else:
        print("compiled kernel not built; only the numpy backend was timed")

    rng = np.random.default_rng(0)
    _, val, cond = results[kernels.BACKEND]
    worst = 0.0
    for _ in range(args.spot):
        i, j = rng.integers(0, args.n, size=2)
        s = complex(S[i, j])
        ref = complex(lambda_quadrature(mpmath.mpc(s), 1, 80)[0])
        worst = max(worst, abs(val[i, j] - ref) / cond[i, j])
    print(f"{kernels.BACKEND} max error / cond over {args.spot} spot checks = {worst:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
