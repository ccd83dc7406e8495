"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--sizes 32 64 128] [--trials 20000]
"""

import argparse
import time

import numpy as np

from matchpd import _backend, _pykernels, online
from matchpd.generators import upper_triangular
from matchpd.graph import BipartiteInstance
from matchpd.hungarian import hungarian_solve


def timed(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_hungarian(sizes):
    compiled = _backend.BACKEND
    rows = []
    for n in sizes:
        inst = BipartiteInstance.complete(
            np.random.default_rng(n).integers(0, 1000, size=(n, n)).tolist())
        res = {}
        for name in ("compiled", "python"):
            if name == "compiled" and compiled != "compiled":
                continue
            _backend.BACKEND = name
            res[name] = timed(lambda: hungarian_solve(inst), repeat=1 if n > 128 else 3)
        _backend.BACKEND = compiled
        rows.append((f"hungarian n={n}", res))
    return rows


def bench_greedy(n, trials):
    inst = upper_triangular(n)
    res = {}
    saved = online.kernels
    for name, mod in (("compiled", _backend.kernels), ("python", _pykernels)):
        if name == "compiled" and _backend.BACKEND != "compiled":
            continue
        online.kernels = mod
        res[name] = timed(lambda: online.monte_carlo_ratio(inst, trials, 1, threads=1))
    online.kernels = saved
    return [(f"ranking U_{n}, {trials} trials", res)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--offline", type=int, default=20)
    args = ap.parse_args()
    print(f"backend at import: {_backend.BACKEND}")
    print(f"{'case':34s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for label, res in bench_hungarian(args.sizes) + bench_greedy(args.offline, args.trials):
        c, p = res.get("compiled"), res["python"]
        speed = f"{p / c:7.1f}x" if c else "    n/a"
        print(f"{label:34s} {c if c else float('nan'):10.4f} {p:10.4f} {speed}")


if __name__ == "__main__":
    main()
