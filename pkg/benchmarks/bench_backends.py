"""Time the compiled and pure-numpy half-kernel sweeps on icospheres.

    python3 benchmarks/bench_backends.py [--iterations 10] [--repeats 3]
"""
import argparse
import time

import numpy as np

from hlo_denoise import HloConfig, denoise
from hlo_denoise import fixtures as fx
from hlo_denoise._kernels import BACKENDS
from hlo_denoise.metrics import NoiseSpec, add_noise


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        tic = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - tic)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iterations", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--subdivisions", type=int, nargs="+", default=[3, 4, 5])
    args = ap.parse_args()

    cfg = HloConfig(iterations=args.iterations)
    names = [b for b in ("numba", "numpy") if b in BACKENDS]
    print(f"{'vertices':>9} " + " ".join(f"{n + ' s':>10}" for n in names) + f" {'speedup':>8} {'max diff':>9}")
    for s in args.subdivisions:
        mesh = add_noise(fx.icosphere(s), NoiseSpec(0.3, seed=1))
        results = {}
        for name in names:
            denoise(mesh, HloConfig(iterations=1), backend=name)  # JIT warm-up
            results[name] = best_of(lambda: denoise(mesh, cfg, backend=name)[0], args.repeats)
        t = [results[n][0] for n in names]
        diff = (np.abs(results["numba"][1].positions - results["numpy"][1].positions).max()
                if len(names) == 2 else 0.0)
        speed = t[1] / t[0] if len(t) == 2 else float("nan")
        print(f"{mesh.n_vertices:>9} " + " ".join(f"{x:>10.4f}" for x in t)
              + f" {speed:>7.1f}x {diff:>9.1e}")


if __name__ == "__main__":
    main()
