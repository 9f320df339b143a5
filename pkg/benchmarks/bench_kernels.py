"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from tempgrowth import _kernels_py

try:
    from tempgrowth import _kernels as compiled
except ImportError:  # pragma: no cover
    compiled = None


def workloads(rng: np.random.Generator):
    z = (rng.uniform(0.01, 1, 200_000) * np.exp(1j * rng.uniform(0, 2 * np.pi, 200_000)))
    coeffs = rng.normal(size=7) + 1j * rng.normal(size=7)
    px, py = rng.uniform(-1, 1, (2, 20_000))
    seg = rng.uniform(-1, 1, (4, 500))
    eta = np.array([0, 1, 0.5, 0.125, 0.01], dtype=complex)
    targets = 0.1 * (rng.normal(size=50_000) + 1j * rng.normal(size=50_000))
    return {
        "re_laurent (2e5 pts, degree 6)": lambda k: k.re_laurent(coeffs, z),
        "polyline_min_dist (2e4 pts x 500 segs)": lambda k: k.polyline_min_dist(px, py, *seg),
        "eta_invert (5e4 targets)": lambda k: k.eta_invert(targets, eta, targets.copy()),
    }


def check_agreement(jobs) -> None:
    for name, job in jobs.items():
        a, b = job(_kernels_py), job(compiled)
        if isinstance(a, tuple):
            a, b = a[0], b[0]
        a, b = np.asarray(a), np.asarray(b)
        err = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1.0)))
        print(f"  {name}: max relative difference = {err:.2e}")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    jobs = workloads(np.random.default_rng(0))
    if compiled is None:
        print("compiled extension not built; only the fallback is timed")
    else:
        print("agreement:")
        check_agreement(jobs)
    print(f"{'kernel':42s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, job in jobs.items():
        tp = min(timeit.repeat(lambda: job(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:42s} {tp:12.1f} {'-':>12s} {'-':>8s}")
            continue
        tc = min(timeit.repeat(lambda: job(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:42s} {tp:12.1f} {tc:12.1f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
