"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from weylstrip import _pykernels

try:
    from weylstrip import _ckernels
except ImportError:
    _ckernels = None


def _table(rng, nd, n):
    origin = np.full(nd, -2.0)
    step = np.full(nd, 4.0 / (n - 1))
    values = rng.normal(size=(n,) * nd) + 1j * rng.normal(size=(n,) * nd)
    return origin, step, values


def workloads(rng):
    origin, step, values = _table(rng, 2, 256)
    pts = rng.uniform(-2.0, 2.0, size=(200_000, 2))
    yield "interp_multilinear 2D, 200k points", "interp_multilinear", (origin, step, values, pts, True)

    t1, t2 = _table(rng, 2, 128), _table(rng, 2, 128)
    xs = np.linspace(-0.5, 0.5, 16)[:, None]
    ks = np.linspace(-1.0, 1.0, 64)[:, None]
    vs = np.linspace(-1.0, 1.0, 128)[:, None]
    yield "moyal00_sampled 16x64 outputs, 128 v", "moyal00_sampled", (*t1, *t2, xs, ks, vs, 0.01)

    pts = rng.uniform(-3.0, 3.0, size=(1500, 2))
    phi = 0.5 * np.sum(pts**2, axis=1)
    Mt = np.eye(2) * 0.25
    yield "growth_pair_scan 1500 points (d=2)", "growth_pair_scan", (pts, phi, Mt, np.zeros(2), 1.0, 0.25)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    if _ckernels is None:
        print("compiled kernels not built; timing the numpy fallback only")
    print(f"{'workload':<40} {'numpy [s]':>10} {'cython [s]':>11} {'speedup':>8}")
    for label, name, call_args in workloads(rng):
        py_t = min(timeit.repeat(lambda: getattr(_pykernels, name)(*call_args), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:<40} {py_t:>10.4f} {'-':>11} {'-':>8}")
            continue
        c_t = min(timeit.repeat(lambda: getattr(_ckernels, name)(*call_args), number=1, repeat=args.repeat))
        print(f"{label:<40} {py_t:>10.4f} {c_t:>11.4f} {py_t / c_t:>7.1f}x")


if __name__ == "__main__":
    main()
