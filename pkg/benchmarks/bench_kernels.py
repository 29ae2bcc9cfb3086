"""Timing comparison of the compiled and pure-python projection kernels.

Runs the same batched workloads through both backends and prints throughput
plus the speedup factor. Usage:

    python3 benchmarks/bench_kernels.py [--n 200000] [--dim 8] [--repeat 3]
"""

import argparse
import time

import numpy as np

from projkit import Ball, Box, Halfspace, Intersection, Simplex
from projkit._kernels import get_backend
from projkit.program import compile_set


def _programs(dim):
    ones = np.ones(dim)
    shift = np.zeros(dim)
    shift[0] = 3.0
    specs = {
        "box": Box(ones, 2.0 * ones),
        "ball": Ball(shift, 1.0),
        "simplex": Simplex(1.0, dim),
        "dykstra2": Intersection(
            (Box(ones, 2.0 * ones), Halfspace(ones, 1.5 * dim + 0.25))
        ),
    }
    return {name: compile_set(spec) for name, spec in specs.items()}


def _run_project(backend, prog, X):
    return backend.project_batch(
        prog.kinds, prog.vec_a, prog.vec_b, prog.shift, prog.scal_a, prog.scal_b,
        prog.max_iter, prog.tol, X,
    )


def _run_fixed_point(backend, prog, lams):
    return backend.fixed_point_batch(
        prog.kinds, prog.vec_a, prog.vec_b, prog.shift, prog.scal_a, prog.scal_b,
        prog.max_iter, prog.tol, lams, 1e-12, 200000,
    )


def _best_of(repeat, fn):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000, help="points per batch")
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3, help="take the best of N runs")
    args = ap.parse_args()

    backends = {}
    for name in ("python", "compiled"):
        try:
            backends[name] = get_backend(name)
        except ImportError:
            print(f"backend {name!r} unavailable, skipping")
    if not backends:
        raise SystemExit("no kernel backend available")

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.n, args.dim)) * 5.0
    lams = np.linspace(-0.99, 0.99, 512)
    progs = _programs(args.dim)

    print(f"n={args.n} dim={args.dim} repeat={args.repeat}")
    header = f"{'workload':<22}{'backend':<10}{'seconds':>10}{'points/s':>14}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for prog_name, prog in progs.items():
        rows = {}
        baseline = None
        for name, backend in backends.items():
            fewer = X[: args.n // 20] if prog_name == "dykstra2" and name == "python" else X
            secs = _best_of(args.repeat, lambda: _run_project(backend, prog, fewer))
            rows[name] = (secs, fewer.shape[0] / secs)
            if name == "python":
                baseline = fewer.shape[0] / secs
        for name, (secs, rate) in rows.items():
            speedup = f"{rate / baseline:7.1f}x" if baseline else "      --"
            print(f"{'project ' + prog_name:<22}{name:<10}{secs:>10.4f}{rate:>14.0f}{speedup:>9}")

    prog = progs["box"]
    rows = {}
    baseline = None
    for name, backend in backends.items():
        secs = _best_of(args.repeat, lambda: _run_fixed_point(backend, prog, lams))
        rows[name] = (secs, lams.size / secs)
        if name == "python":
            baseline = lams.size / secs
    for name, (secs, rate) in rows.items():
        speedup = f"{rate / baseline:7.1f}x" if baseline else "      --"
        print(f"{'fixed-point box':<22}{name:<10}{secs:>10.4f}{rate:>14.0f}{speedup:>9}")

    ref = backends.get("python")
    other = backends.get("compiled")
    if ref is not None and other is not None:
        sample = X[:512]
        for prog_name, prog in progs.items():
            ya = _run_project(ref, prog, sample)[0]
            yb = _run_project(other, prog, sample)[0]
            gap = float(np.max(np.abs(ya - yb)))
            if gap > 1e-12:
                raise SystemExit(f"backend mismatch on {prog_name}: {gap:.3e}")
        print("parity check: max backend deviation <= 1e-12 on 512 samples")


if __name__ == "__main__":
    main()
