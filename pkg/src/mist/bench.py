"""Benchmark the compiled kernels against the pure-Python fallback on the
three hot loops: erosion, geodesic reconstruction, and max-flow."""

from __future__ import annotations

import time

import numpy as np

from ._kernels import PURE_BACKEND, compiled_backend
from .raster import make_disk


def _time(fn, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(size: int, rng: np.random.Generator):
    img = rng.integers(0, 256, (size, size)).astype(np.float64)
    radius = max(5, size // 6)  # keep the element at the pipeline's scale
    disk = make_disk(radius).offsets
    marker = np.maximum(img - 40.0, 0.0)

    n = size * size
    idx = np.arange(n).reshape(size, size)
    right = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    down = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    edges = np.concatenate([right, down]).astype(np.int64)
    caps = rng.uniform(0.5, 4.0, edges.shape[0])
    src = rng.uniform(0.0, 10.0, n)
    snk = rng.uniform(0.0, 10.0, n)

    return {
        f"erode(disk r={radius})": lambda k: k["erode_gray"](img, disk),
        "reconstruct": lambda k: k["reconstruct_dilation"](marker, img),
        "maxflow(grid)": lambda k: k["maxflow"](n, src, snk, edges, caps),
    }


def run_benchmark(size: int = 192, repeat: int = 3) -> None:
    compiled = compiled_backend()
    rng = np.random.default_rng(0)
    workloads = _workloads(size, rng)

    print(f"kernel benchmark on a {size}x{size} grid (best of {repeat})")
    header = f"{'kernel':<18} {'python':>10} {'compiled':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, work in workloads.items():
        t_py = _time(lambda: work(PURE_BACKEND), repeat)
        if compiled is None:
            print(f"{name:<18} {t_py:>9.3f}s {'n/a':>10} {'n/a':>9}")
            continue
        t_c = _time(lambda: work(compiled), repeat)
        print(f"{name:<18} {t_py:>9.3f}s {t_c:>9.3f}s {t_py / t_c:>8.1f}x")
    if compiled is None:
        print("compiled extension not available; showing fallback only")
