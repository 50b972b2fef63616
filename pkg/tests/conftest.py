"""Shared fixtures and independent oracle implementations.

The oracles here deliberately avoid the package's kernel code paths:
they are plain-Python brute force used to freeze expected values.
"""

from collections import deque

import numpy as np
import pytest

from mist.raster import BinaryMask, Raster

N8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def brute_min_filter(img: np.ndarray, offsets, identity=np.inf) -> np.ndarray:
    h, w = img.shape
    out = np.empty((h, w), dtype=np.float64)
    for y in range(h):
        for x in range(w):
            v = identity
            for dy, dx in offsets:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w:
                    v = min(v, img[ny, nx])
            out[y, x] = v
    return out


def brute_max_filter(img: np.ndarray, offsets) -> np.ndarray:
    return -brute_min_filter(-img.astype(np.float64), offsets)


def naive_reconstruct(marker: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Synchronous elementary geodesic stepping until fixpoint (8-conn)."""
    cur = marker.astype(np.float64).copy()
    mask = mask.astype(np.float64)
    box3 = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)]
    while True:
        nxt = np.minimum(brute_max_filter(cur, box3), mask)
        if np.array_equal(nxt, cur):
            return cur
        cur = nxt


def cc_union_reconstruct(marker: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Binary oracle: union of the mask's 8-connected components that
    intersect the marker."""
    mask = mask.astype(bool)
    marker = marker.astype(bool)
    out = np.zeros_like(mask)
    seen = np.zeros_like(mask)
    h, w = mask.shape
    for sy, sx in np.argwhere(mask & marker):
        if seen[sy, sx]:
            continue
        q = deque([(sy, sx)])
        seen[sy, sx] = True
        while q:
            y, x = q.popleft()
            out[y, x] = True
            for dy, dx in N8:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                    seen[ny, nx] = True
                    q.append((ny, nx))
    return out


def brute_regional_maxima(img: np.ndarray) -> np.ndarray:
    """Plateau flood-fill oracle: a plateau is a maximum unless some member
    has a strictly brighter 8-neighbor."""
    h, w = img.shape
    out = np.zeros((h, w), dtype=bool)
    seen = np.zeros((h, w), dtype=bool)
    for sy in range(h):
        for sx in range(w):
            if seen[sy, sx]:
                continue
            value = img[sy, sx]
            plateau = [(sy, sx)]
            seen[sy, sx] = True
            is_max = True
            i = 0
            while i < len(plateau):
                y, x = plateau[i]
                i += 1
                for dy, dx in N8:
                    ny, nx = y + dy, x + dx
                    if not (0 <= ny < h and 0 <= nx < w):
                        continue
                    if img[ny, nx] > value:
                        is_max = False
                    elif img[ny, nx] == value and not seen[ny, nx]:
                        seen[ny, nx] = True
                        plateau.append((ny, nx))
            if is_max:
                for y, x in plateau:
                    out[y, x] = True
    return out


def brute_components(mask: np.ndarray) -> list:
    """List of 8-connected components as pixel-index sets."""
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for sy, sx in np.argwhere(mask):
        if seen[sy, sx]:
            continue
        q = deque([(sy, sx)])
        seen[sy, sx] = True
        comp = set()
        while q:
            y, x = q.popleft()
            comp.add((y, x))
            for dy, dx in N8:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                    seen[ny, nx] = True
                    q.append((ny, nx))
        comps.append(comp)
    return comps


def enumerate_min_cut(num_nodes, src, snk, edges, caps):
    """Exhaustive oracle: try all 2^n labelings (True = foreground) and
    return (best capacity, set of argmin labelings as bitmasks)."""
    n = num_nodes
    codes = np.arange(2 ** n, dtype=np.int64)
    fg = (codes[:, None] >> np.arange(n)) & 1  # (2^n, n), 1 = foreground
    # label fg cuts the sink edge; label bg cuts the source edge
    cost = fg @ snk + (1 - fg) @ src
    for (a, b), c in zip(edges, caps):
        cost = cost + c * (fg[:, a] != fg[:, b])
    best = cost.min()
    argmin = {int(codes[i]) for i in np.flatnonzero(np.isclose(cost, best, rtol=1e-12))}
    return float(best), argmin


def brute_hausdorff(points1, points2) -> float:
    """O(n*m) double-loop Hausdorff between two point arrays."""
    def directed(a, b):
        worst = 0.0
        for p in a:
            best = min(float(np.hypot(p[0] - q[0], p[1] - q[1])) for q in b)
            worst = max(worst, best)
        return worst
    return max(directed(points1, points2), directed(points2, points1))


def gray(arr) -> Raster:
    return Raster(np.asarray(arr, dtype=np.uint8))


def mask_of(arr) -> BinaryMask:
    return BinaryMask(np.asarray(arr, dtype=bool))


@pytest.fixture(scope="session")
def phantom():
    from mist.synthetic import make_phantom
    return make_phantom(seed=1)


@pytest.fixture(scope="session")
def distractor_phantom():
    from mist.synthetic import make_distractor_phantom
    return make_distractor_phantom(seed=3)
