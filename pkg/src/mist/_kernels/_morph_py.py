"""Pure-Python/numpy morphology kernels (fallback backend).

Erosion/dilation are vectorized over structuring-element offsets;
reconstruction uses the raster-scan + FIFO queue algorithm with Python
loops. Out-of-image samples clamp to the operation's identity.
"""

from collections import deque

import numpy as np

_N8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def _minmax_filter(img, offsets, reduce_fn, fill):
    h, w = img.shape
    pad_y = int(np.abs(offsets[:, 0]).max())
    pad_x = int(np.abs(offsets[:, 1]).max())
    padded = np.full((h + 2 * pad_y, w + 2 * pad_x), fill, dtype=np.float64)
    padded[pad_y:pad_y + h, pad_x:pad_x + w] = img
    out = np.full((h, w), fill, dtype=np.float64)
    for dy, dx in offsets:
        window = padded[pad_y + dy:pad_y + dy + h, pad_x + dx:pad_x + dx + w]
        reduce_fn(out, window, out=out)
    return out


def erode_gray(img: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Pointwise neighborhood minimum; float64 in, float64 out."""
    return _minmax_filter(img, offsets, np.minimum, np.inf)


def dilate_gray(img: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Pointwise neighborhood maximum."""
    return _minmax_filter(img, offsets, np.maximum, -np.inf)


def reconstruct_dilation(marker: np.ndarray, mask: np.ndarray):
    """8-connected geodesic reconstruction by dilation.

    Returns (image, passes) where passes counts propagation sweeps until
    stability (>= 1; exactly 1 when the marker is already a fixpoint).
    """
    h, w = marker.shape
    out = marker.copy()
    changed = False

    # forward raster scan: propagate from already-visited neighbors
    fwd = ((-1, -1), (-1, 0), (-1, 1), (0, -1))
    bwd = ((1, -1), (1, 0), (1, 1), (0, 1))
    for y in range(h):
        row = out[y]
        for x in range(w):
            v = row[x]
            for dy, dx in fwd:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and out[ny, nx] > v:
                    v = out[ny, nx]
            v = min(v, mask[y, x])
            if v != row[x]:
                row[x] = v
                changed = True

    # backward raster scan, queueing pixels that can still propagate
    queue = deque()
    for y in range(h - 1, -1, -1):
        for x in range(w - 1, -1, -1):
            v = out[y, x]
            for dy, dx in bwd:
                ny, nx = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx < w and out[ny, nx] > v:
                    v = out[ny, nx]
            v = min(v, mask[y, x])
            if v != out[y, x]:
                out[y, x] = v
                changed = True
            for dy, dx in bwd:
                ny, nx = y + dy, x + dx
                if (0 <= ny < h and 0 <= nx < w
                        and out[ny, nx] < v and out[ny, nx] < mask[ny, nx]):
                    queue.append((y, x))
                    break

    passes = 2 if changed else 1
    drained = False
    while queue:
        y, x = queue.popleft()
        v = out[y, x]
        for dy, dx in _N8:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w:
                cur = out[ny, nx]
                if cur < v and cur < mask[ny, nx]:
                    out[ny, nx] = min(v, mask[ny, nx])
                    queue.append((ny, nx))
                    drained = True
    if drained:
        passes += 1
    return out, passes
