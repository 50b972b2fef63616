# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled morphology kernels.

Erosion/dilation decompose the structuring element into horizontal runs
and use the van Herk sliding-window min/max (O(1) per pixel per run) when
every row of the element is contiguous — true for disks and rectangles.
Other elements take the generic per-offset path. Reconstruction is the
raster-scan + FIFO queue algorithm.
"""

from libc.math cimport INFINITY

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef _row_runs(cnp.ndarray[cnp.int64_t, ndim=2] offsets):
    """[(dy, lo, hi)] when every element row is a contiguous dx range."""
    rows = {}
    cdef Py_ssize_t k
    for k in range(offsets.shape[0]):
        dy = int(offsets[k, 0])
        dx = int(offsets[k, 1])
        lo, hi, cnt = rows.get(dy, (dx, dx, 0))
        rows[dy] = (min(lo, dx), max(hi, dx), cnt + 1)
    runs = []
    for dy, (lo, hi, cnt) in sorted(rows.items()):
        if cnt != hi - lo + 1:
            return None
        runs.append((dy, lo, hi))
    return runs


cdef void _sliding_rows(const cnp.float64_t[:, ::1] img, cnp.float64_t[:, ::1] out,
                        Py_ssize_t dy, Py_ssize_t lo, Py_ssize_t hi,
                        cnp.float64_t[::1] padded, cnp.float64_t[::1] fwd,
                        cnp.float64_t[::1] bwd, double identity, bint is_min):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t win = hi - lo + 1
    cdef Py_ssize_t length = w + win - 1
    cdef Py_ssize_t y, ys, j, x, src
    cdef double v, a, b
    for y in range(h):
        ys = y + dy
        if ys < 0 or ys >= h:
            continue  # outside rows contribute only the identity
        for j in range(length):
            src = j + lo
            padded[j] = img[ys, src] if 0 <= src < w else identity
        for j in range(length):
            v = padded[j]
            if j % win != 0:
                if is_min:
                    v = v if v < fwd[j - 1] else fwd[j - 1]
                else:
                    v = v if v > fwd[j - 1] else fwd[j - 1]
            fwd[j] = v
        for j in range(length - 1, -1, -1):
            v = padded[j]
            if (j + 1) % win != 0 and j != length - 1:
                if is_min:
                    v = v if v < bwd[j + 1] else bwd[j + 1]
                else:
                    v = v if v > bwd[j + 1] else bwd[j + 1]
            bwd[j] = v
        for x in range(w):
            a = bwd[x]
            b = fwd[x + win - 1]
            v = (a if a < b else b) if is_min else (a if a > b else b)
            if is_min:
                if v < out[y, x]:
                    out[y, x] = v
            else:
                if v > out[y, x]:
                    out[y, x] = v


cdef _filter_generic(const cnp.float64_t[:, ::1] img,
                     cnp.ndarray[cnp.int64_t, ndim=2] offsets,
                     double identity, bint is_min):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t n_off = offsets.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((h, w))
    cdef cnp.float64_t[:, ::1] out = out_arr
    cdef const cnp.int64_t[:, ::1] offs = offsets
    cdef Py_ssize_t y, x, k, ny, nx
    cdef double v, s
    for y in range(h):
        for x in range(w):
            v = identity
            for k in range(n_off):
                ny = y + offs[k, 0]
                nx = x + offs[k, 1]
                if 0 <= ny < h and 0 <= nx < w:
                    s = img[ny, nx]
                    if (s < v) if is_min else (s > v):
                        v = s
            out[y, x] = v
    return out_arr


cdef _filter(cnp.ndarray[cnp.float64_t, ndim=2] img,
             cnp.ndarray[cnp.int64_t, ndim=2] offsets,
             double identity, bint is_min):
    runs = _row_runs(offsets)
    if runs is None:
        return _filter_generic(img, offsets, identity, is_min)
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.full((h, w), identity)
    cdef Py_ssize_t max_len = 0
    for _, lo, hi in runs:
        max_len = max(max_len, w + (hi - lo))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] padded = np.empty(max_len)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fwd = np.empty(max_len)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bwd = np.empty(max_len)
    for dy, lo, hi in runs:
        _sliding_rows(img, out_arr, dy, lo, hi, padded, fwd, bwd, identity, is_min)
    return out_arr


def erode_gray(cnp.ndarray[cnp.float64_t, ndim=2] img,
               cnp.ndarray[cnp.int64_t, ndim=2] offsets):
    return _filter(np.ascontiguousarray(img), np.ascontiguousarray(offsets),
                   INFINITY, True)


def dilate_gray(cnp.ndarray[cnp.float64_t, ndim=2] img,
                cnp.ndarray[cnp.int64_t, ndim=2] offsets):
    return _filter(np.ascontiguousarray(img), np.ascontiguousarray(offsets),
                   -INFINITY, False)


def reconstruct_dilation(cnp.ndarray[cnp.float64_t, ndim=2] marker,
                         cnp.ndarray[cnp.float64_t, ndim=2] mask):
    """Hybrid reconstruction-by-dilation; returns (image, passes)."""
    cdef Py_ssize_t h = marker.shape[0], w = marker.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = marker.copy()
    cdef cnp.float64_t[:, ::1] mask_v = np.ascontiguousarray(mask)
    cdef Py_ssize_t y, x, k, ny, nx
    cdef double v, cur
    cdef bint changed = False, drained = False, queue_me

    cdef int[8] dy8 = [-1, -1, -1, 0, 0, 1, 1, 1]
    cdef int[8] dx8 = [-1, 0, 1, -1, 1, -1, 0, 1]
    # scan-order neighbor splits: fwd = visited before p, bwd = after p
    cdef int[4] fdy = [-1, -1, -1, 0]
    cdef int[4] fdx = [-1, 0, 1, -1]
    cdef int[4] bdy = [1, 1, 1, 0]
    cdef int[4] bdx = [-1, 0, 1, 1]

    for y in range(h):
        for x in range(w):
            v = out[y, x]
            for k in range(4):
                ny = y + fdy[k]
                nx = x + fdx[k]
                if 0 <= ny < h and 0 <= nx < w and out[ny, nx] > v:
                    v = out[ny, nx]
            if v > mask_v[y, x]:
                v = mask_v[y, x]
            if v != out[y, x]:
                out[y, x] = v
                changed = True

    # FIFO queue as a growable index buffer
    cdef list queue = []
    for y in range(h - 1, -1, -1):
        for x in range(w - 1, -1, -1):
            v = out[y, x]
            for k in range(4):
                ny = y + bdy[k]
                nx = x + bdx[k]
                if 0 <= ny < h and 0 <= nx < w and out[ny, nx] > v:
                    v = out[ny, nx]
            if v > mask_v[y, x]:
                v = mask_v[y, x]
            if v != out[y, x]:
                out[y, x] = v
                changed = True
            queue_me = False
            for k in range(4):
                ny = y + bdy[k]
                nx = x + bdx[k]
                if 0 <= ny < h and 0 <= nx < w:
                    if out[ny, nx] < v and out[ny, nx] < mask_v[ny, nx]:
                        queue_me = True
                        break
            if queue_me:
                queue.append(y * w + x)

    cdef Py_ssize_t qhead = 0, p
    while qhead < len(queue):
        p = queue[qhead]
        qhead += 1
        y = p // w
        x = p - y * w
        v = out[y, x]
        for k in range(8):
            ny = y + dy8[k]
            nx = x + dx8[k]
            if 0 <= ny < h and 0 <= nx < w:
                cur = out[ny, nx]
                if cur < v and cur < mask_v[ny, nx]:
                    out[ny, nx] = v if v < mask_v[ny, nx] else mask_v[ny, nx]
                    queue.append(ny * w + nx)
                    drained = True

    cdef int passes = 2 if changed else 1
    if drained:
        passes += 1
    return out, passes
