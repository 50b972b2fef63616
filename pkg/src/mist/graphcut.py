"""Grid-graph construction from the segmentation energy and an exact
min-cut solver.

The energy over a binary labeling is a data term (per-pixel color-model
fit) plus a smoothness term over discordant 8-neighbor pairs, weighted by
contrast. The min cut of the corresponding two-terminal network is its
exact global minimum for fixed models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .gmm import GmmModel, mixture_nll
from .raster import BinaryMask, Raster, Trimap, TrimapLabel

GAMMA_DEFAULT = 50.0

# 8-neighborhood enumerated once per unordered pair:
# (dy, dx, euclidean distance between the pixels)
_PAIR_DIRS = ((0, 1, 1.0), (1, 0, 1.0), (1, 1, math.sqrt(2.0)), (1, -1, math.sqrt(2.0)))


def color_values(img) -> np.ndarray:
    """(h, w, 3) float colors in 0..255 for the model/smoothness terms.

    Grayscale replicates to three channels; 16-bit samples are min-max
    rescaled over the image so the color model stays well-conditioned.
    """
    if isinstance(img, np.ndarray):
        arr = img.astype(np.float64)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        return arr
    data = img.data.astype(np.float64)
    if img.depth == 16:
        lo, hi = data.min(), data.max()
        data = (data - lo) * (255.0 / (hi - lo)) if hi > lo else np.zeros_like(data)
    if img.channels == 1:
        data = np.repeat(data[:, :, None], 3, axis=2)
    return data


@dataclass(frozen=True)
class FlowNetwork:
    """Pixel graph: per-node terminal capacities plus symmetric neighbor
    edges. Hard constraints use the `infinite` sentinel, computed per
    network as 1 + the sum of every finite capacity."""

    num_nodes: int
    source_cap: np.ndarray  # (n,)
    sink_cap: np.ndarray    # (n,)
    edges: np.ndarray       # (m, 2) int64
    edge_caps: np.ndarray   # (m,)
    infinite: float
    grid_shape: tuple[int, int]


@dataclass(frozen=True)
class EnergyBreakdown:
    data: float
    smoothness: float

    @property
    def total(self) -> float:
        return self.data + self.smoothness


def _pair_slices(h: int, w: int, dy: int, dx: int):
    """Flat indices of all (p, q) pairs with q = p + (dy, dx)."""
    idx = np.arange(h * w, dtype=np.int64).reshape(h, w)
    ys = slice(max(0, -dy), h - max(0, dy))
    xs = slice(max(0, -dx), w - max(0, dx))
    qys = slice(max(0, dy), h + min(0, dy))
    qxs = slice(max(0, dx), w + min(0, dx))
    return idx[ys, xs].ravel(), idx[qys, qxs].ravel()


def estimate_beta(img) -> float:
    """Contrast normalizer: 1 / (2 <||z_m - z_n||^2>) over all 8-neighbor
    pairs; 0 for a constant image (the smoothness exponent becomes 1)."""
    colors = color_values(img)
    h, w = colors.shape[:2]
    flat = colors.reshape(-1, 3)
    total = 0.0
    count = 0
    for dy, dx, _ in _PAIR_DIRS:
        p, q = _pair_slices(h, w, dy, dx)
        diff = flat[p] - flat[q]
        total += float((diff * diff).sum())
        count += p.shape[0]
    if count == 0 or total == 0.0:
        return 0.0
    return 1.0 / (2.0 * total / count)


def smoothness_weight(z_m, z_n, dist: float, beta: float, gamma: float) -> float:
    """Pairwise penalty paid when the two labels differ."""
    d = np.asarray(z_m, dtype=np.float64) - np.asarray(z_n, dtype=np.float64)
    return gamma / dist * math.exp(-beta * float((d * d).sum()))


def build_network(img, trimap: Trimap, fg: GmmModel, bg: GmmModel,
                  beta: float, gamma: float) -> FlowNetwork:
    """Assemble terminal and neighbor capacities for one cut.

    Probable pixels get source capacity = background-side data term and
    sink capacity = foreground-side data term (cutting the cheaper edge
    assigns the label); hard pixels get the sentinel on their own side.
    """
    colors = color_values(img)
    h, w = colors.shape[:2]
    flat = colors.reshape(-1, 3)
    labels = trimap.labels.ravel()

    src = mixture_nll(bg, flat)  # paid when the pixel is cut to background
    snk = mixture_nll(fg, flat)  # paid when the pixel is cut to foreground

    edge_p = []
    edge_q = []
    edge_c = []
    for dy, dx, dist in _PAIR_DIRS:
        p, q = _pair_slices(h, w, dy, dx)
        diff = flat[p] - flat[q]
        d2 = (diff * diff).sum(axis=1)
        edge_p.append(p)
        edge_q.append(q)
        edge_c.append(gamma / dist * np.exp(-beta * d2))
    edges = np.stack([np.concatenate(edge_p), np.concatenate(edge_q)], axis=1)
    caps = np.concatenate(edge_c)

    hard_fg = labels == TrimapLabel.HARD_FG
    hard_bg = labels == TrimapLabel.HARD_BG
    free = ~(hard_fg | hard_bg)
    finite_total = float(src[free].sum() + snk[free].sum() + caps.sum())
    infinite = 1.0 + finite_total

    src = np.where(hard_fg, infinite, np.where(hard_bg, 0.0, src))
    snk = np.where(hard_bg, infinite, np.where(hard_fg, 0.0, snk))
    return FlowNetwork(h * w, src, snk, edges, caps, infinite, (h, w))


def dump_terminal_weights(net: FlowNetwork, path) -> None:
    """Debug dump: the two per-pixel terminal capacity grids, row-major
    float32, source grid followed by sink grid."""
    h, w = net.grid_shape
    with open(path, "wb") as fh:
        fh.write(net.source_cap.reshape(h, w).astype("<f4").tobytes())
        fh.write(net.sink_cap.reshape(h, w).astype("<f4").tobytes())


def min_cut(net: FlowNetwork) -> tuple[BinaryMask, float]:
    """Exact max-flow; source-side pixels of the residual graph are
    foreground (free pixels fall to the source side)."""
    flow, fg = _kernels.maxflow(net.num_nodes, net.source_cap, net.sink_cap,
                                net.edges, net.edge_caps)
    return BinaryMask(fg.reshape(net.grid_shape)), flow


def energy_of(img, labeling, fg: GmmModel, bg: GmmModel,
              beta: float, gamma: float) -> EnergyBreakdown:
    """Energy of a binary labeling: data term summed over every pixel plus
    smoothness over discordant neighbor pairs."""
    colors = color_values(img)
    h, w = colors.shape[:2]
    flat = colors.reshape(-1, 3)
    bits = labeling.bits if isinstance(labeling, BinaryMask) else np.asarray(labeling)
    fg_flat = bits.ravel().astype(bool)

    data = float(mixture_nll(fg, flat[fg_flat]).sum()
                 + mixture_nll(bg, flat[~fg_flat]).sum())
    smooth = 0.0
    for dy, dx, dist in _PAIR_DIRS:
        p, q = _pair_slices(h, w, dy, dx)
        discordant = fg_flat[p] != fg_flat[q]
        if not discordant.any():
            continue
        diff = flat[p[discordant]] - flat[q[discordant]]
        d2 = (diff * diff).sum(axis=1)
        smooth += float((gamma / dist * np.exp(-beta * d2)).sum())
    return EnergyBreakdown(data, smooth)
