"""Session engine: trimap initialization from bounding box + automatic
marker, the iterative model-refit/min-cut loop, and scribble-driven
re-runs.

Sessions are immutable values; every operation returns an updated
session. Hard trimap labels never flip inside the loop — only scribbles
change them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import gmm, graphcut, morphology
from .errors import EmptyForegroundError, NotIteratedError
from .raster import BinaryMask, BoundingBox, Raster, Trimap, TrimapLabel, to_grayscale

#: Relative slack when checking the per-repetition energy decrease.
_ENERGY_TOL = 1e-9


@dataclass(frozen=True)
class EngineConfig:
    k_iterations: int = 5
    gamma: float = 50.0
    gmm_components: int = 5
    marker_radius: int = 45
    min_component: int = 20
    seed: int = 0
    marker_soft: bool = False  # ablation: marker feeds models but not hard labels

    def __post_init__(self):
        if self.k_iterations < 0 or self.marker_radius < 0 or self.min_component < 0:
            raise ValueError("counts must be non-negative")
        if self.gamma <= 0 or self.gmm_components < 1:
            raise ValueError("gamma must be positive and gmm_components >= 1")


@dataclass(frozen=True)
class Scribble:
    """A brush stroke imposing hard labels: polyline points in image
    coordinates with a round brush; radius 0 paints single pixels."""

    side: str  # "fg" or "bg"
    points: tuple
    brush_radius: float = 0.0

    def __post_init__(self):
        if self.side not in ("fg", "bg"):
            raise ValueError(f"scribble side must be 'fg' or 'bg', got {self.side!r}")
        if not self.points:
            raise ValueError("scribble needs at least one point")
        object.__setattr__(self, "points", tuple((float(x), float(y))
                                                 for x, y in self.points))

    def rasterize(self, width: int, height: int) -> np.ndarray:
        """Boolean mask of painted pixels; strokes are clipped to bounds."""
        out = np.zeros((height, width), dtype=bool)
        r = max(0.0, float(self.brush_radius))
        centers = [self.points[0]]
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            dist = math.hypot(x1 - x0, y1 - y0)
            steps = max(1, int(math.ceil(dist / max(0.5, r * 0.5))))
            centers.extend((x0 + (x1 - x0) * t / steps, y0 + (y1 - y0) * t / steps)
                           for t in range(1, steps + 1))
        ri = int(math.ceil(r))
        for cx, cy in centers:
            x_lo = max(0, int(math.floor(cx - r)))
            x_hi = min(width - 1, int(math.ceil(cx + r)))
            y_lo = max(0, int(math.floor(cy - r)))
            y_hi = min(height - 1, int(math.ceil(cy + r)))
            if x_lo > x_hi or y_lo > y_hi:
                continue
            if ri == 0:
                px, py = int(round(cx)), int(round(cy))
                if 0 <= px < width and 0 <= py < height:
                    out[py, px] = True
                continue
            ys = np.arange(y_lo, y_hi + 1)
            xs = np.arange(x_lo, x_hi + 1)
            dy = (ys - cy)[:, None]
            dx = (xs - cx)[None, :]
            out[y_lo:y_hi + 1, x_lo:x_hi + 1] |= dy * dy + dx * dx <= r * r
        return out


@dataclass(frozen=True, eq=False)
class Session:
    """One interactive segmentation in progress."""

    image: Raster
    bbox: BoundingBox
    marker: BinaryMask
    trimap: Trimap
    fg_model: gmm.GmmModel
    bg_model: gmm.GmmModel
    config: EngineConfig
    beta: float
    energy_log: tuple[graphcut.EnergyBreakdown, ...] = ()
    iterated: bool = False
    colors: np.ndarray = field(repr=False, default=None)

    @property
    def seed(self) -> int:
        return self.config.seed


def _init_models(colors_flat, trimap: Trimap, cfg: EngineConfig):
    fg_sel = trimap.foreground().bits.ravel()
    bg_sel = trimap.background().bits.ravel()
    fg_px = colors_flat[fg_sel]
    bg_px = colors_flat[bg_sel]
    if fg_px.shape[0] == 0:
        raise EmptyForegroundError("trimap has no foreground-side pixels")
    if bg_px.shape[0] == 0:
        raise EmptyForegroundError("trimap has no background-side pixels")
    k_fg = min(cfg.gmm_components, fg_px.shape[0])
    k_bg = min(cfg.gmm_components, bg_px.shape[0])
    fg_model = gmm.init_from_pixels(fg_px, k_fg, cfg.seed)
    bg_model = gmm.init_from_pixels(bg_px, k_bg, cfg.seed + 1)
    return fg_model, bg_model


def start_session(img: Raster, bbox: BoundingBox, cfg: EngineConfig) -> Session:
    """Build the initial trimap and color models.

    Everything outside the box is hard background; the automatic marker
    (restricted to the box) is hard foreground unless marker_soft; the
    rest of the box starts as probable foreground. If the box leaves no
    background at all, a 1-pixel border ring is forced to background.
    """
    bbox.validate(img.width, img.height)
    gray = to_grayscale(img)
    marker_full = morphology.generate_marker(gray, cfg.marker_radius,
                                             cfg.min_component)
    in_box = bbox.mask(img.width, img.height).bits
    marker = BinaryMask(marker_full.bits & in_box)

    labels = np.full((img.height, img.width), int(TrimapLabel.HARD_BG),
                     dtype=np.uint8)
    labels[in_box] = TrimapLabel.PROB_FG
    if not cfg.marker_soft:
        labels[marker.bits] = TrimapLabel.HARD_FG

    bg_side = (labels == TrimapLabel.HARD_BG) | (labels == TrimapLabel.PROB_BG)
    if not bg_side.any():
        ring = np.zeros_like(labels, dtype=bool)
        ring[0, :] = ring[-1, :] = True
        ring[:, 0] = ring[:, -1] = True
        labels[ring] = TrimapLabel.HARD_BG

    trimap = Trimap(labels)
    colors = graphcut.color_values(img)
    beta = graphcut.estimate_beta(colors)
    fg_model, bg_model = _init_models(colors.reshape(-1, 3), trimap, cfg)
    return Session(image=img, bbox=bbox, marker=marker, trimap=trimap,
                   fg_model=fg_model, bg_model=bg_model, config=cfg,
                   beta=beta, colors=colors)


def _refit_side(model, pixels):
    """One hard-assignment refit step; an emptied side keeps its model."""
    if pixels.shape[0] == 0:
        return model
    assign = gmm.assign_components(model, pixels)
    return gmm.refit(pixels, assign, model.n_components)


def iterate(session: Session, k: int) -> Session:
    """Run up to k repetitions of (assign -> refit -> cut -> relabel).

    Stops early when the labeling reaches a fixpoint or a repetition
    fails to decrease the energy (convergence); logged energies are
    non-increasing within the call.
    """
    cfg = session.config
    colors_flat = session.colors.reshape(-1, 3)
    trimap = session.trimap
    fg_model, bg_model = session.fg_model, session.bg_model
    log = list(session.energy_log)
    appended = 0

    for _ in range(k):
        fg_sel = trimap.foreground().bits.ravel()
        new_fg = _refit_side(fg_model, colors_flat[fg_sel])
        new_bg = _refit_side(bg_model, colors_flat[~fg_sel])

        net = graphcut.build_network(session.colors, trimap, new_fg, new_bg,
                                     session.beta, cfg.gamma)
        cut_fg, _ = graphcut.min_cut(net)

        labels = trimap.labels.copy()
        free = (labels == TrimapLabel.PROB_FG) | (labels == TrimapLabel.PROB_BG)
        labels[free & cut_fg.bits] = TrimapLabel.PROB_FG
        labels[free & ~cut_fg.bits] = TrimapLabel.PROB_BG
        new_trimap = Trimap(labels)

        energy = graphcut.energy_of(session.colors, new_trimap.foreground(),
                                    new_fg, new_bg, session.beta, cfg.gamma)
        if appended:
            prev = log[-1].total
            if energy.total > prev + _ENERGY_TOL * (1.0 + abs(prev)):
                break  # no further decrease: converged, keep previous state
        fixpoint = np.array_equal(new_trimap.labels, trimap.labels)
        trimap, fg_model, bg_model = new_trimap, new_fg, new_bg
        log.append(energy)
        appended += 1
        if fixpoint:
            break

    return replace(session, trimap=trimap, fg_model=fg_model, bg_model=bg_model,
                   energy_log=tuple(log), iterated=True)


def apply_scribbles(session: Session, scribbles) -> Session:
    """Impose the scribbled hard labels (later scribbles win), rebuild both
    models from the new projections, and re-run the full loop."""
    labels = session.trimap.labels.copy()
    in_box = session.bbox.mask(session.image.width, session.image.height).bits
    for s in scribbles:
        painted = s.rasterize(session.image.width, session.image.height)
        if s.side == "fg":
            # everything outside the box stays hard background
            labels[painted & in_box] = TrimapLabel.HARD_FG
        else:
            labels[painted] = TrimapLabel.HARD_BG
    trimap = Trimap(labels)
    colors_flat = session.colors.reshape(-1, 3)
    fg_model, bg_model = _init_models(colors_flat, trimap, session.config)
    refreshed = replace(session, trimap=trimap, fg_model=fg_model,
                        bg_model=bg_model)
    return iterate(refreshed, session.config.k_iterations)


def extract_mask(session: Session) -> BinaryMask:
    """Foreground projection of the trimap after at least one solver run."""
    if not session.iterated:
        raise NotIteratedError("session has not been iterated yet")
    return session.trimap.foreground()
