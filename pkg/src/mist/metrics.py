"""Segmentation quality metrics, a k-means baseline, and the batch
evaluation harness."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import engine
from .errors import EmptyMaskError, MistError
from .gmm import _kmeans_assign
from .raster import BinaryMask, BoundingBox, Raster, require_same_shape, to_grayscale


def dice(seg: BinaryMask, gt: BinaryMask) -> float:
    """Overlap coefficient 2|A∩B| / (|A|+|B|); 1.0 when both are empty."""
    require_same_shape(seg, gt)
    a = int(seg.bits.sum())
    b = int(gt.bits.sum())
    if a + b == 0:
        return 1.0
    inter = int((seg.bits & gt.bits).sum())
    return 2.0 * inter / (a + b)


def boundary_points(mask: BinaryMask) -> np.ndarray:
    """(n, 2) y/x coordinates of mask pixels with a non-mask 4-neighbor or
    lying on the image border."""
    bits = mask.bits
    inner = np.zeros_like(bits)
    inner[1:-1, 1:-1] = (bits[1:-1, 1:-1] & bits[:-2, 1:-1] & bits[2:, 1:-1]
                         & bits[1:-1, :-2] & bits[1:-1, 2:])
    return np.argwhere(bits & ~inner)


def hausdorff(seg: BinaryMask, gt: BinaryMask) -> float:
    """Max over both directions of the farthest nearest-boundary distance."""
    require_same_shape(seg, gt)
    if not seg.bits.any() or not gt.bits.any():
        raise EmptyMaskError("hausdorff distance undefined on an empty mask")
    p1 = boundary_points(seg).astype(np.float64)
    p2 = boundary_points(gt).astype(np.float64)
    d12 = cKDTree(p2).query(p1, k=1)[0].max()
    d21 = cKDTree(p1).query(p2, k=1)[0].max()
    return float(max(d12, d21))


def kmeans_segment(img: Raster, classes: int = 2, seed: int = 0) -> BinaryMask:
    """Cluster pixel intensity with Lloyd's iteration; the class with the
    highest mean intensity is foreground."""
    if classes < 2:
        raise ValueError("classes must be >= 2")
    gray = to_grayscale(img)
    intensities = gray.data.astype(np.float64).reshape(-1, 1)
    assign = _kmeans_assign(intensities, classes, np.random.default_rng(seed),
                            max_iter=100)
    means = np.full(classes, -np.inf)
    for c in range(classes):
        sel = assign == c
        if sel.any():
            means[c] = intensities[sel].mean()
    fg_class = int(np.argmax(means))
    bits = (assign == fg_class).reshape(gray.data.shape)
    return BinaryMask(bits)


@dataclass(frozen=True)
class EvalEntry:
    image_id: str
    image: Raster
    truth: BinaryMask


@dataclass(frozen=True)
class EvalRow:
    image_id: str
    method: str
    dice: float | None
    hausdorff: float | None
    runtime: float | None
    error: str | None = None


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]

    def aggregates(self) -> dict:
        out: dict[str, dict] = {}
        for method in sorted({r.method for r in self.rows}):
            ok = [r for r in self.rows if r.method == method and r.error is None]
            err = [r for r in self.rows if r.method == method and r.error]
            out[method] = {
                "dice": float(np.mean([r.dice for r in ok])) if ok else None,
                "hausdorff": float(np.mean([r.hausdorff for r in ok])) if ok else None,
                "runtime": float(np.mean([r.runtime for r in ok])) if ok else None,
                "rows": len(ok),
                "errors": len(err),
            }
        return out

    def to_csv(self) -> str:
        lines = ["image_id,method,dice,hausdorff,runtime_s,error"]
        for r in self.rows:
            lines.append(",".join([
                r.image_id, r.method,
                "" if r.dice is None else f"{r.dice:.6f}",
                "" if r.hausdorff is None else f"{r.hausdorff:.6f}",
                "" if r.runtime is None else f"{r.runtime:.4f}",
                r.error or "",
            ]))
        for method, agg in self.aggregates().items():
            lines.append(",".join([
                "MEAN", method,
                "" if agg["dice"] is None else f"{agg['dice']:.6f}",
                "" if agg["hausdorff"] is None else f"{agg['hausdorff']:.6f}",
                "" if agg["runtime"] is None else f"{agg['runtime']:.4f}",
                f"{agg['errors']} errors" if agg["errors"] else "",
            ]))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = [
            "| image | method | dice | hausdorff | runtime (s) |",
            "|---|---|---|---|---|",
        ]
        for r in self.rows:
            if r.error:
                lines.append(f"| {r.image_id} | {r.method} | error: {r.error} | | |")
            else:
                lines.append(f"| {r.image_id} | {r.method} | {r.dice:.4f} "
                             f"| {r.hausdorff:.3f} | {r.runtime:.3f} |")
        lines.append("")
        lines.append("| method | mean dice | mean hausdorff | mean runtime (s) | errors |")
        lines.append("|---|---|---|---|---|")
        for method, agg in self.aggregates().items():
            d = "-" if agg["dice"] is None else f"{agg['dice']:.4f}"
            h = "-" if agg["hausdorff"] is None else f"{agg['hausdorff']:.3f}"
            t = "-" if agg["runtime"] is None else f"{agg['runtime']:.3f}"
            lines.append(f"| {method} | {d} | {h} | {t} | {agg['errors']} |")
        return "\n".join(lines) + "\n"


def _segment_mist(entry: EvalEntry, cfg: engine.EngineConfig) -> BinaryMask:
    bbox = BoundingBox(0, 0, entry.image.width - 1, entry.image.height - 1)
    session = engine.start_session(entry.image, bbox, cfg)
    session = engine.iterate(session, cfg.k_iterations)
    return engine.extract_mask(session)


def evaluate(entries, methods, cfg: engine.EngineConfig,
             external_masks: dict | None = None) -> EvalReport:
    """Score each method on each corpus entry.

    Built-in methods: "mist" (non-interactive: full-image box, no
    scribbles) and "kmeans". Other names resolve through external_masks:
    {method: {image_id: BinaryMask}}. Per-image failures become row-level
    errors and are excluded from the aggregate means.
    """
    external_masks = external_masks or {}
    rows = []
    for entry in sorted(entries, key=lambda e: e.image_id):
        for method in methods:
            try:
                start = time.perf_counter()
                if method == "mist":
                    seg = _segment_mist(entry, cfg)
                elif method == "kmeans":
                    seg = kmeans_segment(entry.image, 2, cfg.seed)
                elif method in external_masks:
                    seg = external_masks[method].get(entry.image_id)
                    if seg is None:
                        raise MistError(f"no external mask for {entry.image_id}")
                else:
                    raise MistError(f"unknown method {method!r}")
                elapsed = time.perf_counter() - start
                rows.append(EvalRow(entry.image_id, method,
                                    dice(seg, entry.truth),
                                    hausdorff(seg, entry.truth), elapsed))
            except (MistError, ValueError) as e:
                rows.append(EvalRow(entry.image_id, method, None, None, None,
                                    error=str(e)))
    return EvalReport(tuple(rows))
