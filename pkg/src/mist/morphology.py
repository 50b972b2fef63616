"""Flat grayscale morphology, geodesic reconstruction, and automatic
marker generation (stage one of the pipeline).

All operations are pure functions on single-channel rasters. Border
samples clamp to the operation's identity (max for erosion, min for
dilation) so no artificial extrema appear at the edge. Connectivity is
8-connected throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels
from .errors import MarkerExceedsMaskError
from .raster import (
    CLEANUP_RECT,
    ELEM_8,
    BinaryMask,
    Raster,
    StructuringElement,
    make_disk,
    require_same_shape,
)

_CONN8 = np.ones((3, 3), dtype=bool)


def _require_gray(img: Raster) -> None:
    if img.channels != 1:
        raise ValueError("operation requires a single-channel raster")


def _as_float(img: Raster) -> np.ndarray:
    return img.data.astype(np.float64)


def _as_raster_like(data: np.ndarray, ref: Raster) -> Raster:
    return Raster(data.astype(ref.data.dtype))


def erode(img: Raster, se: StructuringElement) -> Raster:
    """Pointwise minimum over the structuring element's neighborhood."""
    _require_gray(img)
    out = _kernels.erode_gray(_as_float(img), se.offsets)
    return _as_raster_like(out, img)


def dilate(img: Raster, se: StructuringElement) -> Raster:
    """Pointwise maximum over the structuring element's neighborhood."""
    _require_gray(img)
    out = _kernels.dilate_gray(_as_float(img), se.offsets)
    return _as_raster_like(out, img)


def complement(img: Raster) -> Raster:
    return Raster((img.max_value - img.data.astype(np.int64)).astype(img.data.dtype))


def geodesic_dilate_step(marker: Raster, mask: Raster,
                         se: StructuringElement = ELEM_8) -> Raster:
    """One geodesic step: dilate the marker, clip under the mask."""
    require_same_shape(marker, mask)
    if np.any(marker.data > mask.data):
        raise MarkerExceedsMaskError("marker must be <= mask pointwise")
    stepped = _kernels.dilate_gray(_as_float(marker), se.offsets)
    return _as_raster_like(np.minimum(stepped, _as_float(mask)), marker)


@dataclass(frozen=True)
class ReconstructionResult:
    """Reconstruction fixpoint plus the propagation passes it took.

    `iterations` counts propagation passes until stability (exactly 1 when
    the marker is already a fixpoint); the image itself is always a
    fixpoint of one further geodesic step.
    """

    image: Raster
    iterations: int


def reconstruct_by_dilation(marker: Raster, mask: Raster,
                            se: StructuringElement = ELEM_8) -> ReconstructionResult:
    """Repeat geodesic dilation until no pixel changes.

    With the elementary 8-connected step this runs the raster-scan + FIFO
    queue algorithm; any other step element falls back to naive stepping.
    """
    require_same_shape(marker, mask)
    if np.any(marker.data > mask.data):
        raise MarkerExceedsMaskError("marker must be <= mask pointwise")
    if np.array_equal(se.offsets, ELEM_8.offsets):
        out, passes = _kernels.reconstruct_dilation(_as_float(marker), _as_float(mask))
        return ReconstructionResult(_as_raster_like(out, marker), passes)
    # arbitrary step element: iterate the definition directly
    cur = _as_float(marker)
    mask_f = _as_float(mask)
    iterations = 0
    while True:
        nxt = np.minimum(_kernels.dilate_gray(cur, se.offsets), mask_f)
        iterations += 1
        if np.array_equal(nxt, cur):
            break
        cur = nxt
    return ReconstructionResult(_as_raster_like(cur, marker), iterations)


def opening_by_reconstruction(img: Raster, se: StructuringElement,
                              step_se: StructuringElement = ELEM_8) -> Raster:
    """Erode, then reconstruct under the original image (anti-extensive)."""
    _require_gray(img)
    return reconstruct_by_dilation(erode(img, se), img, step_se).image


def closing_by_reconstruction(img: Raster, se: StructuringElement,
                              step_se: StructuringElement = ELEM_8) -> Raster:
    """Dual of opening: complement, open, complement back (extensive).

    Equivalent to dilating and reconstructing-by-erosion toward the image
    from above, written through complements so one kernel serves both.
    """
    _require_gray(img)
    return complement(opening_by_reconstruction(complement(img), se, step_se))


def regional_maxima(img: Raster) -> BinaryMask:
    """Pixels whose 8-connected constant plateau has no brighter neighbor."""
    _require_gray(img)
    vals = img.data.astype(np.float64)
    rec, _ = _kernels.reconstruct_dilation(vals - 1.0, vals)
    return BinaryMask(vals > rec)


def binary_close(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Dilate then erode with the same element."""
    bits = mask.bits.astype(np.float64)
    closed = _kernels.erode_gray(_kernels.dilate_gray(bits, se.offsets), se.offsets)
    return BinaryMask(closed > 0.5)


def binary_erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    bits = mask.bits.astype(np.float64)
    return BinaryMask(_kernels.erode_gray(bits, se.offsets) > 0.5)


def remove_small_components(mask: BinaryMask, min_pixels: int) -> BinaryMask:
    """Clear 8-connected components with area below min_pixels."""
    if min_pixels < 0:
        raise ValueError("min_pixels must be >= 0")
    if min_pixels == 0 or not mask.bits.any():
        return mask
    labels, count = ndimage.label(mask.bits, structure=_CONN8)
    if count == 0:
        return mask
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    keep = areas >= min_pixels
    keep[0] = False
    return BinaryMask(keep[labels])


@dataclass(frozen=True)
class MarkerStages:
    """Intermediates of the marker pipeline, dumpable for debugging."""

    smoothed_open: Raster    # after opening-by-reconstruction
    smoothed: Raster         # after the closing that follows
    raw_marker: BinaryMask   # regional maxima
    marker: BinaryMask       # after close/erode/small-component cleanup


def marker_pipeline(img: Raster, r: int, min_pixels: int = 20,
                    strict_paper_steps: bool = False) -> MarkerStages:
    """Run the full stage-one pipeline, keeping intermediates.

    The reconstruction step element defaults to the elementary 8-connected
    box; strict_paper_steps instead uses the disk itself for the geodesic
    steps (same fixpoint connectivity is not guaranteed, kept for
    comparison runs).
    """
    _require_gray(img)
    disk = make_disk(r)
    step = disk if strict_paper_steps else ELEM_8
    opened = opening_by_reconstruction(img, disk, step)
    smoothed = closing_by_reconstruction(opened, disk, step)
    raw = regional_maxima(smoothed)
    cleaned = remove_small_components(
        binary_erode(binary_close(raw, CLEANUP_RECT), CLEANUP_RECT), min_pixels)
    return MarkerStages(opened, smoothed, raw, cleaned)


def generate_marker(img: Raster, r: int, min_pixels: int = 20,
                    strict_paper_steps: bool = False) -> BinaryMask:
    """Automatic foreground marker from morphological smoothing and
    regional maxima, with close/erode/small-component cleanup."""
    return marker_pipeline(img, r, min_pixels, strict_paper_steps).marker
