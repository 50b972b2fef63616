"""Synthetic ground-truthed fixtures used by the test suite, the
benchmark, and the evaluation demos."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryMask, BoundingBox, Raster


@dataclass(frozen=True)
class Phantom:
    image: Raster
    truth: BinaryMask
    bbox: BoundingBox


def _specks(canvas: np.ndarray, rng: np.random.Generator, count: int,
            value: float, avoid: np.ndarray) -> None:
    """Scatter `count` 3-pixel speck clusters outside the avoid mask."""
    h, w = canvas.shape
    placed = 0
    while placed < count:
        y = int(rng.integers(1, h - 1))
        x = int(rng.integers(1, w - 1))
        if avoid[y, x]:
            continue
        canvas[y, x] = value
        canvas[y, x + 1] = value
        canvas[y + 1, x] = value
        placed += 1


def make_phantom(seed: int = 0, size: int = 256, square: int = 30,
                 bg_level: float = 30.0, fg_level: float = 54.0,
                 noise_sigma: float = 8.0, speck_count: int = 30,
                 margin: int = 80) -> Phantom:
    """Bright square on a dark noisy background with random 3-pixel specks
    at the square's brightness, scattered outside the working box.

    The defaults put the square only ~3 sigma above the background and the
    box much larger than the square, the regime where an unconstrained
    box-initialized cut tends to surrender the object to the background
    model while a hard marker holds it.
    """
    rng = np.random.default_rng(seed)
    canvas = np.full((size, size), bg_level, dtype=np.float64)
    y0 = (size - square) // 2
    x0 = (size - square) // 2
    truth = np.zeros((size, size), dtype=bool)
    truth[y0:y0 + square, x0:x0 + square] = True
    canvas[truth] = fg_level

    bbox = BoundingBox(max(0, x0 - margin), max(0, y0 - margin),
                       min(size - 1, x0 + square - 1 + margin),
                       min(size - 1, y0 + square - 1 + margin))
    pad = 8
    avoid = np.zeros_like(truth)
    avoid[max(0, y0 - pad):y0 + square + pad, max(0, x0 - pad):x0 + square + pad] = True
    _specks(canvas, rng, speck_count, fg_level, avoid)

    canvas += rng.normal(0.0, noise_sigma, canvas.shape)
    img = Raster(np.clip(np.round(canvas), 0, 255).astype(np.uint8))
    return Phantom(img, BinaryMask(truth), bbox)


@dataclass(frozen=True)
class DistractorPhantom:
    image: Raster
    truth: BinaryMask
    bbox: BoundingBox
    blob: BinaryMask  # the wrongly-bright attachment a scribble should remove


def make_distractor_phantom(seed: int = 0, size: int = 256, square: int = 60,
                            blob: int = 20, bg_level: float = 30.0,
                            fg_level: float = 200.0, blob_level: float = 140.0,
                            noise_sigma: float = 8.0) -> DistractorPhantom:
    """Bright square with a dimmer blob attached to its right edge.

    The blob is darker than the square so the automatic marker skips it,
    yet bright enough that the first cut keeps it; one background scribble
    across it should carve it away.
    """
    rng = np.random.default_rng(seed)
    canvas = np.full((size, size), bg_level, dtype=np.float64)
    y0 = (size - square) // 2
    x0 = (size - square) // 2
    truth = np.zeros((size, size), dtype=bool)
    truth[y0:y0 + square, x0:x0 + square] = True
    canvas[truth] = fg_level

    by0 = y0 + (square - blob) // 2
    bx0 = x0 + square  # flush against the square's right edge
    blob_mask = np.zeros_like(truth)
    blob_mask[by0:by0 + blob, bx0:bx0 + blob] = True
    canvas[blob_mask] = blob_level

    canvas += rng.normal(0.0, noise_sigma, canvas.shape)
    img = Raster(np.clip(np.round(canvas), 0, 255).astype(np.uint8))

    margin = 50
    bbox = BoundingBox(max(0, x0 - margin), max(0, y0 - margin),
                       min(size - 1, bx0 + blob - 1 + margin),
                       min(size - 1, y0 + square - 1 + margin))
    return DistractorPhantom(img, BinaryMask(truth), bbox, BinaryMask(blob_mask))


def make_bimodal(size: int = 64, low: int = 10, high: int = 200) -> Phantom:
    """Two-valued image: the high-intensity half is the truth mask."""
    data = np.full((size, size), low, dtype=np.uint8)
    truth = np.zeros((size, size), dtype=bool)
    truth[:, size // 2:] = True
    data[truth] = high
    return Phantom(Raster(data), BinaryMask(truth),
                   BoundingBox(0, 0, size - 1, size - 1))
