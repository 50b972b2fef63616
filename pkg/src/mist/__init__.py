"""Interactive two-stage image segmentation: automatic morphological
marker generation feeding an iterative graph-cut loop, with scribble
refinement, quantitative evaluation, a batch CLI, and an HTTP service."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .engine import (EngineConfig, Scribble, Session, apply_scribbles,
                     extract_mask, iterate, start_session)
from .errors import MistError
from .metrics import dice, hausdorff, kmeans_segment
from .morphology import generate_marker
from .raster import (BinaryMask, BoundingBox, Raster, StructuringElement,
                     Trimap, load_raster, make_disk, make_rect, save_raster,
                     to_grayscale)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BinaryMask",
    "BoundingBox",
    "EngineConfig",
    "KERNEL_BACKEND",
    "MistError",
    "Raster",
    "Scribble",
    "Session",
    "StructuringElement",
    "Trimap",
    "apply_scribbles",
    "dice",
    "extract_mask",
    "generate_marker",
    "hausdorff",
    "iterate",
    "kmeans_segment",
    "load_raster",
    "make_disk",
    "make_rect",
    "save_raster",
    "start_session",
    "to_grayscale",
]
