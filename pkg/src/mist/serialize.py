"""Run-length encoding and session JSON persistence.

RLE is row-major [value, count] pairs; the same encoding serves trimaps
(values 0..3), masks (0/1), and the HTTP wire format.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .engine import EngineConfig, Session
from .graphcut import EnergyBreakdown, color_values, estimate_beta
from .raster import BinaryMask, BoundingBox, Raster, Trimap

SCHEMA_VERSION = 1


def encode_rle(flat: np.ndarray) -> list:
    flat = np.asarray(flat).ravel()
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [flat.size]))
    return [[int(flat[s]), int(e - s)] for s, e in zip(starts, ends)]


def decode_rle(runs: list, size: int, dtype=np.uint8) -> np.ndarray:
    out = np.empty(size, dtype=dtype)
    pos = 0
    for value, count in runs:
        out[pos:pos + count] = value
        pos += count
    if pos != size:
        raise ValueError(f"RLE decodes to {pos} samples, expected {size}")
    return out


def mask_to_rle(mask: BinaryMask) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "width": mask.width,
        "height": mask.height,
        "rle": encode_rle(mask.bits.astype(np.uint8)),
    }


def rle_to_mask(doc: dict) -> BinaryMask:
    bits = decode_rle(doc["rle"], doc["width"] * doc["height"])
    return BinaryMask(bits.reshape(doc["height"], doc["width"]) > 0)


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_to_dict(cfg: EngineConfig) -> dict:
    return {
        "k_iterations": cfg.k_iterations,
        "gamma": cfg.gamma,
        "gmm_components": cfg.gmm_components,
        "marker_radius": cfg.marker_radius,
        "min_component": cfg.min_component,
        "seed": cfg.seed,
        "marker_soft": cfg.marker_soft,
    }


def config_from_dict(doc: dict) -> EngineConfig:
    return EngineConfig(**doc)


def energy_log_to_list(log) -> list:
    return [{"data": e.data, "smoothness": e.smoothness, "total": e.total}
            for e in log]


def session_to_dict(session: Session, image_path: str, image_hash: str) -> dict:
    """JSON-able session document; the image travels by path + hash."""
    return {
        "v": SCHEMA_VERSION,
        "image": {"path": str(image_path), "sha256": image_hash},
        "bbox": [session.bbox.x0, session.bbox.y0, session.bbox.x1, session.bbox.y1],
        "config": config_to_dict(session.config),
        "trimap_rle": encode_rle(session.trimap.labels),
        "marker_rle": encode_rle(session.marker.bits.astype(np.uint8)),
        "energy_log": energy_log_to_list(session.energy_log),
        "iterated": session.iterated,
    }


def session_from_dict(doc: dict, image: Raster) -> Session:
    """Rebuild a session around an already-loaded image."""
    if doc.get("v") != SCHEMA_VERSION:
        raise ValueError(f"unsupported session schema version {doc.get('v')!r}")
    h, w = image.height, image.width
    cfg = config_from_dict(doc["config"])
    trimap = Trimap(decode_rle(doc["trimap_rle"], h * w).reshape(h, w))
    marker = BinaryMask(decode_rle(doc["marker_rle"], h * w).reshape(h, w) > 0)
    bbox = BoundingBox(*doc["bbox"])
    colors = color_values(image)
    beta = estimate_beta(colors)
    log = tuple(EnergyBreakdown(e["data"], e["smoothness"])
                for e in doc["energy_log"])
    # models are re-derived from the stored trimap projections, exactly as
    # a scribble re-run would do
    from .engine import _init_models
    fg_model, bg_model = _init_models(colors.reshape(-1, 3), trimap, cfg)
    return Session(image=image, bbox=bbox, marker=marker, trimap=trimap,
                   fg_model=fg_model, bg_model=bg_model, config=cfg,
                   beta=beta, energy_log=log, iterated=doc["iterated"],
                   colors=colors)
