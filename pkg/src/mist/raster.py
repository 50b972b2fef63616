"""Pixel-grid containers, label masks, structuring elements, and raster file I/O.

Rasters hold 8- or 16-bit unsigned samples in row-major numpy arrays:
shape (h, w) for grayscale, (h, w, 3) for RGB. All container types are
treated as immutable values after construction.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CorruptFileError,
    DimensionMismatchError,
    UnsupportedFormatError,
    ZeroDimensionError,
)

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Raster:
    """A 2-D image of unsigned samples (1 or 3 channels, 8 or 16 bit)."""

    data: np.ndarray

    def __post_init__(self):
        a = self.data
        if a.dtype not in (np.uint8, np.uint16):
            raise ValueError(f"raster dtype must be uint8/uint16, got {a.dtype}")
        if a.ndim == 3 and a.shape[2] != 3:
            raise ValueError(f"3-D raster data must have 3 channels, got {a.shape[2]}")
        if a.ndim not in (2, 3):
            raise ValueError(f"raster data must be 2-D or (h, w, 3), got shape {a.shape}")
        if a.shape[0] == 0 or a.shape[1] == 0:
            raise ZeroDimensionError(f"zero-dimension raster {a.shape}")
        if not a.flags.c_contiguous:
            object.__setattr__(self, "data", np.ascontiguousarray(a))
        self.data.setflags(write=False)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    @property
    def depth(self) -> int:
        """Bits per sample (8 or 16)."""
        return 8 if self.data.dtype == np.uint8 else 16

    @property
    def max_value(self) -> int:
        return 255 if self.depth == 8 else 65535


@dataclass(frozen=True)
class BinaryMask:
    """One boolean per pixel; annotates a raster of the same shape."""

    bits: np.ndarray

    def __post_init__(self):
        if self.bits.dtype != np.bool_:
            object.__setattr__(self, "bits", self.bits.astype(bool))
        if self.bits.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {self.bits.shape}")
        if not self.bits.flags.c_contiguous:
            object.__setattr__(self, "bits", np.ascontiguousarray(self.bits))
        self.bits.setflags(write=False)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def area(self) -> int:
        return int(self.bits.sum())


class TrimapLabel(enum.IntEnum):
    HARD_BG = 0
    HARD_FG = 1
    PROB_BG = 2
    PROB_FG = 3


@dataclass(frozen=True)
class Trimap:
    """Per-pixel 4-state labeling: hard/probable foreground/background."""

    labels: np.ndarray

    def __post_init__(self):
        a = self.labels
        if a.dtype != np.uint8:
            object.__setattr__(self, "labels", a.astype(np.uint8))
            a = self.labels
        if a.ndim != 2:
            raise ValueError(f"trimap must be 2-D, got shape {a.shape}")
        if a.max(initial=0) > 3:
            raise ValueError("trimap labels must be in {0, 1, 2, 3}")
        if not a.flags.c_contiguous:
            object.__setattr__(self, "labels", np.ascontiguousarray(a))
        self.labels.setflags(write=False)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def foreground(self) -> BinaryMask:
        """Hard-or-probable foreground projection."""
        a = self.labels
        return BinaryMask((a == TrimapLabel.HARD_FG) | (a == TrimapLabel.PROB_FG))

    def background(self) -> BinaryMask:
        a = self.labels
        return BinaryMask((a == TrimapLabel.HARD_BG) | (a == TrimapLabel.PROB_BG))

    def is_hard(self) -> np.ndarray:
        a = self.labels
        return (a == TrimapLabel.HARD_FG) | (a == TrimapLabel.HARD_BG)


@dataclass(frozen=True)
class StructuringElement:
    """Flat, anchor-centered binary neighborhood."""

    offsets: np.ndarray  # (n, 2) int array of (dy, dx), anchor (0, 0) included
    tag: str

    def __post_init__(self):
        offs = np.asarray(self.offsets, dtype=np.int64)
        if offs.ndim != 2 or offs.shape[1] != 2:
            raise ValueError("offsets must be an (n, 2) array")
        if not ((offs[:, 0] == 0) & (offs[:, 1] == 0)).any():
            raise ValueError("anchor cell (0, 0) must be set")
        # canonical order keeps results reproducible across constructions
        order = np.lexsort((offs[:, 1], offs[:, 0]))
        object.__setattr__(self, "offsets", np.ascontiguousarray(offs[order]))
        self.offsets.setflags(write=False)

    def __len__(self) -> int:
        return self.offsets.shape[0]


def make_disk(r: int) -> StructuringElement:
    """Disk of radius r: all offsets with dx^2 + dy^2 <= r^2."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    rng = np.arange(-r, r + 1)
    dy, dx = np.meshgrid(rng, rng, indexing="ij")
    keep = dy * dy + dx * dx <= r * r
    offs = np.stack([dy[keep], dx[keep]], axis=1)
    return StructuringElement(offs, tag=f"disk({r})")


def make_rect(h: int, w: int) -> StructuringElement:
    """All-ones h x w rectangle centered on the anchor (h, w odd)."""
    if h < 1 or w < 1 or h % 2 == 0 or w % 2 == 0:
        raise ValueError("rect dimensions must be odd and >= 1")
    dy, dx = np.meshgrid(np.arange(-(h // 2), h // 2 + 1),
                         np.arange(-(w // 2), w // 2 + 1), indexing="ij")
    offs = np.stack([dy.ravel(), dx.ravel()], axis=1)
    return StructuringElement(offs, tag=f"rect({h}x{w})")


#: 5x5 all-ones element used for marker cleanup.
CLEANUP_RECT = make_rect(5, 5)
#: Elementary 8-connected step used by geodesic reconstruction.
ELEM_8 = make_rect(3, 3)


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel rectangle."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 <= self.x1 and 0 <= self.y0 <= self.y1):
            raise ValueError(f"degenerate bounding box {self}")

    def validate(self, width: int, height: int) -> None:
        if self.x1 >= width or self.y1 >= height:
            raise ValueError(f"bounding box {self} exceeds {width}x{height} image")

    def mask(self, width: int, height: int) -> BinaryMask:
        m = np.zeros((height, width), dtype=bool)
        m[self.y0:self.y1 + 1, self.x0:self.x1 + 1] = True
        return BinaryMask(m)

    def area(self) -> int:
        return (self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1)


def to_grayscale(img: Raster) -> Raster:
    """Collapse to one channel: fixed luma weights, rounded half-up."""
    if img.channels == 1:
        return img
    w = np.asarray(LUMA_WEIGHTS)
    gray = np.floor(img.data.astype(np.float64) @ w + 0.5)
    return Raster(gray.astype(img.data.dtype))


def require_same_shape(a, b) -> None:
    if (a.height, a.width) != (b.height, b.width):
        raise DimensionMismatchError(
            f"shape mismatch: {a.height}x{a.width} vs {b.height}x{b.width}"
        )


# ---------------------------------------------------------------------------
# File I/O: PGM/PPM (binary, 8/16-bit) and PNG (8/16-bit gray, 8-bit RGB).

_PNM_TOKEN = re.compile(rb"(?:\s|#.*\n)*(\S+)")


def _read_pnm_tokens(buf: bytes, n: int) -> tuple[list[bytes], int]:
    """First n whitespace/comment-delimited tokens and the offset past them."""
    tokens = []
    pos = 0
    for _ in range(n):
        m = _PNM_TOKEN.match(buf, pos)
        if not m:
            raise CorruptFileError("truncated PNM header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def _load_pnm(buf: bytes) -> Raster:
    magic = buf[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormatError(f"unsupported PNM magic {magic!r}")
    channels = 1 if magic == b"P5" else 3
    try:
        tokens, pos = _read_pnm_tokens(buf[2:], 3)
        width, height, maxval = (int(t) for t in tokens)
    except (ValueError, CorruptFileError) as e:
        raise CorruptFileError(f"bad PNM header: {e}") from e
    if width == 0 or height == 0:
        raise ZeroDimensionError(f"zero-dimension PNM {width}x{height}")
    if not 0 < maxval < 65536:
        raise CorruptFileError(f"PNM maxval {maxval} out of range")
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    count = width * height * channels
    body = buf[2 + pos + 1:]  # single whitespace byte after maxval
    expected = count * dtype.itemsize
    if len(body) < expected:
        raise CorruptFileError(f"PNM body has {len(body)} bytes, expected {expected}")
    data = np.frombuffer(body[:expected], dtype=dtype).astype(
        np.uint8 if maxval < 256 else np.uint16)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return Raster(data.reshape(shape))


def _save_pnm(path: Path, img: Raster) -> None:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n%d\n" % (magic, img.width, img.height, img.max_value)
    data = img.data
    if img.depth == 16:
        data = data.astype(">u2")
    path.write_bytes(header + data.tobytes())


def _load_png(path: Path) -> Raster:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I"):
                arr = np.asarray(im, dtype=np.int64)
                if arr.max(initial=0) > 65535 or arr.min(initial=0) < 0:
                    raise UnsupportedFormatError("PNG sample range exceeds 16 bits")
                return Raster(arr.astype(np.uint16))
            if mode == "L":
                return Raster(np.asarray(im, dtype=np.uint8))
            if mode == "RGB":
                return Raster(np.asarray(im, dtype=np.uint8))
            if mode in ("P", "RGBA", "LA", "1"):
                conv = im.convert("RGB" if mode in ("P", "RGBA") else "L")
                return Raster(np.asarray(conv, dtype=np.uint8))
            raise UnsupportedFormatError(f"unsupported PNG mode {mode}")
    except UnidentifiedImageError as e:
        raise CorruptFileError(f"unreadable PNG: {e}") from e
    except OSError as e:
        raise CorruptFileError(f"corrupt PNG: {e}") from e


def _save_png(path: Path, img: Raster) -> None:
    from PIL import Image

    if img.channels == 3 and img.depth != 8:
        raise UnsupportedFormatError("PNG RGB output supports 8-bit only")
    im = Image.fromarray(img.data)  # L / I;16 / RGB inferred from dtype+shape
    im.save(path, format="PNG")


def load_raster(path) -> Raster:
    """Load a PGM/PPM/PNG file; 16-bit grayscale is preserved untruncated."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".ppm", ".pnm"):
        return _load_pnm(path.read_bytes())
    if suffix == ".png":
        return _load_png(path)
    # sniff unknown extensions before rejecting
    head = path.read_bytes()[:8]
    if head[:2] in (b"P5", b"P6"):
        return _load_pnm(path.read_bytes())
    if head == b"\x89PNG\r\n\x1a\n":
        return _load_png(path)
    raise UnsupportedFormatError(f"unsupported raster format: {path.name}")


def save_raster(path, img: Raster) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".pnm") and img.channels == 1:
        _save_pnm(path, img)
    elif suffix == ".ppm" and img.channels == 3:
        _save_pnm(path, img)
    elif suffix == ".png":
        _save_png(path, img)
    else:
        raise UnsupportedFormatError(
            f"cannot write {img.channels}-channel raster to {path.name}")


def save_mask(path, mask: BinaryMask) -> None:
    """Masks are written as 8-bit PGM with values 0/255."""
    save_raster(path, Raster(np.where(mask.bits, 255, 0).astype(np.uint8)))


def load_mask(path) -> BinaryMask:
    img = load_raster(path)
    if img.channels != 1:
        raise UnsupportedFormatError("mask files must be single-channel")
    return BinaryMask(img.data > 0)


def save_trimap(path, trimap: Trimap) -> None:
    """Trimaps are 8-bit PGM with values {0=HardBG, 1=HardFG, 2=ProbBG, 3=ProbFG}."""
    save_raster(path, Raster(trimap.labels))


def load_trimap(path) -> Trimap:
    img = load_raster(path)
    if img.channels != 1 or img.depth != 8:
        raise UnsupportedFormatError("trimap files must be 8-bit single-channel")
    if img.data.max(initial=0) > 3:
        raise CorruptFileError("trimap file contains labels outside {0, 1, 2, 3}")
    return Trimap(img.data)
