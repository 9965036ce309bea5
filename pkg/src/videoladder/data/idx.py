"""IDX file parsing for the raw MNIST distribution.

Big-endian throughout: images carry magic 0x00000803 (unsigned byte, rank
3), labels 0x00000801 (unsigned byte, rank 1). Pixel bytes are scaled by
1/255 on load.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from videoladder.errors import DataFormatError

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
SPRITE_SIZE = 28


@dataclass
class SpriteSet:
    """Digit sprites: images (N, 28, 28) float32 in [0, 1], labels (N,)."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.images.ndim != 3 or self.images.shape[1:] != (SPRITE_SIZE, SPRITE_SIZE):
            raise DataFormatError(
                f"sprites must be (N, {SPRITE_SIZE}, {SPRITE_SIZE}), got {self.images.shape}"
            )
        if len(self.labels) != len(self.images):
            raise DataFormatError(
                f"label count {len(self.labels)} does not match image count {len(self.images)}"
            )

    def __len__(self) -> int:
        return len(self.images)

    def subset(self, indices: np.ndarray) -> "SpriteSet":
        return SpriteSet(self.images[indices], self.labels[indices])


def _read_exact(f, n: int, path, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise DataFormatError(f"{path}: truncated while reading {what}")
    return buf


def read_idx_images(path) -> np.ndarray:
    path = Path(path)
    with open(path, "rb") as f:
        magic, count, rows, cols = struct.unpack(
            ">IIII", _read_exact(f, 16, path, "image header")
        )
        if magic != IMAGES_MAGIC:
            raise DataFormatError(
                f"{path}: bad image magic 0x{magic:08x}, expected 0x{IMAGES_MAGIC:08x}"
            )
        raw = _read_exact(f, count * rows * cols, path, f"{count} images")
        if f.read(1):
            raise DataFormatError(f"{path}: trailing bytes after {count} images")
    return np.frombuffer(raw, dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    path = Path(path)
    with open(path, "rb") as f:
        magic, count = struct.unpack(">II", _read_exact(f, 8, path, "label header"))
        if magic != LABELS_MAGIC:
            raise DataFormatError(
                f"{path}: bad label magic 0x{magic:08x}, expected 0x{LABELS_MAGIC:08x}"
            )
        raw = _read_exact(f, count, path, f"{count} labels")
        if f.read(1):
            raise DataFormatError(f"{path}: trailing bytes after {count} labels")
    return np.frombuffer(raw, dtype=np.uint8).copy()


def load_mnist(images_path, labels_path) -> SpriteSet:
    """Parse an images/labels IDX pair into 28x28 sprites scaled to [0, 1]."""
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[1:] != (SPRITE_SIZE, SPRITE_SIZE):
        raise DataFormatError(
            f"{images_path}: expected {SPRITE_SIZE}x{SPRITE_SIZE} images, got {images.shape[1:]}"
        )
    if len(images) != len(labels):
        raise DataFormatError(
            f"image count {len(images)} != label count {len(labels)} "
            f"({images_path} vs {labels_path})"
        )
    return SpriteSet(images.astype(np.float32) / 255.0, labels)


def write_idx_images(path, images: np.ndarray) -> None:
    """Inverse of read_idx_images; used for fixtures and data dumps."""
    images = np.asarray(images, dtype=np.uint8)
    n, rows, cols = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGES_MAGIC, n, rows, cols))
        f.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">II", LABELS_MAGIC, len(labels)))
        f.write(labels.tobytes())
