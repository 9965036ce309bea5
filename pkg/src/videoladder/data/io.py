"""Sequence dump files and PNG frame grids.

Dump format: four little-endian uint32 header fields (sequence count,
frames per sequence = 20, height = 64, width = 64), then for each sequence
its frames as raw bytes, pixel value v stored as round(255 * v).

PNG grids quantize the same way and separate 64x64 cells with a 2-pixel
black margin.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from videoladder.errors import DataFormatError
from videoladder.data.moving_mnist import FRAME_SIZE, PAST_FRAMES, SEQUENCE_LENGTH

GRID_MARGIN = 2


def quantize(frames: np.ndarray) -> np.ndarray:
    return np.rint(np.asarray(frames) * 255.0).astype(np.uint8)


def write_sequence_dump(path, sequences: np.ndarray) -> None:
    """``sequences``: (count, 20, 64, 64) float array in [0, 1]."""
    sequences = np.asarray(sequences)
    count, frames, h, w = sequences.shape
    with open(path, "wb") as f:
        f.write(struct.pack("<IIII", count, frames, h, w))
        f.write(quantize(sequences).tobytes())


def read_sequence_dump(path) -> np.ndarray:
    """Returns (count, frames, H, W) float32 in [0, 1]."""
    path = Path(path)
    with open(path, "rb") as f:
        header = f.read(16)
        if len(header) != 16:
            raise DataFormatError(f"{path}: truncated dump header")
        count, frames, h, w = struct.unpack("<IIII", header)
        raw = f.read(count * frames * h * w)
        if len(raw) != count * frames * h * w:
            raise DataFormatError(f"{path}: truncated dump payload")
    data = np.frombuffer(raw, dtype=np.uint8).reshape(count, frames, h, w)
    return data.astype(np.float32) / 255.0


def _assemble_grid(cells: np.ndarray) -> np.ndarray:
    """cells: (rows, cols, H, W) uint8 -> one uint8 image with margins."""
    rows, cols, h, w = cells.shape
    m = GRID_MARGIN
    grid = np.zeros((rows * h + (rows + 1) * m, cols * w + (cols + 1) * m), dtype=np.uint8)
    for r in range(rows):
        for c in range(cols):
            y = m + r * (h + m)
            x = m + c * (w + m)
            grid[y : y + h, x : x + w] = cells[r, c]
    return grid


def sequence_grid(frames: np.ndarray) -> np.ndarray:
    """2x10 grid: first row past frames, second row future frames."""
    if frames.shape != (SEQUENCE_LENGTH, FRAME_SIZE, FRAME_SIZE):
        raise DataFormatError(
            f"expected ({SEQUENCE_LENGTH}, {FRAME_SIZE}, {FRAME_SIZE}) frames, got {frames.shape}"
        )
    cells = quantize(frames).reshape(2, PAST_FRAMES, FRAME_SIZE, FRAME_SIZE)
    return _assemble_grid(cells)


def prediction_grid(frames: np.ndarray, predictions: np.ndarray) -> np.ndarray:
    """2x20 grid: row 1 is the full ground-truth sequence (10 inputs then 10
    future frames), row 2 is 10 blank cells then the 10 predictions."""
    if predictions.shape != (PAST_FRAMES, FRAME_SIZE, FRAME_SIZE):
        raise DataFormatError(
            f"expected ({PAST_FRAMES}, {FRAME_SIZE}, {FRAME_SIZE}) predictions, got {predictions.shape}"
        )
    row1 = quantize(frames)
    row2 = np.concatenate(
        [np.zeros((PAST_FRAMES, FRAME_SIZE, FRAME_SIZE), dtype=np.uint8), quantize(predictions)]
    )
    return _assemble_grid(np.stack([row1, row2]))


def save_png(path, image: np.ndarray) -> None:
    Image.fromarray(image, mode="L").save(Path(path), format="PNG")
