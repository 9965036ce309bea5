"""Binary checkpoint container.

Layout (all integers little-endian):

    magic           8 bytes   b"VLADCKPT"
    format version  uint32    currently 1
    config hash     32 bytes  sha256 of the canonical model-config text
    entry count     uint64
    per entry:
        name length uint32
        name        UTF-8 bytes
        rank        uint64
        extents     rank * uint64
        values      product(extents) * float32, little-endian

Entries are written in the order given, so save -> load -> save is
byte-identical.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from videoladder.errors import DataFormatError

MAGIC = b"VLADCKPT"
FORMAT_VERSION = 1


def save_entries(path, entries: list[tuple[str, np.ndarray]], config_hash: bytes) -> None:
    if len(config_hash) != 32:
        raise ValueError(f"config hash must be 32 bytes, got {len(config_hash)}")
    path = Path(path)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", FORMAT_VERSION))
        f.write(config_hash)
        f.write(struct.pack("<Q", len(entries)))
        for name, array in entries:
            name_bytes = name.encode("utf-8")
            f.write(struct.pack("<I", len(name_bytes)))
            f.write(name_bytes)
            f.write(struct.pack("<Q", array.ndim))
            for extent in array.shape:
                f.write(struct.pack("<Q", extent))
            f.write(np.ascontiguousarray(array, dtype="<f4").tobytes())


def _read_exact(f, n: int, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise DataFormatError(f"checkpoint truncated while reading {what}")
    return buf


def load_entries(path) -> tuple[list[tuple[str, np.ndarray]], bytes]:
    """Returns (entries, config_hash); entries keep file order."""
    path = Path(path)
    entries = []
    with open(path, "rb") as f:
        magic = _read_exact(f, 8, "magic")
        if magic != MAGIC:
            raise DataFormatError(
                f"not a checkpoint file: bad magic {magic!r} in {path}"
            )
        (version,) = struct.unpack("<I", _read_exact(f, 4, "version"))
        if version != FORMAT_VERSION:
            raise DataFormatError(f"unsupported checkpoint format version {version}")
        config_hash = _read_exact(f, 32, "config hash")
        (count,) = struct.unpack("<Q", _read_exact(f, 8, "entry count"))
        for i in range(count):
            (name_len,) = struct.unpack("<I", _read_exact(f, 4, f"entry {i} name length"))
            name = _read_exact(f, name_len, f"entry {i} name").decode("utf-8")
            (rank,) = struct.unpack("<Q", _read_exact(f, 8, f"{name} rank"))
            shape = struct.unpack(
                f"<{rank}Q", _read_exact(f, 8 * rank, f"{name} extents")
            )
            size = int(np.prod(shape, dtype=np.uint64)) if rank else 1
            raw = _read_exact(f, 4 * size, f"{name} values")
            values = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
            entries.append((name, values))
        if f.read(1):
            raise DataFormatError(f"trailing bytes after {count} entries in {path}")
    return entries, config_hash
