"""Synthetic bouncing-digit sequences.

Every sequence is 20 frames of 64x64 grayscale in [0, 1]: two sprites with
random start positions and directions translate at constant speed and
reflect off the frame boundary. The first 10 frames are the model input,
the last 10 the prediction targets.

Sequence draw order (one Philox stream per sequence, see data.rng): for
each of the two digits, in order: sprite index (integers), x, y (uniform
[0, 36]), direction angle (uniform [0, 2pi)), speed (uniform [2, 5]).
Positions stay continuous; sprites are pasted at the rounded position with
no interpolation, overlaps composed by pixel-wise maximum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from videoladder.data.idx import SpriteSet, load_mnist
from videoladder.data.split import stratified_split
from videoladder.data.rng import (
    STREAM_TEST,
    STREAM_TRAIN,
    STREAM_VAL,
    stream_rng,
)

FRAME_SIZE = 64
SPRITE_SIZE = 28
POSITION_LIMIT = FRAME_SIZE - SPRITE_SIZE  # 36
SEQUENCE_LENGTH = 20
PAST_FRAMES = 10
DIGITS_PER_SEQUENCE = 2
SPEED_MIN = 2.0
SPEED_MAX = 5.0

TRAIN_SEQUENCES_PER_EPOCH = 10_000
VAL_SEQUENCES_PER_EPOCH = 1_000
TEST_SEQUENCES = 10_000

_STREAM_IDS = {"train": STREAM_TRAIN, "val": STREAM_VAL, "test": STREAM_TEST}
_DEFAULT_COUNTS = {
    "train": TRAIN_SEQUENCES_PER_EPOCH,
    "val": VAL_SEQUENCES_PER_EPOCH,
    "test": TEST_SEQUENCES,
}


@dataclass
class DigitTrajectory:
    """Continuous top-left position and constant-magnitude velocity."""

    x: float
    y: float
    vx: float
    vy: float

    def advance(self) -> None:
        """One frame step with mirrored reflection at [0, POSITION_LIMIT]."""
        self.x, self.vx = _reflect(self.x + self.vx, self.vx)
        self.y, self.vy = _reflect(self.y + self.vy, self.vy)

    @property
    def speed(self) -> float:
        return float(np.hypot(self.vx, self.vy))


def _reflect(pos: float, vel: float, limit: float = POSITION_LIMIT) -> tuple[float, float]:
    while pos < 0.0 or pos > limit:
        if pos < 0.0:
            pos = -pos
        else:
            pos = limit - (pos - limit)
        vel = -vel
    return pos, vel


@dataclass
class VideoSequence:
    """20 frames of 64x64 grayscale plus the rng key that produced them."""

    frames: np.ndarray
    provenance: tuple[int, str, int, int]  # (seed, kind, epoch, index)

    @property
    def past(self) -> np.ndarray:
        return self.frames[:PAST_FRAMES]

    @property
    def future(self) -> np.ndarray:
        return self.frames[PAST_FRAMES:]


def _paste(frame: np.ndarray, sprite: np.ndarray, x: float, y: float) -> None:
    xi = int(np.rint(x))
    yi = int(np.rint(y))
    region = frame[yi : yi + SPRITE_SIZE, xi : xi + SPRITE_SIZE]
    np.maximum(region, sprite, out=region)


def generate_frames(sprites: SpriteSet, rng: np.random.Generator) -> np.ndarray:
    """(20, 64, 64) float32 frames for one sequence drawn from ``rng``."""
    chosen = []
    for _ in range(DIGITS_PER_SEQUENCE):
        idx = int(rng.integers(len(sprites)))
        x = float(rng.uniform(0.0, POSITION_LIMIT))
        y = float(rng.uniform(0.0, POSITION_LIMIT))
        angle = float(rng.uniform(0.0, 2.0 * np.pi))
        speed = float(rng.uniform(SPEED_MIN, SPEED_MAX))
        traj = DigitTrajectory(x, y, speed * np.cos(angle), speed * np.sin(angle))
        chosen.append((sprites.images[idx], traj))

    frames = np.zeros((SEQUENCE_LENGTH, FRAME_SIZE, FRAME_SIZE), dtype=np.float32)
    for t in range(SEQUENCE_LENGTH):
        for sprite, traj in chosen:
            _paste(frames[t], sprite, traj.x, traj.y)
        if t + 1 < SEQUENCE_LENGTH:
            for _, traj in chosen:
                traj.advance()
    return frames


def generate_sequence(
    sprites: SpriteSet, seed: int, kind: str, epoch: int, index: int
) -> VideoSequence:
    stream = _STREAM_IDS[kind]
    rng = stream_rng(seed, stream, epoch=epoch, index=index)
    return VideoSequence(generate_frames(sprites, rng), (seed, kind, epoch, index))


class MovingMNIST:
    """Sequence source wired to sprite partitions and a global seed.

    Train and validation sequences are regenerated fresh each epoch (the rng
    is keyed on the epoch); the test stream ignores the epoch so every
    evaluation sees the same fixed set.
    """

    def __init__(
        self,
        train_sprites: SpriteSet,
        val_sprites: SpriteSet,
        test_sprites: SpriteSet,
        seed: int = 0,
    ):
        self.pools = {"train": train_sprites, "val": val_sprites, "test": test_sprites}
        self.seed = seed

    @classmethod
    def from_idx_files(
        cls,
        train_images,
        train_labels,
        test_images,
        test_labels,
        seed: int = 0,
        val_fraction: float = 0.2,
    ) -> "MovingMNIST":
        full_train = load_mnist(train_images, train_labels)
        train, val = stratified_split(full_train, fraction=val_fraction, seed=seed)
        test = load_mnist(test_images, test_labels)
        return cls(train, val, test, seed=seed)

    def epoch_stream(
        self, kind: str, epoch: int = 0, count: int | None = None
    ) -> Iterator[VideoSequence]:
        if kind not in _STREAM_IDS:
            raise ValueError(f"kind must be train/val/test, got {kind!r}")
        pool = self.pools[kind]
        if len(pool) == 0:
            raise ValueError(f"{kind} sprite pool is empty")
        if count is None:
            count = _DEFAULT_COUNTS[kind]
        effective_epoch = 0 if kind == "test" else epoch
        for i in range(count):
            yield generate_sequence(pool, self.seed, kind, effective_epoch, i)

    def batches(
        self, kind: str, epoch: int = 0, count: int | None = None, batch_size: int = 16
    ) -> Iterator[np.ndarray]:
        """(B, 20, 64, 64) frame stacks in stream order; last batch may be short."""
        buf = []
        for seq in self.epoch_stream(kind, epoch=epoch, count=count):
            buf.append(seq.frames)
            if len(buf) == batch_size:
                yield np.stack(buf)
                buf = []
        if buf:
            yield np.stack(buf)
