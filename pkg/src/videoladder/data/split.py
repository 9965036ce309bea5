"""Class-stratified train/validation partitioning."""

from __future__ import annotations

import numpy as np

from videoladder.errors import DataFormatError
from videoladder.data.idx import SpriteSet
from videoladder.data.rng import STREAM_SPLIT, stream_rng


def stratified_split(
    sprites: SpriteSet, fraction: float = 0.2, seed: int = 0
) -> tuple[SpriteSet, SpriteSet]:
    """Hold out ``fraction`` of the sprites per class for validation.

    Per-class validation quotas use largest-remainder apportionment, so each
    class contributes within one sprite of its exact share and the totals add
    up to round(fraction * N). Which sprites land in validation is decided by
    a per-class shuffle from the split stream of ``seed``; the same seed
    always yields the same partition, and train + val is exactly the input.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    labels = sprites.labels
    classes = np.arange(10)
    counts = np.array([(labels == c).sum() for c in classes])
    if (counts == 0).any():
        missing = classes[counts == 0].tolist()
        raise DataFormatError(f"empty classes {missing}; every digit class must be present")

    quotas = fraction * counts
    base = np.floor(quotas).astype(int)
    target_total = int(np.rint(fraction * len(sprites)))
    leftover = target_total - base.sum()
    order = np.argsort(-(quotas - base), kind="stable")
    take = base.copy()
    take[order[:leftover]] += 1

    rng = stream_rng(seed, STREAM_SPLIT)
    val_mask = np.zeros(len(sprites), dtype=bool)
    for c in classes:
        idx = np.flatnonzero(labels == c)
        rng_c = rng.permutation(len(idx))
        val_mask[idx[rng_c[: take[c]]]] = True

    val_idx = np.flatnonzero(val_mask)
    train_idx = np.flatnonzero(~val_mask)
    return sprites.subset(train_idx), sprites.subset(val_idx)
