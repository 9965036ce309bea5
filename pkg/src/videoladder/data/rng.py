"""Deterministic random streams built on the Philox counter-based generator.

Every random draw in the package comes from a stream keyed by
(global seed, stream id, epoch, index), so any sequence, split or weight
init can be regenerated in isolation, in any order, on any machine.

Key layout (numpy Philox-4x64, 2x64-bit key):

    key[0] = global seed
    key[1] = stream_id << 56 | epoch << 32 | index

with epoch < 2^24 and index < 2^32. Stream consumers document their draw
order; together with numpy's published Philox spec this makes all streams
reproducible outside this package.
"""

from __future__ import annotations

import numpy as np

STREAM_SPLIT = 1
STREAM_TRAIN = 2
STREAM_VAL = 3
STREAM_TEST = 4
STREAM_INIT = 5

_EPOCH_LIMIT = 1 << 24
_INDEX_LIMIT = 1 << 32


def stream_rng(seed: int, stream: int, epoch: int = 0, index: int = 0) -> np.random.Generator:
    if not 0 <= epoch < _EPOCH_LIMIT:
        raise ValueError(f"epoch {epoch} out of range [0, 2^24)")
    if not 0 <= index < _INDEX_LIMIT:
        raise ValueError(f"index {index} out of range [0, 2^32)")
    key = np.array(
        [np.uint64(seed), np.uint64(stream) << np.uint64(56) | np.uint64(epoch) << np.uint64(32) | np.uint64(index)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
