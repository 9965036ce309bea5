from videoladder.data.idx import (
    SpriteSet,
    load_mnist,
    read_idx_images,
    read_idx_labels,
    write_idx_images,
    write_idx_labels,
)
from videoladder.data.split import stratified_split
from videoladder.data.moving_mnist import (
    MovingMNIST,
    VideoSequence,
    DigitTrajectory,
    generate_frames,
    generate_sequence,
    FRAME_SIZE,
    PAST_FRAMES,
    SEQUENCE_LENGTH,
    POSITION_LIMIT,
)
from videoladder.data.rng import (
    stream_rng,
    STREAM_SPLIT,
    STREAM_TRAIN,
    STREAM_VAL,
    STREAM_TEST,
    STREAM_INIT,
)
from videoladder.data import io

__all__ = [
    "SpriteSet",
    "load_mnist",
    "read_idx_images",
    "read_idx_labels",
    "write_idx_images",
    "write_idx_labels",
    "stratified_split",
    "MovingMNIST",
    "VideoSequence",
    "DigitTrajectory",
    "generate_frames",
    "generate_sequence",
    "FRAME_SIZE",
    "PAST_FRAMES",
    "SEQUENCE_LENGTH",
    "POSITION_LIMIT",
    "stream_rng",
    "STREAM_SPLIT",
    "STREAM_TRAIN",
    "STREAM_VAL",
    "STREAM_TEST",
    "STREAM_INIT",
    "io",
]
