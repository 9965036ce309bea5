"""Declarative architecture descriptions for the ladder model family.

Four named variants are provided:

    vln         dilated-conv encoder, conv-LSTM plus skip lateral at every
                level (channels 32/64/96, dilations 1/2/4)
    vln-resnet  residual-block encoder/decoder (channel widths 28/58/90,
                two dilated convs per block), laterals at every level
    vln-bl      single 128-channel conv-LSTM lateral at the top level only
    vln-bl-ff   vln-bl plus skip laterals at all levels

Any other geometry (smaller frames, fewer levels, narrower channels) can be
described directly with ModelConfig; construction validates the shape
ladder (each level halves the resolution).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from videoladder.errors import ConfigError

VARIANTS = ("vln", "vln-resnet", "vln-bl", "vln-bl-ff")


@dataclass(frozen=True)
class LevelSpec:
    """One resolution level of the ladder.

    ``dilations`` has one entry for a plain conv encoder level and two for a
    residual block. ``lstm_channels`` overrides the conv-LSTM hidden width
    (otherwise it equals ``channels``); a 1x1 projection restores the level
    width before merging when they differ.
    """

    channels: int
    dilations: tuple[int, ...] = (1,)
    recurrent: bool = True
    feedforward: bool = True
    lstm_channels: int | None = None

    @property
    def hidden_channels(self) -> int:
        return self.lstm_channels if self.lstm_channels is not None else self.channels


@dataclass(frozen=True)
class ModelConfig:
    variant: str
    levels: tuple[LevelSpec, ...]
    encoder: str = "conv"  # "conv" | "resblock"
    decoder: str = "conv"
    frame_size: int = 64
    in_channels: int = 1
    kernel_size: int = 3
    leaky_slope: float = 0.01
    bn_epsilon: float = 1e-5
    bn_momentum: float = 0.99
    forget_bias: float = 1.0

    def __post_init__(self):
        if not self.levels:
            raise ConfigError("model needs at least one level")
        if self.encoder not in ("conv", "resblock") or self.decoder not in ("conv", "resblock"):
            raise ConfigError(f"unknown encoder/decoder kind {self.encoder}/{self.decoder}")
        if self.frame_size % (2 ** len(self.levels)) != 0:
            raise ConfigError(
                f"frame size {self.frame_size} not divisible by 2^{len(self.levels)}; "
                "every level halves the resolution"
            )
        top = self.levels[-1]
        if not (top.recurrent or top.feedforward):
            raise ConfigError(
                "top level needs a recurrent or feedforward lateral to seed the decoder"
            )
        for i, lvl in enumerate(self.levels):
            want = 2 if self.encoder == "resblock" else 1
            if len(lvl.dilations) != want:
                raise ConfigError(
                    f"level {i}: {self.encoder} encoder takes {want} dilation(s), "
                    f"got {lvl.dilations}"
                )
            if lvl.lstm_channels is not None and not lvl.recurrent:
                raise ConfigError(f"level {i}: lstm_channels set but recurrent lateral disabled")

    # -- derived geometry -------------------------------------------------------

    def level_sizes(self) -> list[int]:
        """Spatial extent of each level's feature maps, bottom-up."""
        return [self.frame_size // (2 ** (i + 1)) for i in range(len(self.levels))]

    def shape_table(self, batch: int = 1) -> dict[str, tuple[int, ...]]:
        """Expected NCHW shape of every lateral tensor, keyed by tag."""
        table: dict[str, tuple[int, ...]] = {}
        for i, (lvl, size) in enumerate(zip(self.levels, self.level_sizes()), start=1):
            table[f"z{i}"] = (batch, lvl.channels, size, size)
            if lvl.recurrent:
                table[f"h{i}"] = (batch, lvl.hidden_channels, size, size)
        table["prediction"] = (batch, self.in_channels, self.frame_size, self.frame_size)
        return table

    def enabled_connections(self) -> frozenset[str]:
        """Lateral-connection identity set, for ablation-ordering checks."""
        conns = set()
        for i, lvl in enumerate(self.levels, start=1):
            if lvl.recurrent:
                conns.add(f"recurrent@{i}")
            if lvl.feedforward:
                conns.add(f"feedforward@{i}")
        return frozenset(conns)

    # -- serialization ----------------------------------------------------------

    def to_dict(self) -> dict[str, str]:
        return {
            "variant": self.variant,
            "encoder": self.encoder,
            "decoder": self.decoder,
            "frame_size": str(self.frame_size),
            "in_channels": str(self.in_channels),
            "channels": ",".join(str(l.channels) for l in self.levels),
            "dilations": ";".join(",".join(map(str, l.dilations)) for l in self.levels),
            "recurrent": ",".join(str(int(l.recurrent)) for l in self.levels),
            "feedforward": ",".join(str(int(l.feedforward)) for l in self.levels),
            "lstm_channels": ",".join(
                "-" if l.lstm_channels is None else str(l.lstm_channels) for l in self.levels
            ),
            "kernel_size": str(self.kernel_size),
            "leaky_slope": repr(self.leaky_slope),
            "bn_epsilon": repr(self.bn_epsilon),
            "bn_momentum": repr(self.bn_momentum),
            "forget_bias": repr(self.forget_bias),
        }

    @staticmethod
    def from_dict(d: dict[str, str]) -> "ModelConfig":
        try:
            channels = [int(v) for v in d["channels"].split(",")]
            dilations = [
                tuple(int(x) for x in group.split(","))
                for group in d["dilations"].split(";")
            ]
            recurrent = [bool(int(v)) for v in d["recurrent"].split(",")]
            feedforward = [bool(int(v)) for v in d["feedforward"].split(",")]
            lstm = [
                None if v == "-" else int(v) for v in d["lstm_channels"].split(",")
            ]
        except (KeyError, ValueError) as e:
            raise ConfigError(f"malformed model config: {e}") from e
        levels = tuple(
            LevelSpec(c, dil, rec, ff, lc)
            for c, dil, rec, ff, lc in zip(channels, dilations, recurrent, feedforward, lstm)
        )
        return ModelConfig(
            variant=d["variant"],
            levels=levels,
            encoder=d.get("encoder", "conv"),
            decoder=d.get("decoder", "conv"),
            frame_size=int(d.get("frame_size", "64")),
            in_channels=int(d.get("in_channels", "1")),
            kernel_size=int(d.get("kernel_size", "3")),
            leaky_slope=float(d.get("leaky_slope", "0.01")),
            bn_epsilon=float(d.get("bn_epsilon", "1e-05")),
            bn_momentum=float(d.get("bn_momentum", "0.99")),
            forget_bias=float(d.get("forget_bias", "1.0")),
        )

    def canonical_text(self) -> str:
        d = self.to_dict()
        return "".join(f"{k} = {d[k]}\n" for k in sorted(d))

    def hash(self) -> bytes:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).digest()


def standard_config(variant: str) -> ModelConfig:
    """The four published architectures at full 64x64 scale."""
    if variant == "vln":
        levels = (
            LevelSpec(32, (1,)),
            LevelSpec(64, (2,)),
            LevelSpec(96, (4,)),
        )
        return ModelConfig(variant, levels)
    if variant == "vln-resnet":
        levels = (
            LevelSpec(28, (1, 2)),
            LevelSpec(58, (2, 4)),
            LevelSpec(90, (4, 8)),
        )
        return ModelConfig(variant, levels, encoder="resblock", decoder="resblock")
    if variant == "vln-bl":
        levels = (
            LevelSpec(32, (1,), recurrent=False, feedforward=False),
            LevelSpec(64, (2,), recurrent=False, feedforward=False),
            LevelSpec(96, (4,), recurrent=True, feedforward=False, lstm_channels=128),
        )
        return ModelConfig(variant, levels)
    if variant == "vln-bl-ff":
        levels = (
            LevelSpec(32, (1,), recurrent=False, feedforward=True),
            LevelSpec(64, (2,), recurrent=False, feedforward=True),
            LevelSpec(96, (4,), recurrent=True, feedforward=True, lstm_channels=128),
        )
        return ModelConfig(variant, levels)
    raise ConfigError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")


DEFAULT_LEARNING_RATES = {
    "vln": 1e-4,
    "vln-resnet": 5e-4,
    "vln-bl": 1e-4,
    "vln-bl-ff": 1e-4,
}
