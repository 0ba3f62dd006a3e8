"""Layer geometry: kernel/stride/padding tables and channel arithmetic.

The encoder is a fixed ladder of ten convolutions (six stride-2 stages, four
of them followed by a stride-1 companion); shallower models truncate the
ladder from the deep end. Each decoder runs one 4x4 stride-2 upconvolution
per encoder stage plus a 3x3 predictor at every resulting scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidConfigError
from .config import FLOW_CHANNELS, FRAME_CHANNELS, NetworkConfig

LEAKY = "leaky_relu_0.1"
NONE = "none"

LEAKY_SLOPE = 0.1

# name, base output channels, kernel, stride, padding, pyramid level reached
_ENCODER_TABLE = (
    ("conv1", 64, 7, 2, 3, 1),
    ("conv2", 128, 5, 2, 2, 2),
    ("conv3", 256, 5, 2, 2, None),
    ("conv3_1", 256, 3, 1, 1, 3),
    ("conv4", 512, 3, 2, 1, None),
    ("conv4_1", 512, 3, 1, 1, 4),
    ("conv5", 512, 3, 2, 1, None),
    ("conv5_1", 512, 3, 1, 1, 5),
    ("conv6", 1024, 3, 2, 1, None),
    ("conv6_1", 1024, 3, 1, 1, 6),
)

_UPCONV_BASE = 16  # upconv k outputs 16 * 2^k channels before scaling
_MIN_CHANNELS = 8


@dataclass(frozen=True)
class LayerSpec:
    """Geometry of one learned layer."""

    name: str
    kind: str  # "conv" | "upconv" | "predictor"
    kernel: tuple[int, int]
    stride: int
    padding: int
    in_channels: int
    out_channels: int
    nonlinearity: str

    def __post_init__(self):
        if self.kind not in ("conv", "upconv", "predictor"):
            raise InvalidConfigError(f"unknown layer kind {self.kind!r}")
        if self.stride not in (1, 2):
            raise InvalidConfigError("stride must be 1 or 2")
        if self.in_channels < 1 or self.out_channels < 1:
            raise InvalidConfigError("channel counts must be >= 1")

    def output_dims(self, h: int, w: int) -> tuple[int, int]:
        kh, kw = self.kernel
        if self.kind == "upconv":
            return ((h - 1) * self.stride - 2 * self.padding + kh,
                    (w - 1) * self.stride - 2 * self.padding + kw)
        return ((h + 2 * self.padding - kh) // self.stride + 1,
                (w + 2 * self.padding - kw) // self.stride + 1)


def scaled_width(base: int, alpha: float) -> int:
    return max(_MIN_CHANNELS, int(round(base * alpha)))


def _encoder_rows(depth: int):
    rows = []
    for name, base, k, s, p, level in _ENCODER_TABLE:
        stage = int(name[4])  # convN / convN_1
        if stage > depth:
            break
        rows.append((name, base, k, s, p, level))
    return rows


def encoder_feature_names(depth: int) -> dict[int, str]:
    """Pyramid level (1..depth) -> name of the encoder layer feeding it."""
    out = {}
    for name, _, _, _, _, level in _encoder_rows(depth):
        if level is not None and level <= depth:
            out[level] = name
    return out


def _encoder_specs(config: NetworkConfig) -> list[LayerSpec]:
    specs = []
    in_ch = config.input_channels
    for name, base, k, s, p, _ in _encoder_rows(config.depth):
        out_ch = scaled_width(base, config.alpha)
        specs.append(LayerSpec(name=name, kind="conv", kernel=(k, k),
                               stride=s, padding=p, in_channels=in_ch,
                               out_channels=out_ch, nonlinearity=LEAKY))
        in_ch = out_ch
    return specs


def _skip_widths(config: NetworkConfig,
                 encoder: list[LayerSpec]) -> dict[int, int]:
    """Channels of the encoder feature concatenated at each decoder scale."""
    widths = {0: config.input_channels}
    by_name = {spec.name: spec.out_channels for spec in encoder}
    for level, name in encoder_feature_names(config.depth).items():
        widths[level] = by_name[name]
    return widths


def _decoder_specs(config: NetworkConfig, encoder: list[LayerSpec],
                   prefix: str, out_channels: int) -> list[LayerSpec]:
    skips = _skip_widths(config, encoder)
    specs = []
    in_ch = encoder[-1].out_channels  # bottleneck features
    for k in range(config.depth - 1, -1, -1):
        up_out = scaled_width(_UPCONV_BASE << k, config.alpha)
        specs.append(LayerSpec(
            name=f"{prefix}.upconv{k}", kind="upconv", kernel=(4, 4),
            stride=2, padding=1, in_channels=in_ch, out_channels=up_out,
            nonlinearity=LEAKY))
        concat = up_out + skips[k]
        if k != config.depth - 1:
            concat += out_channels  # upsampled previous prediction
        specs.append(LayerSpec(
            name=f"{prefix}.predict{k}", kind="predictor", kernel=(3, 3),
            stride=1, padding=1, in_channels=concat,
            out_channels=out_channels, nonlinearity=NONE))
        in_ch = concat
    return specs


def build_layers(config: NetworkConfig) -> tuple[list[LayerSpec],
                                                 list[LayerSpec],
                                                 list[LayerSpec]]:
    """Return (encoder, flow decoder, frame decoder) layer specifications.

    Both decoders are built regardless of task mode so checkpoints stay
    structurally identical across modes; the forward pass skips inactive
    branches.
    """
    encoder = _encoder_specs(config)
    flow = _decoder_specs(config, encoder, "flow", FLOW_CHANNELS)
    frame = _decoder_specs(config, encoder, "frame", FRAME_CHANNELS)
    return encoder, flow, frame
