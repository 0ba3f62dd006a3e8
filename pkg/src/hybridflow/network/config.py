"""Model configuration and task modes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import InvalidConfigError


class TaskMode(enum.Enum):
    """Which decoder branches run and what the flow branch is trained on.

    FLOW_NEXTFRAME: both branches, flow branch targets the observed motion
    between the two input frames. NEXTFLOW_NEXTFRAME: both branches, flow
    branch instead targets the motion into the unobserved future frame.
    FLOW_ONLY / NEXTFRAME_ONLY: a single branch.
    """

    FLOW_NEXTFRAME = "flow_nextframe"
    NEXTFLOW_NEXTFRAME = "nextflow_nextframe"
    FLOW_ONLY = "flow_only"
    NEXTFRAME_ONLY = "nextframe_only"

    @property
    def flow_active(self) -> bool:
        return self is not TaskMode.NEXTFRAME_ONLY

    @property
    def frame_active(self) -> bool:
        return self is not TaskMode.FLOW_ONLY

    @property
    def flow_target(self) -> str:
        """Ground-truth field the flow branch trains on: 'f12' or 'f23'."""
        return "f23" if self is TaskMode.NEXTFLOW_NEXTFRAME else "f12"


FLOW_CHANNELS = 2
FRAME_CHANNELS = 3

_PADDING_MODES = ("zeros", "circular")


@dataclass(frozen=True)
class NetworkConfig:
    """Structural knobs of the model.

    depth: number of stride-2 encoder stages (the decoder mirrors it, so
    output resolution equals input resolution). alpha: channel-width scale;
    scaled widths are floored at 8 channels. input_frames: how many stacked
    RGB frames the encoder sees. padding_mode applies to encoder convolutions
    only; 'circular' makes the encoder translation-covariant for shift tests.
    """

    depth: int = 6
    alpha: float = 1.0
    input_frames: int = 2
    task_mode: TaskMode = TaskMode.FLOW_NEXTFRAME
    padding_mode: str = "zeros"

    def __post_init__(self):
        if not isinstance(self.depth, int) or not 2 <= self.depth <= 6:
            raise InvalidConfigError("depth must be an integer in [2, 6]")
        if not (isinstance(self.alpha, (int, float))
                and math.isfinite(self.alpha) and 0 < self.alpha <= 1):
            raise InvalidConfigError("alpha must lie in (0, 1]")
        if self.input_frames not in (2, 4):
            raise InvalidConfigError("input_frames must be 2 or 4")
        if not isinstance(self.task_mode, TaskMode):
            raise InvalidConfigError("task_mode must be a TaskMode")
        if self.padding_mode not in _PADDING_MODES:
            raise InvalidConfigError(
                f"padding_mode must be one of {_PADDING_MODES}")

    @property
    def input_channels(self) -> int:
        return 3 * self.input_frames

    @property
    def scale_factor(self) -> int:
        """Total encoder downsampling factor (2^depth)."""
        return 1 << self.depth

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "alpha": self.alpha,
            "input_frames": self.input_frames,
            "task_mode": self.task_mode.value,
            "padding_mode": self.padding_mode,
        }

    @staticmethod
    def from_dict(data: dict) -> "NetworkConfig":
        data = dict(data)
        data["task_mode"] = TaskMode(data.get("task_mode", "flow_nextframe"))
        return NetworkConfig(**data)
