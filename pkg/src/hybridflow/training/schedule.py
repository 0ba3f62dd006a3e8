"""Training schedule: source cycling, loss weights, learning-rate decay."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..errors import InvalidCyclesError


def switch(i: int, n1: int, n2: int) -> int:
    """Source selector for iteration i: 0 -> real batch, 1 -> synthetic.

    Each period of n1 + n2 iterations starts with n1 real iterations followed
    by n2 synthetic ones. The raw periodic expression floor((i mod p) / n1)
    can exceed 1 whenever n2 > n1, so it is clamped to keep the value binary;
    n1 = 0 degenerates to all-synthetic, n2 = 0 to all-real.
    """
    if i < 0:
        raise InvalidCyclesError("iteration must be >= 0")
    if n1 < 0 or n2 < 0 or n1 + n2 < 1:
        raise InvalidCyclesError("need n1 >= 0, n2 >= 0, n1 + n2 >= 1")
    if n1 == 0:
        return 1
    return min(1, (i % (n1 + n2)) // n1)


@dataclass(frozen=True)
class AdamConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1:
            raise InvalidCyclesError("betas must lie in [0, 1)")
        if self.epsilon <= 0:
            raise InvalidCyclesError("epsilon must be > 0")

    def to_dict(self) -> dict:
        return {"beta1": self.beta1, "beta2": self.beta2,
                "epsilon": self.epsilon}


@dataclass(frozen=True)
class TrainSchedule:
    """All scalar knobs of a training run.

    n1/n2 are the per-period real/synthetic iteration counts; w1/w2 weight
    the flow and frame losses (default ratio 1/5). level_weights, when given,
    must have one entry per prediction scale (coarsest first); None means
    uniform 1.0. Learning rate holds at base_lr until lr_drop_start, then
    multiplies by lr_drop_factor every lr_drop_every iterations.
    """

    n1: int = 1
    n2: int = 5
    w1: float = 1.0
    w2: float = 5.0
    level_weights: Optional[tuple[float, ...]] = None
    base_lr: float = 1e-4
    lr_drop_start: int = 300_000
    lr_drop_every: int = 100_000
    lr_drop_factor: float = 0.5
    adam: AdamConfig = field(default_factory=AdamConfig)
    total_iterations: int = 1_000_000
    batch_size: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0 or self.n1 + self.n2 < 1:
            raise InvalidCyclesError("need n1 >= 0, n2 >= 0, n1 + n2 >= 1")
        if self.w1 < 0 or self.w2 < 0:
            raise InvalidCyclesError("loss weights must be >= 0")
        if self.level_weights is not None:
            weights = tuple(float(w) for w in self.level_weights)
            if any(w < 0 or not math.isfinite(w) for w in weights):
                raise InvalidCyclesError("level weights must be finite and >= 0")
            object.__setattr__(self, "level_weights", weights)
        if self.base_lr < 0:
            raise InvalidCyclesError("base_lr must be >= 0")
        if self.lr_drop_start < 0 or self.lr_drop_every < 1:
            raise InvalidCyclesError("lr drop schedule must be positive")
        if not 0 < self.lr_drop_factor <= 1:
            raise InvalidCyclesError("lr_drop_factor must lie in (0, 1]")
        if self.total_iterations < 0:
            raise InvalidCyclesError("total_iterations must be >= 0")
        if self.batch_size < 1:
            raise InvalidCyclesError("batch_size must be >= 1")

    @property
    def period(self) -> int:
        return self.n1 + self.n2

    def resolve_level_weights(self, levels: int) -> tuple[float, ...]:
        if self.level_weights is None:
            return (1.0,) * levels
        if len(self.level_weights) != levels:
            raise InvalidCyclesError(
                f"{len(self.level_weights)} level weights for {levels} scales")
        return self.level_weights

    @staticmethod
    def paper_scale(**overrides) -> "TrainSchedule":
        """The full-scale preset: 1M iterations, drops from 300K."""
        return TrainSchedule(**overrides)

    @staticmethod
    def desk_scale(total_iterations: int = 2000, **overrides) -> "TrainSchedule":
        """Short-run preset with the lr schedule scaled proportionally."""
        ratio = total_iterations / 1_000_000
        defaults = {
            "total_iterations": total_iterations,
            "lr_drop_start": max(1, int(300_000 * ratio)),
            "lr_drop_every": max(1, int(100_000 * ratio)),
            "batch_size": 4,
        }
        defaults.update(overrides)
        return TrainSchedule(**defaults)

    def to_dict(self) -> dict:
        return {
            "n1": self.n1, "n2": self.n2, "w1": self.w1, "w2": self.w2,
            "level_weights": (None if self.level_weights is None
                              else list(self.level_weights)),
            "base_lr": self.base_lr,
            "lr_drop_start": self.lr_drop_start,
            "lr_drop_every": self.lr_drop_every,
            "lr_drop_factor": self.lr_drop_factor,
            "adam": self.adam.to_dict(),
            "total_iterations": self.total_iterations,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(data: dict) -> "TrainSchedule":
        data = dict(data)
        if data.get("level_weights") is not None:
            data["level_weights"] = tuple(data["level_weights"])
        if "adam" in data and isinstance(data["adam"], dict):
            data["adam"] = AdamConfig(**data["adam"])
        return TrainSchedule(**data)


def lr_at(i: int, schedule: TrainSchedule) -> float:
    """Piecewise-constant decayed learning rate at iteration i."""
    if i < 0:
        raise InvalidCyclesError("iteration must be >= 0")
    if i < schedule.lr_drop_start:
        return schedule.base_lr
    drops = (i - schedule.lr_drop_start) // schedule.lr_drop_every + 1
    return schedule.base_lr * schedule.lr_drop_factor ** drops
