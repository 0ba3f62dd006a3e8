"""Core value types: flow fields, frames, sample triplets, metric reports.

All types are immutable value objects holding numpy arrays; the arrays are
treated as read-only by every operation in the package so instances can be
shared freely across threads.

Conventions: u is horizontal displacement (positive rightward), v is vertical
(positive downward), both in pixels. Frames are RGB, float, on the canonical
[0, 1] scale; the lossless 8-bit conversion is round(value * 255).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError


class Source(enum.Enum):
    """Origin of a sample: synthetic carries flow ground truth, real does not."""

    SYNTHETIC = "synthetic"
    REAL = "real"


@dataclass(frozen=True)
class FlowField:
    """Dense per-pixel 2-channel displacement field.

    u, v: float32 arrays of shape (height, width), units of pixels.
    valid: optional bool array of the same shape; where absent, every pixel
    is considered valid.
    """

    u: np.ndarray
    v: np.ndarray
    valid: Optional[np.ndarray] = None

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float32)
        v = np.asarray(self.v, dtype=np.float32)
        if u.ndim != 2 or v.ndim != 2:
            raise DimensionMismatchError("u and v must be 2-D arrays")
        if u.shape != v.shape:
            raise DimensionMismatchError(
                f"u shape {u.shape} != v shape {v.shape}")
        if u.shape[0] < 1 or u.shape[1] < 1:
            raise ValueError("flow field dimensions must be >= 1")
        valid = self.valid
        if valid is not None:
            valid = np.asarray(valid, dtype=bool)
            if valid.shape != u.shape:
                raise DimensionMismatchError(
                    f"valid shape {valid.shape} != flow shape {u.shape}")
        check = np.ones(u.shape, dtype=bool) if valid is None else valid
        if not (np.isfinite(u[check]).all() and np.isfinite(v[check]).all()):
            raise ValueError("flow contains non-finite values on valid pixels")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "valid", valid)

    @property
    def height(self) -> int:
        return self.u.shape[0]

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape

    def magnitude(self) -> np.ndarray:
        return np.sqrt(self.u.astype(np.float64) ** 2
                       + self.v.astype(np.float64) ** 2)

    @staticmethod
    def from_array(uv: np.ndarray, valid: Optional[np.ndarray] = None) -> "FlowField":
        """Build from an (H, W, 2) array with channels (u, v)."""
        uv = np.asarray(uv)
        if uv.ndim != 3 or uv.shape[2] != 2:
            raise DimensionMismatchError("expected an (H, W, 2) array")
        return FlowField(u=uv[..., 0], v=uv[..., 1], valid=valid)

    def to_array(self) -> np.ndarray:
        """Return an (H, W, 2) float32 array with channels (u, v)."""
        return np.stack([self.u, self.v], axis=-1)

    @staticmethod
    def uniform(height: int, width: int, u: float, v: float) -> "FlowField":
        return FlowField(u=np.full((height, width), u, dtype=np.float32),
                         v=np.full((height, width), v, dtype=np.float32))


@dataclass(frozen=True)
class Frame:
    """RGB image with float values on [0, 1], shape (height, width, 3)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 3 or values.shape[2] != 3:
            raise DimensionMismatchError("frame must be (H, W, 3)")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("frame dimensions must be >= 1")
        if not np.isfinite(values).all():
            raise ValueError("frame contains non-finite values")
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("frame values must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]

    def to_uint8(self) -> np.ndarray:
        return np.round(self.values * 255.0).astype(np.uint8)

    @staticmethod
    def from_uint8(data: np.ndarray) -> "Frame":
        data = np.asarray(data)
        if data.dtype != np.uint8:
            raise ValueError("expected uint8 data")
        return Frame(values=data.astype(np.float32) / 255.0)


@dataclass(frozen=True)
class SampleTriplet:
    """Three consecutive frames with optional ground-truth flow.

    A synthetic sample carries both flows (I1->I2 and I2->I3) plus optional
    occlusion masks (true = the surface point stays visible and in bounds in
    the next frame, so the flow target is photometrically consistent there).
    A real sample carries frames only.
    """

    i1: Frame
    i2: Frame
    i3: Frame
    f12: Optional[FlowField] = None
    f23: Optional[FlowField] = None
    source: Source = Source.SYNTHETIC
    occlusion12: Optional[np.ndarray] = None
    occlusion23: Optional[np.ndarray] = None

    def __post_init__(self):
        shape = self.i1.shape
        for name in ("i2", "i3"):
            if getattr(self, name).shape != shape:
                raise DimensionMismatchError("frames must share dimensions")
        for name in ("f12", "f23"):
            flow = getattr(self, name)
            if flow is not None and flow.shape != shape:
                raise DimensionMismatchError(
                    f"{name} shape {flow.shape} != frame shape {shape}")
        for name in ("occlusion12", "occlusion23"):
            mask = getattr(self, name)
            if mask is not None:
                mask = np.asarray(mask, dtype=bool)
                if mask.shape != shape:
                    raise DimensionMismatchError(
                        f"{name} shape {mask.shape} != frame shape {shape}")
                object.__setattr__(self, name, mask)
        if self.source is Source.SYNTHETIC and (self.f12 is None or self.f23 is None):
            raise ValueError("synthetic samples must carry f12 and f23")
        if self.source is Source.REAL and (self.f12 is not None or self.f23 is not None):
            raise ValueError("real samples must not carry flow ground truth")

    @property
    def shape(self) -> tuple[int, int]:
        return self.i1.shape


@dataclass(frozen=True)
class Minibatch:
    """Non-empty, source-homogeneous list of samples with equal dimensions."""

    samples: tuple[SampleTriplet, ...]
    source: Source

    def __post_init__(self):
        samples = tuple(self.samples)
        if not samples:
            raise ValueError("minibatch must be non-empty")
        shape = samples[0].shape
        for s in samples:
            if s.source is not self.source:
                raise ValueError("all samples must share the batch source tag")
            if s.shape != shape:
                raise DimensionMismatchError("all samples must share dimensions")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class MetricsReport:
    """Aggregate metrics plus the per-sample breakdown they average."""

    sample_count: int
    per_sample: tuple[dict, ...]
    mean_epe: Optional[float] = None
    psnr_whole: Optional[float] = None
    psnr_moving: Optional[float] = None
    sharpness_whole: Optional[float] = None
    sharpness_moving: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sample_count != len(self.per_sample):
            raise ValueError("sample_count must equal breakdown length")
        if self.mean_epe is not None and self.mean_epe < 0:
            raise ValueError("mean EPE cannot be negative")

    def to_dict(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "mean_epe": self.mean_epe,
            "psnr_whole": self.psnr_whole,
            "psnr_moving": self.psnr_moving,
            "sharpness_whole": self.sharpness_whole,
            "sharpness_moving": self.sharpness_moving,
            "per_sample": list(self.per_sample),
            **({"extra": self.extra} if self.extra else {}),
        }
