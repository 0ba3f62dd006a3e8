"""Scene descriptions for the procedural renderer and their validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InvalidSpecError
from ..flowio import Source

SHAPES = ("rectangle", "ellipse", "polygon")

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ObjectSpec:
    """One moving sprite.

    The anchor is the world position of the sprite's local origin at t=1;
    local coordinates rotate about it at `rotation` degrees per frame while
    the anchor translates at `velocity` pixels per frame. `size` is the full
    extent (width, height) for rectangles and ellipses; polygons instead list
    local-coordinate vertices.
    """

    shape: str
    z_order: int
    texture_seed: int
    velocity: tuple[float, float]
    anchor: tuple[float, float]
    rotation: float = 0.0
    size: tuple[float, float] = (16.0, 16.0)
    vertices: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidSpecError(f"unknown shape {self.shape!r}")
        if not all(math.isfinite(c) for c in (*self.velocity, *self.anchor,
                                              self.rotation, *self.size)):
            raise InvalidSpecError("object parameters must be finite")
        if self.shape == "polygon":
            if self.vertices is None or len(self.vertices) < 3:
                raise InvalidSpecError("polygon needs at least 3 vertices")
            if not all(math.isfinite(c) for v in self.vertices for c in v):
                raise InvalidSpecError("polygon vertices must be finite")
        elif self.size[0] <= 0 or self.size[1] <= 0:
            raise InvalidSpecError("object size must be positive")

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)


@dataclass(frozen=True)
class PhotometricConfig:
    """Per-frame photometric perturbations applied after compositing."""

    noise_amplitude: float = 0.0
    brightness_drift: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.noise_amplitude)
                and math.isfinite(self.brightness_drift)):
            raise InvalidSpecError("photometric parameters must be finite")
        if self.noise_amplitude < 0:
            raise InvalidSpecError("noise amplitude must be >= 0")


@dataclass(frozen=True)
class SceneSpec:
    """Complete description of one three-frame scene."""

    width: int
    height: int
    background_velocity: tuple[float, float]
    objects: tuple[ObjectSpec, ...] = ()
    photometric: PhotometricConfig = field(default_factory=PhotometricConfig)
    seed: int = 0

    def __post_init__(self):
        if self.width < 4 or self.height < 4:
            raise InvalidSpecError("image dimensions must be >= 4")
        if not all(math.isfinite(c) for c in self.background_velocity):
            raise InvalidSpecError("background velocity must be finite")
        if not 0 <= self.seed <= _U64:
            raise InvalidSpecError("seed must fit in 64 bits")
        speed_cap = min(self.width, self.height) / 4.0
        if math.hypot(*self.background_velocity) > speed_cap:
            raise InvalidSpecError(
                f"background speed exceeds size/4 cap {speed_cap}")
        for obj in self.objects:
            if obj.speed > speed_cap:
                raise InvalidSpecError(
                    f"object speed {obj.speed} exceeds size/4 cap {speed_cap}")
        object.__setattr__(self, "objects", tuple(self.objects))


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for drawing random scenes and building datasets from them."""

    width: int = 64
    height: int = 64
    master_seed: int = 0
    source: Source = Source.SYNTHETIC
    min_objects: int = 1
    max_objects: int = 3
    max_speed: float = 3.0
    max_rotation: float = 3.0
    max_background_speed: float = 1.5
    noise_amplitude: float = 0.0
    brightness_drift: float = 0.0

    def __post_init__(self):
        if self.width < 4 or self.height < 4:
            raise InvalidSpecError("image dimensions must be >= 4")
        if not 0 <= self.min_objects <= self.max_objects:
            raise InvalidSpecError("need 0 <= min_objects <= max_objects")
        cap = min(self.width, self.height) / 4.0
        if not 0 <= self.max_speed <= cap:
            raise InvalidSpecError(f"max_speed must lie in [0, {cap}]")
        if not 0 <= self.max_background_speed <= cap:
            raise InvalidSpecError(f"max_background_speed must lie in [0, {cap}]")

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "master_seed": self.master_seed,
            "source": self.source.value,
            "min_objects": self.min_objects,
            "max_objects": self.max_objects,
            "max_speed": self.max_speed,
            "max_rotation": self.max_rotation,
            "max_background_speed": self.max_background_speed,
            "noise_amplitude": self.noise_amplitude,
            "brightness_drift": self.brightness_drift,
        }

    @staticmethod
    def from_dict(data: dict) -> "GeneratorConfig":
        data = dict(data)
        data["source"] = Source(data.get("source", "synthetic"))
        return GeneratorConfig(**data)


def random_scene_spec(config: GeneratorConfig, index: int) -> SceneSpec:
    """Draw the scene for sample `index`; a pure function of (config, index)."""
    from .dataset import mix64

    seed = mix64(config.master_seed, index)
    rng = np.random.default_rng(seed)
    base = min(config.width, config.height)

    def vec(limit):
        angle = rng.uniform(0.0, 2.0 * np.pi)
        speed = rng.uniform(0.0, limit)
        return (float(speed * np.cos(angle)), float(speed * np.sin(angle)))

    background_velocity = vec(config.max_background_speed)
    count = int(rng.integers(config.min_objects, config.max_objects + 1))
    objects = []
    for k in range(count):
        shape = SHAPES[int(rng.integers(len(SHAPES)))]
        extent = rng.uniform(base / 6.0, base / 3.0, size=2)
        anchor = (float(rng.uniform(base / 6.0, config.width - base / 6.0)),
                  float(rng.uniform(base / 6.0, config.height - base / 6.0)))
        vertices = None
        if shape == "polygon":
            n = int(rng.integers(3, 7))
            angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=n))
            radii = rng.uniform(0.5, 1.0, size=n) * extent[0] / 2.0
            vertices = tuple(
                (float(r * np.cos(a)), float(r * np.sin(a)))
                for r, a in zip(radii, angles))
        objects.append(ObjectSpec(
            shape=shape,
            z_order=k,
            texture_seed=int(rng.integers(1 << 63)),
            velocity=vec(config.max_speed),
            anchor=anchor,
            rotation=float(rng.uniform(-config.max_rotation,
                                       config.max_rotation)),
            size=(float(extent[0]), float(extent[1])),
            vertices=vertices,
        ))
    return SceneSpec(
        width=config.width,
        height=config.height,
        background_velocity=background_velocity,
        objects=tuple(objects),
        photometric=PhotometricConfig(
            noise_amplitude=config.noise_amplitude,
            brightness_drift=config.brightness_drift),
        seed=seed,
    )
