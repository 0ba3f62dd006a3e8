"""Analytic scene renderer: frames, exact flow fields, occlusion masks.

Geometry model: the surface point with local coordinate s on object o sits at
world position a + (t-1)*v + R((t-1)*w)*s at time t (anchor a, velocity v,
rotation rate w). Ownership at a point is the containing object with the
highest (z_order, list index); everything else is background, a textured
plane translating at the background velocity.

Flow anchored at time t maps each pixel center to its owning surface point's
position at time t+1, so it is exact by construction. The occlusion mask is
true where that landing point is inside the image and still owned by the same
surface, i.e. exactly where the flow is photometrically consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..flowio import FlowField, Frame, SampleTriplet, Source, warp_frame
from .scene import ObjectSpec, SceneSpec
from .textures import make_texture

_BACKGROUND = -1
_BG_SEED_TAG = 0xB6
_NOISE_TAG = 1000

SYNTHETIC_FAMILY = "grid"
REAL_FAMILY = "banded"


def _rotation(degrees: float) -> tuple[float, float]:
    r = np.deg2rad(degrees)
    return float(np.cos(r)), float(np.sin(r))


def _local_coords(obj: ObjectSpec, px: np.ndarray, py: np.ndarray,
                  t: int) -> tuple[np.ndarray, np.ndarray]:
    """Local sprite coordinates of world points (px, py) at time t."""
    ax = obj.anchor[0] + (t - 1) * obj.velocity[0]
    ay = obj.anchor[1] + (t - 1) * obj.velocity[1]
    c, s = _rotation(-(t - 1) * obj.rotation)
    dx = px - ax
    dy = py - ay
    return c * dx - s * dy, s * dx + c * dy


def _polygon_contains(vertices, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    inside = np.zeros(sx.shape, dtype=bool)
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        crosses = (y1 > sy) != (y2 > sy)
        if y1 == y2:
            continue
        x_cross = x1 + (sy - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (sx < x_cross)
    return inside


def _contains(obj: ObjectSpec, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    if obj.shape == "rectangle":
        return (np.abs(sx) <= obj.size[0] / 2.0) & (np.abs(sy) <= obj.size[1] / 2.0)
    if obj.shape == "ellipse":
        rx, ry = obj.size[0] / 2.0, obj.size[1] / 2.0
        return (sx / rx) ** 2 + (sy / ry) ** 2 <= 1.0
    return _polygon_contains(obj.vertices, sx, sy)


def _paint_order(spec: SceneSpec) -> list[int]:
    """Indices from lowest to highest layer; the last painted wins."""
    return sorted(range(len(spec.objects)),
                  key=lambda i: (spec.objects[i].z_order, i))


def _owner_at(spec: SceneSpec, px: np.ndarray, py: np.ndarray,
              t: int) -> np.ndarray:
    owner = np.full(px.shape, _BACKGROUND, dtype=np.int32)
    for idx in _paint_order(spec):
        obj = spec.objects[idx]
        sx, sy = _local_coords(obj, px, py, t)
        owner[_contains(obj, sx, sy)] = idx
    return owner


def _pixel_grid(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = np.meshgrid(np.arange(spec.width, dtype=np.float64),
                         np.arange(spec.height, dtype=np.float64))
    return xs, ys


def _flow(spec: SceneSpec, owner: np.ndarray, px: np.ndarray, py: np.ndarray,
          t: int) -> FlowField:
    """Exact displacement of each pixel's owning surface point, t -> t+1."""
    u = np.full(px.shape, spec.background_velocity[0])
    v = np.full(py.shape, spec.background_velocity[1])
    for idx, obj in enumerate(spec.objects):
        m = owner == idx
        if not m.any():
            continue
        sx, sy = _local_coords(obj, px, py, t)
        c, s = _rotation(t * obj.rotation)
        nx = obj.anchor[0] + t * obj.velocity[0] + c * sx - s * sy
        ny = obj.anchor[1] + t * obj.velocity[1] + s * sx + c * sy
        u[m] = (nx - px)[m]
        v[m] = (ny - py)[m]
    return FlowField(u=u.astype(np.float32), v=v.astype(np.float32))


def _occlusion(spec: SceneSpec, owner: np.ndarray, flow: FlowField,
               px: np.ndarray, py: np.ndarray, t: int) -> np.ndarray:
    """True where the surface point stays visible and in-bounds at t+1."""
    lx = px + flow.u.astype(np.float64)
    ly = py + flow.v.astype(np.float64)
    in_bounds = ((lx >= 0.0) & (lx <= spec.width - 1.0)
                 & (ly >= 0.0) & (ly <= spec.height - 1.0))
    owner_next = _owner_at(spec, lx, ly, t + 1)
    return in_bounds & (owner_next == owner)


def _render_frame(spec: SceneSpec, t: int, family: str,
                  textures: dict) -> Frame:
    xs, ys = _pixel_grid(spec)
    bx = xs - (t - 1) * spec.background_velocity[0]
    by = ys - (t - 1) * spec.background_velocity[1]
    img = textures[_BACKGROUND](bx, by)
    for idx in _paint_order(spec):
        obj = spec.objects[idx]
        sx, sy = _local_coords(obj, xs, ys, t)
        m = _contains(obj, sx, sy)
        if m.any():
            img[m] = textures[idx](sx, sy)[m]
    img = img + spec.photometric.brightness_drift * (t - 1)
    if spec.photometric.noise_amplitude > 0:
        from .dataset import mix64
        rng = np.random.default_rng(mix64(spec.seed, _NOISE_TAG + t))
        img = img + spec.photometric.noise_amplitude * rng.standard_normal(
            img.shape)
    return Frame(values=np.clip(img, 0.0, 1.0).astype(np.float32))


@dataclass(frozen=True)
class _SceneRecord:
    frames: tuple[Frame, Frame, Frame]
    f12: FlowField
    f23: FlowField
    occlusion12: np.ndarray
    occlusion23: np.ndarray


def _render_scene(spec: SceneSpec, family: str) -> _SceneRecord:
    from .dataset import mix64

    textures = {idx: make_texture(obj.texture_seed, family)
                for idx, obj in enumerate(spec.objects)}
    textures[_BACKGROUND] = make_texture(mix64(spec.seed, _BG_SEED_TAG), family)
    xs, ys = _pixel_grid(spec)
    frames = tuple(_render_frame(spec, t, family, textures) for t in (1, 2, 3))
    owner1 = _owner_at(spec, xs, ys, 1)
    owner2 = _owner_at(spec, xs, ys, 2)
    f12 = _flow(spec, owner1, xs, ys, 1)
    f23 = _flow(spec, owner2, xs, ys, 2)
    occ12 = _occlusion(spec, owner1, f12, xs, ys, 1)
    occ23 = _occlusion(spec, owner2, f23, xs, ys, 2)
    return _SceneRecord(frames=frames, f12=f12, f23=f23,
                        occlusion12=occ12, occlusion23=occ23)


def generate_triplet(spec: SceneSpec) -> SampleTriplet:
    """Render the scene with ground truth attached (source SYNTHETIC)."""
    rec = _render_scene(spec, SYNTHETIC_FAMILY)
    return SampleTriplet(
        i1=rec.frames[0], i2=rec.frames[1], i3=rec.frames[2],
        f12=rec.f12, f23=rec.f23, source=Source.SYNTHETIC,
        occlusion12=rec.occlusion12, occlusion23=rec.occlusion23)


def generate_real_like_with_truth(
        spec: SceneSpec) -> tuple[SampleTriplet, SampleTriplet]:
    """Distribution-shifted render: (REAL sample, withheld-truth record).

    The withheld record shares the frames but carries the exact flows and
    occlusion masks; it is stored apart from the training data and read only
    by evaluation code.
    """
    rec = _render_scene(spec, REAL_FAMILY)
    sample = SampleTriplet(i1=rec.frames[0], i2=rec.frames[1],
                           i3=rec.frames[2], source=Source.REAL)
    truth = SampleTriplet(
        i1=rec.frames[0], i2=rec.frames[1], i3=rec.frames[2],
        f12=rec.f12, f23=rec.f23, source=Source.SYNTHETIC,
        occlusion12=rec.occlusion12, occlusion23=rec.occlusion23)
    return sample, truth


def generate_real_like_triplet(spec: SceneSpec) -> SampleTriplet:
    """Distribution-shifted render with ground truth withheld (source REAL)."""
    return generate_real_like_with_truth(spec)[0]


def photometric_consistency_error(triplet: SampleTriplet,
                                  pair: str = "12") -> float:
    """Mean |earlier frame - warp(later frame)| on non-occluded covered pixels.

    `pair` selects the frame pair: "12" checks I1 against warp(I2, F12),
    "23" checks I2 against warp(I3, F23).
    """
    if pair == "12":
        earlier, later, flow, occ = (triplet.i1, triplet.i2, triplet.f12,
                                     triplet.occlusion12)
    elif pair == "23":
        earlier, later, flow, occ = (triplet.i2, triplet.i3, triplet.f23,
                                     triplet.occlusion23)
    else:
        raise ValueError("pair must be '12' or '23'")
    if flow is None:
        raise ValueError("triplet has no flow ground truth for this pair")
    warped, covered = warp_frame(later, flow)
    mask = covered if occ is None else (occ & covered)
    diff = np.abs(earlier.values.astype(np.float64)
                  - warped.values.astype(np.float64))
    return float(diff[mask].mean())
