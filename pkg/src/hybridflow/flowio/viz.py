"""Flow field rendering with the Middlebury-style color wheel.

Direction maps to hue via atan2(v, u) along a 55-entry color wheel
(15 red-yellow, 6 yellow-green, 4 green-cyan, 11 cyan-blue, 13 blue-magenta,
6 magenta-red steps); magnitude maps to saturation, so zero flow renders as
white. By default fields are normalized by their 99th-percentile magnitude.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .types import FlowField, Frame

# segment lengths of the standard wheel; 55 entries total
_SEGMENTS = (15, 6, 4, 11, 13, 6)


def make_color_wheel() -> np.ndarray:
    """Return the (55, 3) RGB color wheel on [0, 1]."""
    ry, yg, gc, cb, bm, mr = _SEGMENTS
    wheel = np.zeros((sum(_SEGMENTS), 3))
    i = 0
    wheel[i:i + ry, 0] = 1.0
    wheel[i:i + ry, 1] = np.arange(ry) / ry
    i += ry
    wheel[i:i + yg, 0] = 1.0 - np.arange(yg) / yg
    wheel[i:i + yg, 1] = 1.0
    i += yg
    wheel[i:i + gc, 1] = 1.0
    wheel[i:i + gc, 2] = np.arange(gc) / gc
    i += gc
    wheel[i:i + cb, 1] = 1.0 - np.arange(cb) / cb
    wheel[i:i + cb, 2] = 1.0
    i += cb
    wheel[i:i + bm, 0] = np.arange(bm) / bm
    wheel[i:i + bm, 2] = 1.0
    i += bm
    wheel[i:i + mr, 0] = 1.0
    wheel[i:i + mr, 2] = 1.0 - np.arange(mr) / mr
    return wheel


_WHEEL = make_color_wheel()


def wheel_color(angle: np.ndarray, saturation: np.ndarray) -> np.ndarray:
    """Color for direction angle(s) in radians at given saturation(s).

    The wheel is interpolated circularly; saturation blends from white
    (saturation 0) toward the wheel color.
    """
    n = _WHEEL.shape[0]
    pos = (np.asarray(angle, dtype=np.float64) / (2.0 * np.pi)) % 1.0 * n
    i0 = np.floor(pos).astype(np.int64) % n
    i1 = (i0 + 1) % n
    frac = (pos - np.floor(pos))[..., None]
    base = _WHEEL[i0] * (1.0 - frac) + _WHEEL[i1] * frac
    sat = np.asarray(saturation, dtype=np.float64)[..., None]
    return 1.0 - sat * (1.0 - base)


def colorize_flow(flow: FlowField,
                  max_magnitude: Optional[float] = None) -> Frame:
    """Render a flow field as an RGB frame.

    max_magnitude sets the flow magnitude mapped to full saturation; it
    defaults to the field's 99th-percentile magnitude (floored at 1e-9).
    """
    mag = flow.magnitude()
    if max_magnitude is None:
        max_magnitude = max(float(np.percentile(mag, 99.0)), 1e-9)
    elif max_magnitude <= 0:
        raise ValueError("max_magnitude must be positive")
    angle = np.arctan2(flow.v.astype(np.float64), flow.u.astype(np.float64))
    sat = np.minimum(1.0, mag / max_magnitude)
    rgb = wheel_color(angle, sat)
    return Frame(values=np.clip(rgb, 0.0, 1.0).astype(np.float32))
