"""Backward warping of frames by a flow field.

Convention: output(p) = frame(p + flow(p)), sampled bilinearly. Coverage is
false where the sample point leaves [0, W-1] x [0, H-1]; such pixels read 0.
This is the oracle used by the photometric-consistency checks of the data
generator: warping I2 by F12 reconstructs I1 on visible pixels.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatchError
from .types import FlowField, Frame


def warp_frame(frame: Frame, flow: FlowField) -> tuple[Frame, np.ndarray]:
    """Warp a frame backward along a flow field.

    Returns the warped frame and a boolean coverage map (false where the
    sample position fell outside the image).
    """
    if frame.shape != flow.shape:
        raise DimensionMismatchError(
            f"frame shape {frame.shape} != flow shape {flow.shape}")
    h, w = frame.shape
    ys, xs = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    sx = xs + flow.u.astype(np.float64)
    sy = ys + flow.v.astype(np.float64)
    coverage = (sx >= 0.0) & (sx <= w - 1) & (sy >= 0.0) & (sy <= h - 1)

    out = bilinear_sample(frame.values, sx, sy)
    out[~coverage] = 0.0
    return Frame(values=np.clip(out, 0.0, 1.0).astype(np.float32)), coverage


def bilinear_sample(values: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    """Sample an (H, W, C) array at float positions with clamped borders."""
    h, w = values.shape[:2]
    x0 = np.clip(np.floor(sx), 0, w - 1).astype(np.int64)
    y0 = np.clip(np.floor(sy), 0, h - 1).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(sx - x0, 0.0, 1.0)[..., None]
    fy = np.clip(sy - y0, 0.0, 1.0)[..., None]
    vals = values.astype(np.float64)
    top = vals[y0, x0] * (1 - fx) + vals[y0, x1] * fx
    bot = vals[y1, x0] * (1 - fx) + vals[y1, x1] * fx
    return top * (1 - fy) + bot * fy
