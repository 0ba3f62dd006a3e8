"""Scalar evaluation metrics: endpoint error, PSNR, sharpness, motion masks.

All metrics run in float64 regardless of storage dtype. PSNR and sharpness
are capped at 99 dB (the value reported when the underlying error drops
below 1e-10) so identical inputs never produce infinities.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError, EmptyMaskError, TooSmallError
from .types import FlowField, Frame

DB_CAP = 99.0
_ERROR_FLOOR = 1e-10


def _effective_mask(shape, mask, valid) -> np.ndarray:
    eff = np.ones(shape, dtype=bool)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != shape:
            raise DimensionMismatchError(
                f"mask shape {mask.shape} != field shape {shape}")
        eff &= mask
    if valid is not None:
        eff &= valid
    if not eff.any():
        raise EmptyMaskError("no pixel selected by the effective mask")
    return eff


def endpoint_error(pred: FlowField, gt: FlowField,
                   mask: Optional[np.ndarray] = None) -> tuple[float, np.ndarray]:
    """Mean and per-pixel Euclidean distance between two flow fields.

    The mean runs over the effective mask (mask AND gt.valid); the returned
    per-pixel map covers the full field.
    """
    if pred.shape != gt.shape:
        raise DimensionMismatchError(
            f"pred shape {pred.shape} != gt shape {gt.shape}")
    eff = _effective_mask(gt.shape, mask, gt.valid)
    du = pred.u.astype(np.float64) - gt.u.astype(np.float64)
    dv = pred.v.astype(np.float64) - gt.v.astype(np.float64)
    per_pixel = np.sqrt(du * du + dv * dv)
    return float(per_pixel[eff].mean()), per_pixel


def psnr(pred: Frame, gt: Frame, mask: Optional[np.ndarray] = None) -> float:
    """Peak signal-to-noise ratio in dB on the [0, 1] scale.

    MSE pools the masked pixels of all three channels; MSE below 1e-10 is
    reported as the 99 dB cap.
    """
    if pred.shape != gt.shape:
        raise DimensionMismatchError(
            f"pred shape {pred.shape} != gt shape {gt.shape}")
    eff = _effective_mask(gt.shape, mask, None)
    diff = pred.values.astype(np.float64) - gt.values.astype(np.float64)
    mse = float((diff[eff] ** 2).mean())
    if mse < _ERROR_FLOOR:
        return DB_CAP
    return min(DB_CAP, 10.0 * np.log10(1.0 / mse))


def _gradient_energy(values: np.ndarray) -> np.ndarray:
    """|forward dx| + |forward dy| on the (H-1, W-1) interior grid."""
    dx = np.abs(values[:, 1:, :] - values[:, :-1, :])[:-1, :, :]
    dy = np.abs(values[1:, :, :] - values[:-1, :, :])[:, :-1, :]
    return dx + dy


def sharpness(pred: Frame, gt: Frame, mask: Optional[np.ndarray] = None) -> float:
    """Gradient-difference sharpness in dB.

    Compares the absolute forward-difference gradient magnitudes of the two
    images over interior pixels: 10*log10(1 / mean |g(pred) - g(gt)|),
    capped like psnr. A mask, when given, has full image shape and is
    cropped to the interior grid.
    """
    if pred.shape != gt.shape:
        raise DimensionMismatchError(
            f"pred shape {pred.shape} != gt shape {gt.shape}")
    h, w = gt.shape
    if h < 2 or w < 2:
        raise TooSmallError("sharpness needs height and width >= 2")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (h, w):
            raise DimensionMismatchError(
                f"mask shape {mask.shape} != frame shape {(h, w)}")
        mask = mask[:-1, :-1]
        if not mask.any():
            raise EmptyMaskError("no interior pixel selected")
    gp = _gradient_energy(pred.values.astype(np.float64))
    gg = _gradient_energy(gt.values.astype(np.float64))
    diff = np.abs(gp - gg)
    if mask is not None:
        diff = diff[mask]
    gdl = float(diff.mean())
    if gdl < _ERROR_FLOOR:
        return DB_CAP
    return min(DB_CAP, 10.0 * np.log10(1.0 / gdl))


def moving_region_mask(gt_flow: FlowField, threshold: float = 0.5) -> np.ndarray:
    """Boolean map of pixels whose flow magnitude strictly exceeds threshold."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return gt_flow.magnitude() > threshold
