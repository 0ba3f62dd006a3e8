"""KITTI 16-bit flow PNG codec.

Channel convention (RGB order): R stores u, G stores v, each as
round(value * 64) + 2^15 in uint16; B > 0 marks the pixel valid.
Invalid pixels decode to u = v = 0. Quantization error after a
round trip is at most 1/128 px per component.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np

from ..errors import (RangeOverflowError, WrongBitDepthError,
                      WrongChannelCountError)
from .types import FlowField

_OFFSET = 2 ** 15
_SCALE = 64.0
# largest magnitude whose encoding round(u*64)+2^15 stays within uint16
FLOW_RANGE = 512.0


def decode_kitti_png(img: np.ndarray) -> FlowField:
    """Decode a (H, W, 3) uint16 RGB array into a FlowField with validity."""
    img = np.asarray(img)
    if img.dtype != np.uint16:
        raise WrongBitDepthError(f"expected uint16 image, got {img.dtype}")
    if img.ndim != 3 or img.shape[2] != 3:
        raise WrongChannelCountError(
            f"expected 3 channels, got shape {img.shape}")
    u = (img[..., 0].astype(np.float32) - _OFFSET) / _SCALE
    v = (img[..., 1].astype(np.float32) - _OFFSET) / _SCALE
    valid = img[..., 2] > 0
    u = np.where(valid, u, np.float32(0.0))
    v = np.where(valid, v, np.float32(0.0))
    return FlowField(u=u, v=v, valid=valid)


def encode_kitti_png(flow: FlowField) -> np.ndarray:
    """Encode a FlowField as a (H, W, 3) uint16 RGB array."""
    valid = flow.valid if flow.valid is not None \
        else np.ones(flow.shape, dtype=bool)
    for comp, name in ((flow.u, "u"), (flow.v, "v")):
        vals = comp[valid]
        if vals.size and np.abs(vals).max() >= FLOW_RANGE:
            raise RangeOverflowError(
                f"|{name}| must be < {FLOW_RANGE} px to encode")
    img = np.zeros(flow.shape + (3,), dtype=np.uint16)
    img[..., 0] = np.where(
        valid, np.round(flow.u.astype(np.float64) * _SCALE) + _OFFSET, _OFFSET)
    img[..., 1] = np.where(
        valid, np.round(flow.v.astype(np.float64) * _SCALE) + _OFFSET, _OFFSET)
    img[..., 2] = valid.astype(np.uint16)
    return img


def read_kitti_png_file(path) -> FlowField:
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FileNotFoundError(f"cannot read {path}")
    if raw.ndim == 3 and raw.shape[2] == 3:
        raw = raw[..., ::-1]  # BGR on disk -> RGB
    return decode_kitti_png(np.ascontiguousarray(raw))


def write_kitti_png_file(flow: FlowField, path) -> None:
    img = encode_kitti_png(flow)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not cv2.imwrite(str(path), np.ascontiguousarray(img[..., ::-1])):
        raise OSError(f"cv2 failed to write {path}")
