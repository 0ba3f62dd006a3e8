"""Middlebury .flo interchange codec.

Layout: little-endian float32 magic 202021.25, int32 width, int32 height,
then height*width interleaved (u, v) float32 pairs in row-major order.
Round trips are bit-exact for finite fields.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagicError, NonPositiveDimsError, TruncatedError
from .types import FlowField

FLO_MAGIC = 202021.25
_HEADER = struct.Struct("<fii")


def read_flo(data: bytes) -> FlowField:
    """Decode a .flo byte sequence into a FlowField (no validity mask)."""
    if len(data) < _HEADER.size:
        raise TruncatedError(f"flo stream too short: {len(data)} bytes")
    magic, width, height = _HEADER.unpack_from(data)
    if magic != FLO_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {FLO_MAGIC}")
    if width < 1 or height < 1:
        raise NonPositiveDimsError(f"non-positive dims {width}x{height}")
    expected = _HEADER.size + 8 * width * height
    if len(data) != expected:
        raise TruncatedError(
            f"flo stream has {len(data)} bytes, expected {expected}")
    uv = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    uv = uv.reshape(height, width, 2)
    return FlowField(u=uv[..., 0].copy(), v=uv[..., 1].copy())


def write_flo(flow: FlowField) -> bytes:
    """Encode a FlowField as .flo bytes; inverse of read_flo, bit-exact."""
    uv = np.empty((flow.height, flow.width, 2), dtype="<f4")
    uv[..., 0] = flow.u
    uv[..., 1] = flow.v
    return _HEADER.pack(FLO_MAGIC, flow.width, flow.height) + uv.tobytes()


def read_flo_file(path) -> FlowField:
    return read_flo(Path(path).read_bytes())


def write_flo_file(flow: FlowField, path) -> None:
    Path(path).write_bytes(write_flo(flow))
