"""Frame and mask file IO (8-bit RGB PNG, 1-bit mask PNG)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .types import Frame


def write_frame_png(frame: Frame, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(frame.to_uint8(), mode="RGB").save(path, format="PNG")


def read_frame_png(path) -> Frame:
    with Image.open(path) as img:
        data = np.asarray(img.convert("RGB"), dtype=np.uint8)
    return Frame.from_uint8(data)


def write_mask_png(mask: np.ndarray, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(mask, dtype=bool)).convert("1").save(
        path, format="PNG")


def read_mask_png(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("1"), dtype=bool)
