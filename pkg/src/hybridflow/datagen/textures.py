"""Procedural texture samplers.

Both families are smooth functions of continuous coordinates, which keeps the
rendered frames photometrically consistent under fractional-pixel warping.
The plain family interpolates a coarse random grid; the shifted family sums
oriented cosine waves, giving a visually distinct banded look used by the
real-like renderer.
"""

from __future__ import annotations

import numpy as np


class GridTexture:
    """Bilinear interpolation of a seeded periodic coarse grid."""

    def __init__(self, seed: int, cells: int = 6, cell_size: float = 12.0,
                 low: float = 0.15, high: float = 0.85):
        rng = np.random.default_rng(seed)
        self._grid = rng.uniform(low, high, size=(cells, cells, 3))
        self._cells = cells
        self._cell_size = cell_size

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n = self._cells
        gx = (np.asarray(x, dtype=np.float64) / self._cell_size) % n
        gy = (np.asarray(y, dtype=np.float64) / self._cell_size) % n
        x0 = np.floor(gx).astype(np.int64)
        y0 = np.floor(gy).astype(np.int64)
        fx = (gx - x0)[..., None]
        fy = (gy - y0)[..., None]
        x0 %= n
        y0 %= n
        x1 = (x0 + 1) % n
        y1 = (y0 + 1) % n
        g = self._grid
        top = g[y0, x0] * (1.0 - fx) + g[y0, x1] * fx
        bottom = g[y1, x0] * (1.0 - fx) + g[y1, x1] * fx
        return top * (1.0 - fy) + bottom * fy


class BandedTexture:
    """Sum of seeded oriented cosine waves, one set per channel."""

    def __init__(self, seed: int, waves: int = 4,
                 low: float = 0.15, high: float = 0.85):
        rng = np.random.default_rng(seed)
        self._freq = rng.uniform(0.04, 0.18, size=(3, waves))
        self._angle = rng.uniform(0.0, np.pi, size=(3, waves))
        self._phase = rng.uniform(0.0, 2.0 * np.pi, size=(3, waves))
        self._mid = (low + high) / 2.0
        self._amp = (high - low) / 2.0
        self._waves = waves

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)[..., None, None]
        y = np.asarray(y, dtype=np.float64)[..., None, None]
        proj = x * np.cos(self._angle) + y * np.sin(self._angle)
        waves = np.cos(2.0 * np.pi * self._freq * proj + self._phase)
        return self._mid + self._amp * waves.mean(axis=-1)


def make_texture(seed: int, family: str):
    if family == "grid":
        return GridTexture(seed)
    if family == "banded":
        return BandedTexture(seed)
    raise ValueError(f"unknown texture family {family!r}")
