"""Synthetic grayscale textures used as stand-in source images.

Scattered flat objects on a uniform background: most wavelet coefficients
vanish away from the edges, so the coefficient distribution is strongly
super-Gaussian, as for natural photographs.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .model import ImagePlane


def _to_pixels(field: np.ndarray) -> np.ndarray:
    lo, hi = field.min(), field.max()
    return np.rint((field - lo) * (255.0 / (hi - lo))).astype(np.uint8)


def scattered_ellipses(size: int = 128, seed: int = 0, count: int = 60,
                       radius_y=(2.0, 6.0), radius_x=(2.0, 6.0),
                       smooth: float = 0.7) -> ImagePlane:
    """Random flat ellipses of random gray level on a mid-gray background.

    ``count`` and the radii are given for a 128 x 128 image and scaled with
    ``size``.
    """
    rng = np.random.default_rng(seed)
    scale = size / 128.0
    yy, xx = np.mgrid[:size, :size]
    field = np.full((size, size), 0.5)
    for _ in range(max(1, round(count * scale ** 2))):
        cy, cx = rng.uniform(0, size, 2)
        ry = rng.uniform(*radius_y) * scale
        rx = rng.uniform(*radius_x) * scale
        field[((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 < 1.0] = rng.uniform()
    return ImagePlane.from_array(_to_pixels(ndimage.gaussian_filter(field, smooth)))


def texture_pair(size: int = 128, seed: int = 0) -> list:
    """Two independent textures: many small discs, and fewer large ones."""
    return [
        scattered_ellipses(size, seed, count=60, radius_y=(2, 6), radius_x=(2, 6)),
        scattered_ellipses(size, seed + 7919, count=25, radius_y=(5, 12), radius_x=(5, 12)),
    ]
