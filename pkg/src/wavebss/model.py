"""Core value types: signal matrices, mixing/separation matrices, image planes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class BSSError(Exception):
    """Base class for errors raised by wavebss."""


class DimensionError(BSSError, ValueError):
    """Shapes of the inputs do not compose."""


class NumericalError(BSSError):
    """A numerical stage failed (singular matrix, rank-deficient covariance...)."""

    def __init__(self, message: str, stage: str = ""):
        super().__init__(message)
        self.stage = stage


class DegenerateChannelWarning(UserWarning):
    """A channel has zero variance or range; its result is a placeholder."""


def signal_matrix(data, name: str = "signal") -> np.ndarray:
    """Validate and return a read-only ``(n, T)`` float64 signal matrix.

    Rows are channels (sources, mixtures or outputs), columns are samples.
    Requires finite entries, ``n >= 2`` and ``T >= n``.
    """
    x = np.array(data, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"{name}: expected a 2-D array, got shape {x.shape}")
    n, T = x.shape
    if n < 2 or T < n:
        raise DimensionError(f"{name}: need n >= 2 and T >= n, got n={n}, T={T}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name}: non-finite entries")
    x.flags.writeable = False
    return x


@dataclass(frozen=True)
class MixingModel:
    """Square, invertible mixing matrix ``A`` with ``X = A S``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"mixing matrix must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("mixing matrix has non-finite entries")
        if abs(np.linalg.det(A)) <= 1e-12:
            raise NumericalError("mixing matrix is singular (|det A| <= 1e-12)", stage="mix")
        A.flags.writeable = False
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]


def separation_matrix(B, name: str = "B") -> np.ndarray:
    """Validate a ``(k, n)`` separation matrix with full row rank, ``k <= n``."""
    B = np.array(B, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] > B.shape[1]:
        raise DimensionError(f"{name}: expected k x n with k <= n, got shape {B.shape}")
    if not np.all(np.isfinite(B)):
        raise NumericalError(f"{name}: non-finite entries", stage="separation")
    if np.linalg.matrix_rank(B) < B.shape[0]:
        raise NumericalError(f"{name}: not full row rank", stage="separation")
    B.flags.writeable = False
    return B


@dataclass(frozen=True)
class SourceMatching:
    """Permutation/sign alignment of outputs to reference sources.

    ``permutation[i]`` is the output row matched to source ``i``;
    ``signs[i] * Y[permutation[i]]`` is positively correlated with ``S[i]``.
    """

    permutation: tuple
    signs: tuple
    correlations: tuple


@dataclass(frozen=True)
class SeparationResult:
    B_initial: np.ndarray
    B_final: np.ndarray
    Y: np.ndarray
    pi_initial: Optional[float] = None
    pi_final: Optional[float] = None
    matching: Optional[SourceMatching] = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.Y.shape[0] != self.B_final.shape[0]:
            raise DimensionError("Y row count must equal B_final row count")
        for v in (self.pi_initial, self.pi_final):
            if v is not None and v < 0:
                raise ValueError("performance index must be non-negative")


@dataclass(frozen=True)
class ImagePlane:
    """8-bit grayscale image; ``pixels`` has shape ``(height, width)``."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.size != self.width * self.height:
            raise DimensionError(
                f"pixel count {px.size} != {self.width} x {self.height}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = np.rint(px).astype(np.uint8)
        px = px.reshape(self.height, self.width).copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, arr) -> "ImagePlane":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D pixel array, got shape {arr.shape}")
        return cls(width=arr.shape[1], height=arr.shape[0], pixels=arr)

    def __eq__(self, other):
        if not isinstance(other, ImagePlane):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and \
            np.array_equal(self.pixels, other.pixels)

    __hash__ = None


def images_to_signals(images: Sequence[ImagePlane]) -> np.ndarray:
    """Stack images as rows of a signal matrix (row-major flatten)."""
    if len(images) < 2:
        raise DimensionError("need at least 2 images")
    shape = (images[0].height, images[0].width)
    for im in images[1:]:
        if (im.height, im.width) != shape:
            raise DimensionError(
                f"image size mismatch: {im.width}x{im.height} vs {shape[1]}x{shape[0]}")
    return signal_matrix(np.stack([im.pixels.ravel() for im in images]).astype(np.float64))


def _skewness(row: np.ndarray) -> float:
    d = row - row.mean()
    return float(np.mean(d ** 3))


def signals_to_images(Y, width: int, height: int, sign_fix: bool = False,
                      joint: bool = False) -> list:
    """Render each row of ``Y`` as an 8-bit image by min-max rescaling.

    With ``sign_fix`` a row of negative skewness is negated first, which
    resolves the sign ambiguity of separated outputs. With ``joint`` a single
    rescale (global min/max) is shared by all rows, so the rendering is one
    affine map applied to the whole matrix. Rows (or matrices) of zero range
    render as all-zero images.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != width * height:
        raise DimensionError(f"T={Y.shape[-1]} does not equal {width} x {height}")
    rows = np.array([-r if sign_fix and _skewness(r) < 0 else r for r in Y])
    if joint:
        lo = np.full(len(rows), rows.min())
        hi = np.full(len(rows), rows.max())
    else:
        lo, hi = rows.min(axis=1), rows.max(axis=1)
    images = []
    for r, a, b in zip(rows, lo, hi):
        if b - a <= 0:
            px = np.zeros(r.shape, dtype=np.uint8)
        else:
            px = np.rint((r - a) * (255.0 / (b - a))).astype(np.uint8)
        images.append(ImagePlane(width, height, px))
    return images


def mix(S, A) -> np.ndarray:
    """Instantaneous linear mixture ``X = A S``."""
    if not isinstance(A, MixingModel):
        A = MixingModel(A)
    S = signal_matrix(S, "sources")
    if S.shape[0] != A.n:
        raise DimensionError(f"A is {A.n}x{A.n} but S has {S.shape[0]} rows")
    return signal_matrix(A.A @ S, "mixtures")
