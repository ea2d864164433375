"""Periodic orthonormal wavelet-packet transform along the sample axis.

Rows of the input are channels; the transform acts on each row
independently, so it commutes with any channel mixing ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DimensionError

_SQ2 = np.sqrt(2.0)
_SQ3 = np.sqrt(3.0)

FILTERS = {
    "haar": np.array([1.0, 1.0]) / _SQ2,
    "db4": np.array([1 + _SQ3, 3 + _SQ3, 3 - _SQ3, 1 - _SQ3]) / (4 * _SQ2),
}
_ALIASES = {"daubechies-4": "db4", "d4": "db4", "db2": "db4"}


def _filters(family: str):
    h = FILTERS[family]
    # quadrature-mirror high-pass
    g = h[::-1] * (-1.0) ** np.arange(len(h))
    return h, g


@dataclass(frozen=True)
class WaveletSpec:
    family: str = "db4"
    depth: int = 2
    boundary: str = "periodic"

    def __post_init__(self):
        fam = _ALIASES.get(self.family.lower(), self.family.lower())
        if fam not in FILTERS:
            raise ValueError(f"unknown wavelet family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if int(self.depth) < 1:
            raise ValueError("wavelet depth must be >= 1")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundary handling is supported")

    @property
    def n_bands(self) -> int:
        return 2 ** self.depth


@dataclass(frozen=True)
class SubbandDecomposition:
    """Leaves of a full packet tree, in natural (low/high recursive) order."""

    bands: tuple
    spec: WaveletSpec
    original_T: int

    @property
    def m(self) -> int:
        return len(self.bands)

    @property
    def n_channels(self) -> int:
        return self.bands[0].shape[0]

    def concatenated(self) -> np.ndarray:
        return np.concatenate(self.bands, axis=1)


def _analysis(x, h, g):
    T = x.shape[-1]
    a = np.zeros(x.shape[:-1] + (T // 2,))
    d = np.zeros_like(a)
    base = 2 * np.arange(T // 2)
    for k in range(len(h)):
        xs = x[..., (base + k) % T]
        a += h[k] * xs
        d += g[k] * xs
    return a, d


def _synthesis(a, d, h, g):
    half = a.shape[-1]
    T = 2 * half
    x = np.zeros(a.shape[:-1] + (T,))
    base = 2 * np.arange(half)
    for k in range(len(h)):
        # indices (base + k) % T are distinct for fixed k, so += is safe
        x[..., (base + k) % T] += h[k] * a + g[k] * d
    return x


def wavelet_packet_forward(Z, spec: WaveletSpec = WaveletSpec()) -> SubbandDecomposition:
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2:
        raise DimensionError(f"expected a 2-D signal matrix, got shape {Z.shape}")
    T = Z.shape[1]
    if T % spec.n_bands:
        raise DimensionError(f"T={T} is not divisible by 2^{spec.depth}")
    h, g = _filters(spec.family)
    level = [Z]
    for _ in range(spec.depth):
        level = [part for node in level for part in _analysis(node, h, g)]
    return SubbandDecomposition(bands=tuple(level), spec=spec, original_T=T)


def wavelet_packet_inverse(d: SubbandDecomposition) -> np.ndarray:
    if d.m != d.spec.n_bands:
        raise DimensionError(f"expected {d.spec.n_bands} bands, got {d.m}")
    shape = d.bands[0].shape
    if any(b.shape != shape for b in d.bands) or shape[1] * d.m != d.original_T:
        raise DimensionError("inconsistent band sizes")
    h, g = _filters(d.spec.family)
    level = [np.asarray(b, dtype=np.float64) for b in d.bands]
    while len(level) > 1:
        level = [_synthesis(level[i], level[i + 1], h, g) for i in range(0, len(level), 2)]
    return level[0]


def subband_components(d: SubbandDecomposition) -> list:
    """Time-domain sub-band components; they sum to the original signal."""
    out = []
    for i in range(d.m):
        bands = tuple(b if j == i else np.zeros_like(b) for j, b in enumerate(d.bands))
        out.append(wavelet_packet_inverse(
            SubbandDecomposition(bands=bands, spec=d.spec, original_T=d.original_T)))
    return out
