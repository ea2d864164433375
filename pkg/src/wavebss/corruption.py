"""Reproducible Gaussian and salt-and-pepper noise injection."""
from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DegenerateChannelWarning, ImagePlane

_SEED_MASK = (1 << 64) - 1


def stage_seed(master_seed: int, label: str) -> int:
    """Derive an independent 64-bit seed for a named pipeline stage."""
    ss = np.random.SeedSequence([int(master_seed) & _SEED_MASK, zlib.crc32(label.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def channel_rng(seed: int, channel: int) -> np.random.Generator:
    """Counter-based stream for one channel: ``(seed, channel)`` fixes every draw
    and draw ``t`` is the ``t``-th output of that stream."""
    key = np.random.SeedSequence([int(seed) & _SEED_MASK, int(channel)]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class NoiseSpec:
    """``kind`` is one of ``none``, ``gaussian``, ``salt_pepper``, ``both``."""

    kind: str = "none"
    snr_db: Optional[float] = None
    density: Optional[float] = None
    seed: int = 0
    target: str = "default"

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "salt_pepper", "both"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind in ("gaussian", "both"):
            if self.snr_db is None or not math.isfinite(self.snr_db):
                raise ValueError("gaussian noise needs a finite snr_db")
        if self.kind in ("salt_pepper", "both"):
            if self.density is None or not 0.0 <= self.density <= 1.0:
                raise ValueError("salt-and-pepper density must lie in [0, 1]")
        if self.target not in ("default", "signal", "pixel"):
            raise ValueError(f"unknown noise target {self.target!r}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "NoiseSpec":
        """Parse ``none``, ``gaussian:<db>``, ``sp:<density>`` or ``both:<db>:<density>``."""
        parts = text.split(":")
        try:
            if parts == ["none"]:
                return cls(seed=seed)
            if parts[0] == "gaussian" and len(parts) == 2:
                return cls("gaussian", snr_db=float(parts[1]), seed=seed)
            if parts[0] == "sp" and len(parts) == 2:
                return cls("salt_pepper", density=float(parts[1]), seed=seed)
            if parts[0] == "both" and len(parts) == 3:
                return cls("both", snr_db=float(parts[1]), density=float(parts[2]), seed=seed)
        except ValueError as exc:
            raise ValueError(f"bad noise spec {text!r}: {exc}") from None
        raise ValueError(f"bad noise spec {text!r}")

    @property
    def gaussian(self) -> bool:
        return self.kind in ("gaussian", "both")

    @property
    def salt_pepper(self) -> bool:
        return self.kind in ("salt_pepper", "both")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "snr_db": self.snr_db, "density": self.density,
                "seed": self.seed, "target": self.target}


def add_gaussian_noise(X, snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise at ``snr_db`` relative to each channel's variance.

    Zero-variance channels are returned unchanged with a
    :class:`DegenerateChannelWarning`.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if not np.all(np.isfinite(X)):
        raise ValueError("input has non-finite entries")
    out = X.copy()
    scale = 10.0 ** (-snr_db / 20.0)
    for c, row in enumerate(X):
        var = row.var()
        if var == 0:
            warnings.warn(f"channel {c} has zero variance; no noise added",
                          DegenerateChannelWarning, stacklevel=2)
            continue
        out[c] += channel_rng(seed, c).standard_normal(row.shape[0]) * (np.sqrt(var) * scale)
    return out


def add_salt_pepper(img: ImagePlane, density: float, seed: int) -> ImagePlane:
    """Corrupt each pixel with probability ``density``; half to 0, half to 255."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = channel_rng(seed, 0)
    n = img.width * img.height
    hit = rng.random(n) < density
    salt = rng.random(n) < 0.5
    px = img.pixels.ravel().copy()
    px[hit & salt] = 255
    px[hit & ~salt] = 0
    return ImagePlane(img.width, img.height, px)
