"""Binary PGM (P5, maxval 255) and CSV matrix I/O."""
from __future__ import annotations

import io
import os

import numpy as np

from .model import ImagePlane


class FormatError(ValueError):
    pass


def _tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset of the first raster byte.
    """
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    return tokens, pos + 1


def decode_pgm(data: bytes) -> ImagePlane:
    tokens, offset = _tokens(data, 4)
    if tokens[0] != b"P5":
        raise FormatError(f"not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise FormatError(f"bad PGM header: {exc}") from None
    if maxval != 255:
        raise FormatError(f"only maxval 255 is supported, got {maxval}")
    raster = data[offset:offset + width * height]
    if len(raster) != width * height:
        raise FormatError("truncated PGM raster")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return ImagePlane(width, height, px)


def encode_pgm(image: ImagePlane) -> bytes:
    header = b"P5\n%d %d\n255\n" % (image.width, image.height)
    return header + image.pixels.tobytes()


def read_pgm(path) -> ImagePlane:
    with open(path, "rb") as f:
        return decode_pgm(f.read())


def write_pgm(path, image: ImagePlane) -> None:
    with open(path, "wb") as f:
        f.write(encode_pgm(image))


def write_matrix_csv(path, M) -> None:
    """One row per line; ``%.17g`` so values round-trip exactly."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    buf = io.StringIO()
    np.savetxt(buf, M, delimiter=",", fmt="%.17g")
    with open(path, "w", newline="\n") as f:
        f.write(buf.getvalue())


def read_matrix_csv(path) -> np.ndarray:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2))
