import numpy as np
import pytest

from wavebss.model import ImagePlane
from wavebss.pgmio import (FormatError, decode_pgm, encode_pgm, read_matrix_csv, read_pgm,
                           write_matrix_csv, write_pgm)


def test_pgm_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    im = ImagePlane(7, 5, rng.integers(0, 256, 35).astype(np.uint8))
    path = tmp_path / "a.pgm"
    write_pgm(path, im)
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n7 5\n255\n")
    assert read_pgm(path) == im
    write_pgm(tmp_path / "b.pgm", read_pgm(path))
    assert (tmp_path / "b.pgm").read_bytes() == raw


def test_pgm_header_comments():
    data = b"P5\n# made by hand\n2 1\n# another\n255\n\x00\xff"
    im = decode_pgm(data)
    np.testing.assert_array_equal(im.pixels, [[0, 255]])


def test_pgm_raster_may_start_with_whitespace_byte():
    im = ImagePlane(2, 1, np.array([10, 32], np.uint8))  # 10 == '\n', 32 == ' '
    assert decode_pgm(encode_pgm(im)) == im


@pytest.mark.parametrize("data", [
    b"P2\n2 1\n255\n01",
    b"P5\n2 1\n65535\n\x00\x00\x00\x00",
    b"P5\n2 2\n255\n\x00",
    b"P5\n2",
])
def test_pgm_rejects_bad_files(data):
    with pytest.raises(FormatError):
        decode_pgm(data)


def test_csv_round_trip_exact(tmp_path):
    M = np.array([[1 / 3, -2e-17], [np.pi, 1e300]])
    write_matrix_csv(tmp_path / "m.csv", M)
    np.testing.assert_array_equal(read_matrix_csv(tmp_path / "m.csv"), M)
    assert (tmp_path / "m.csv").read_text().count("\n") == 2


def test_csv_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_matrix_csv(tmp_path / "nope.csv")
