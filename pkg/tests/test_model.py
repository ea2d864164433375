import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from wavebss.model import (DimensionError, ImagePlane, MixingModel, NumericalError,
                           SeparationResult, images_to_signals, mix, signal_matrix,
                           signals_to_images)


def test_images_to_signals_row_major():
    a = ImagePlane.from_array(np.array([[0, 255], [128, 64]], dtype=np.uint8))
    z = ImagePlane.from_array(np.zeros((2, 2), dtype=np.uint8))
    X = images_to_signals([a, z])
    np.testing.assert_array_equal(X, [[0, 255, 128, 64], [0, 0, 0, 0]])
    assert X.dtype == np.float64


def test_images_to_signals_size():
    ims = [ImagePlane.from_array(np.zeros((128, 128), np.uint8)) for _ in range(2)]
    assert images_to_signals(ims).shape == (2, 16384)


def test_images_to_signals_errors():
    a = ImagePlane.from_array(np.zeros((2, 2), np.uint8))
    b = ImagePlane.from_array(np.zeros((2, 3), np.uint8))
    with pytest.raises(DimensionError):
        images_to_signals([a, b])
    with pytest.raises(DimensionError):
        images_to_signals([a])


def test_image_plane_pixel_count():
    with pytest.raises(DimensionError):
        ImagePlane(3, 3, np.zeros(8, np.uint8))


def test_signals_to_images_identity_rescale():
    (im, _) = signals_to_images([[0, 255, 128, 64], [1, 2, 3, 4]], 2, 2)
    np.testing.assert_array_equal(im.pixels, [[0, 255], [128, 64]])


def test_signals_to_images_constant_row_is_zero():
    ims = signals_to_images([[5.0] * 4, [1, 2, 3, 4]], 2, 2)
    assert not ims[0].pixels.any()


def test_signals_to_images_sign_fix():
    r = np.array([0.0, 0, 0, 1, 0, 0, 0, 5.0])  # positively skewed
    a, b = signals_to_images(np.stack([r, -r]), 4, 2, sign_fix=True)
    assert a == b
    a2, b2 = signals_to_images(np.stack([r, -r]), 4, 2)
    assert a2 != b2


def test_signals_to_images_size_mismatch():
    with pytest.raises(DimensionError):
        signals_to_images(np.zeros((2, 5)), 2, 2)


def test_signals_to_images_joint_shares_scale():
    a, b = signals_to_images([[0.0, 1, 2, 3], [0, 0.5, 1, 1.5]], 2, 2, joint=True)
    np.testing.assert_array_equal(a.pixels.ravel(), [0, 85, 170, 255])
    np.testing.assert_array_equal(b.pixels.ravel(), [0, 42, 85, 128])


def test_round_trip_pixels():
    rng = np.random.default_rng(3)
    px = rng.integers(0, 256, size=(2, 16 * 8)).astype(np.uint8)
    px[:, 0], px[:, 1] = 0, 255
    ims = [ImagePlane(16, 8, p) for p in px]
    again = signals_to_images(images_to_signals(ims), 16, 8)
    assert again == ims


def test_mix_identity_and_hand_product():
    S = np.array([[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_array_equal(mix(S, np.eye(2)), S)
    np.testing.assert_array_equal(mix(S, [[1, 0.5], [0.5, 1]]), [[1, 0.5], [0.5, 1]])


def test_mixing_model_rejects_singular():
    with pytest.raises(NumericalError):
        MixingModel([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(DimensionError):
        MixingModel(np.ones((2, 3)))


def test_mix_dimension_mismatch():
    with pytest.raises(DimensionError):
        mix(np.ones((3, 10)), np.eye(2))


def test_signal_matrix_invariants():
    with pytest.raises(ValueError):
        signal_matrix([[1.0, np.nan], [0, 1]])
    with pytest.raises(DimensionError):
        signal_matrix([[1.0, 2.0, 3.0]])
    with pytest.raises(DimensionError):
        signal_matrix(np.ones((3, 2)))
    assert not signal_matrix(np.ones((2, 4))).flags.writeable


def test_separation_result_invariants():
    B = np.eye(2)
    with pytest.raises(DimensionError):
        SeparationResult(B, B, np.zeros((3, 4)))
    with pytest.raises(ValueError):
        SeparationResult(B, B, np.zeros((2, 4)), pi_final=-0.1)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(hnp.arrays(np.float64, (2, 3, 8), elements=finite),
       hnp.arrays(np.float64, (3, 3), elements=st.floats(-2, 2)))
def test_mix_is_linear(pair, A):
    A = A + 4 * np.eye(3)  # diagonally dominant, invertible
    S1, S2 = pair
    lhs = mix(S1 + S2, A)
    rhs = mix(S1, A) + mix(S2, A)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12 * max(1.0, np.abs(lhs).max()))
