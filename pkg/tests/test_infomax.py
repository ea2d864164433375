import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import rotation
from wavebss.infomax import (InfomaxParams, entropy_cost, estimate_mutual_information, gradient,
                             natural_gradient_step, run_infomax, score)
from wavebss.metrics import performance_index
from wavebss.model import DegenerateChannelWarning, NumericalError
from wavebss.wavelet import WaveletSpec, wavelet_packet_forward
from wavebss.whitening import whiten


def fd_gradient(f, B, h=1e-6):
    G = np.zeros_like(B)
    for idx in np.ndindex(B.shape):
        E = np.zeros_like(B)
        E[idx] = h
        G[idx] = (f(B + E) - f(B - E)) / (2 * h)
    return G


def moment_batch(c, k=2):
    """All sign patterns of (+-c, ..., +-c): mean(phi(z) z^T) = -2 c tanh(c) I."""
    grids = np.array(np.meshgrid(*[[-c, c]] * k, indexing="ij")).reshape(k, -1)
    return grids


# solves 2 c tanh(c) = 1, so the batch moment equals -I
C_FIXED = brentq(lambda c: 2 * c * np.tanh(c) - 1, 0.1, 3.0)


def test_score_values():
    assert score(0.0) == 0.0
    # frozen from symbolic g''/g' for tanh; cross-checked against finite differences below
    assert score(1.0) == pytest.approx(-1.5231883119115297, abs=1e-15)
    u = np.linspace(-4, 4, 17)
    np.testing.assert_array_equal(score(-u), -score(u))


def test_score_matches_fd_ratio():
    h = 1e-4
    u = 1.0
    g1 = (np.tanh(u + h) - np.tanh(u - h)) / (2 * h)
    g2 = (np.tanh(u + h) - 2 * np.tanh(u) + np.tanh(u - h)) / h ** 2
    assert g2 / g1 == pytest.approx(score(u), rel=1e-6)


def test_entropy_cost_hand_value():
    assert entropy_cost(np.eye(2), np.zeros((2, 1))) == 0.0


def test_entropy_cost_scaling(rng):
    B = rng.normal(size=(3, 3))
    Zc = np.zeros((3, 1))
    assert entropy_cost(2.5 * B, Zc) - entropy_cost(B, Zc) == pytest.approx(3 * np.log(2.5))


def test_entropy_cost_singular():
    with pytest.raises(NumericalError):
        entropy_cost(np.zeros((2, 2)), np.ones((2, 3)))


def test_entropy_cost_large_arguments_finite():
    assert np.isfinite(entropy_cost(np.eye(2), np.full((2, 3), 1e4)))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("k", [2, 3])
def test_gradient_matches_finite_differences(seed, k):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(k, k)) + 2 * np.eye(k)
    Zc = rng.laplace(size=(k, 200))
    fd = fd_gradient(lambda M: entropy_cost(M, Zc), B)
    an = gradient(B, Zc)
    assert np.linalg.norm(an - fd) / np.linalg.norm(fd) < 1e-5


def test_gradient_zero_sample():
    np.testing.assert_array_equal(gradient(np.eye(2), np.zeros((2, 1))), np.eye(2))


def test_gradient_singular():
    with pytest.raises(NumericalError):
        gradient(np.ones((2, 2)), np.ones((2, 3)))


def test_natural_gradient_zero_sample():
    mu = 0.3
    np.testing.assert_allclose(natural_gradient_step(np.eye(2), np.zeros(2), mu), (1 + mu) * np.eye(2))


@pytest.mark.parametrize("theta", [0.0, 0.4, 2.0])
def test_natural_gradient_fixed_point(theta):
    B = rotation(theta)
    u = moment_batch(C_FIXED)
    z = B.T @ u  # B orthogonal, so B z = u
    moment = score(B @ z) @ (B @ z).T / z.shape[1]
    np.testing.assert_allclose(moment, -np.eye(2), atol=1e-14)
    np.testing.assert_allclose(natural_gradient_step(B, z, 0.5), B, atol=1e-14)
    # the Euclidean gradient vanishes there too, for orthogonal B
    np.testing.assert_allclose(gradient(B, z) @ B.T @ B, 0, atol=1e-14)


def test_natural_gradient_step_size_bound(rng):
    mu = 2e-5
    B = rng.normal(size=(2, 2)) + 2 * np.eye(2)
    z = rng.laplace(size=(2, 1))
    u = B @ z
    H = np.eye(2) + score(u) @ u.T
    dB = natural_gradient_step(B, z, mu) - B
    assert np.linalg.norm(dB) <= mu * np.linalg.norm(H) * np.linalg.norm(B) * (1 + 1e-12)


def test_natural_gradient_equivariance(rng):
    B0 = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    M = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    z = rng.laplace(size=(3, 500))
    Minv = np.linalg.inv(M)
    B, Bm = B0.copy(), B0 @ Minv
    for _ in range(5):
        B = natural_gradient_step(B, z, 0.05)
        Bm = natural_gradient_step(Bm, M @ z, 0.05)
        np.testing.assert_allclose(Bm, B @ Minv, atol=1e-8)


def test_batch_mode_ascends(rng):
    S = rng.laplace(size=(2, 4000))
    Z, _ = whiten(np.array([[1.0, 0.5], [0.2, 1.0]]) @ S)
    _, trace = run_infomax(rotation(0.3), Z, InfomaxParams(mu=1e-3, max_epochs=50, mode="batch"))
    assert np.all(np.diff(trace.cost) >= -1e-9)
    assert len(trace.cost) == trace.epochs_run + 1 == len(trace.rel_change) + 1


def standardized(S):
    return (S - S.mean(axis=1, keepdims=True)) / S.std(axis=1, keepdims=True)


def test_independent_input_stays_separated(rng):
    Z = standardized(rng.laplace(size=(2, 20000)))
    B, _ = run_infomax(np.eye(2), Z, InfomaxParams(mu=0.01, max_epochs=200, mode="batch"))
    assert performance_index(B, "amari") < 0.05


def test_rotated_laplacian_sources_separate(rng):
    R = rotation(np.pi / 6)
    Z = R @ standardized(rng.laplace(size=(2, 20000)))
    B, trace = run_infomax(np.eye(2), Z, InfomaxParams(mu=0.1, max_epochs=200, mode="batch"))
    assert trace.epochs_run <= 200
    assert performance_index(B @ R, "amari") < 0.05


def test_uniform_sources_are_not_separated_by_tanh(rng):
    # sub-Gaussian sources: the tanh score pushes away from the separating rotation
    R = rotation(np.pi / 6)
    Z = R @ standardized(rng.uniform(-1, 1, size=(2, 20000)))
    B, _ = run_infomax(np.eye(2), Z, InfomaxParams(mu=0.1, max_epochs=200, mode="batch"))
    assert performance_index(B @ R, "amari") > 0.5


def test_stochastic_mode_on_subbands(rng):
    R = rotation(0.6)
    Z, wres = whiten(R @ rng.laplace(size=(2, 4096)))
    d = wavelet_packet_forward(Z, WaveletSpec())
    params = InfomaxParams(mu=1e-3, max_epochs=30, seed=5)
    B1, t1 = run_infomax(np.eye(2), d, params)
    B2, _ = run_infomax(np.eye(2), d, params)
    assert np.array_equal(B1, B2)
    assert performance_index(B1 @ wres.W @ R, "amari") < 0.05
    B3, _ = run_infomax(np.eye(2), d, InfomaxParams(mu=1e-3, max_epochs=30, seed=6))
    assert not np.array_equal(B1, B3)


def test_stochastic_kernel_matches_per_sample_steps(rng):
    from wavebss.infomax import _stochastic_epoch
    B = rotation(0.2) * 1.3
    Z = np.ascontiguousarray(rng.laplace(size=(2, 50)))
    order = rng.permutation(50)
    expected = B.copy()
    for t in order:
        expected = natural_gradient_step(expected, Z[:, t], 0.01)
    np.testing.assert_allclose(_stochastic_epoch(B.copy(), Z, order, 0.01), expected, atol=1e-13)


def test_convergence_stop(rng):
    Z, _ = whiten(rng.laplace(size=(2, 2000)))
    _, trace = run_infomax(np.eye(2), Z, InfomaxParams(mu=0.1, max_epochs=500, mode="batch",
                                                       conv_tol=1e-6))
    assert trace.converged and trace.epochs_run < 500


def test_run_infomax_rejects_rank_deficient():
    with pytest.raises(NumericalError):
        run_infomax(np.ones((2, 2)), np.ones((2, 8)))


def test_params_validation():
    with pytest.raises(ValueError):
        InfomaxParams(mu=0)
    with pytest.raises(ValueError):
        InfomaxParams(mode="online")


def test_mutual_information_independent(rng):
    mi = estimate_mutual_information(rng.uniform(size=(2, 100_000)), bins=32)
    assert mi[0, 1] < 0.02
    assert np.array_equal(mi, mi.T) and np.all(np.diag(mi) == 0)


def test_mutual_information_identical(rng):
    y = rng.uniform(size=100_000)
    mi = estimate_mutual_information(np.stack([y, y, rng.uniform(size=100_000)]), bins=32)
    assert mi[0, 1] > 1.0
    assert mi[0, 1] == pytest.approx(np.log(32), abs=0.01)
    assert np.array_equal(mi, mi.T)


def test_mutual_information_degenerate(rng):
    Y = np.stack([np.ones(1000), rng.uniform(size=1000)])
    with pytest.warns(DegenerateChannelWarning):
        mi = estimate_mutual_information(Y, bins=16)
    assert mi[0, 1] == 0


def test_mutual_information_too_few_samples(rng):
    with pytest.raises(ValueError):
        estimate_mutual_information(rng.uniform(size=(2, 100)), bins=32)
