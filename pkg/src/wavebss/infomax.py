"""Natural-gradient Infomax refinement with the ``g = tanh`` nonlinearity.

The cost maximized is the output entropy up to a data constant,

    J(B) = log|det B| + mean_t sum_i log g'(u_i(t)),   u = B z,

whose Euclidean gradient is ``(B^T)^-1 + mean_t phi(u) z^T`` with the score
``phi = g''/g' = -2 tanh``. Post-multiplying that gradient by ``B^T B`` gives
the natural-gradient update ``B <- B + mu (I + phi(u) u^T) B``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .model import DegenerateChannelWarning, DimensionError, NumericalError, signal_matrix
from .wavelet import SubbandDecomposition

LOG2 = np.log(2.0)


@dataclass(frozen=True)
class InfomaxParams:
    mu: float = 2e-5
    max_epochs: int = 200
    conv_tol: float = 1e-6
    mode: str = "stochastic"
    seed: int = 0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("learning rate mu must be positive")
        if self.conv_tol < 0:
            raise ValueError("conv_tol must be non-negative")
        if self.mode not in ("stochastic", "batch"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be non-negative")


@dataclass
class InfomaxTrace:
    cost: list = field(default_factory=list)
    rel_change: list = field(default_factory=list)
    epochs_run: int = 0
    converged: bool = False

    def summary(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "converged": self.converged,
            "cost_initial": self.cost[0] if self.cost else None,
            "cost_final": self.cost[-1] if self.cost else None,
            "rel_change_final": self.rel_change[-1] if self.rel_change else None,
        }


def score(u):
    """``phi(u) = g''(u) / g'(u) = -2 tanh(u)``."""
    return -2.0 * np.tanh(u)


def _log_sech2(u):
    # log g'(u) = log(1 - tanh^2 u) = -2 log cosh u, overflow-safe
    a = np.abs(u)
    return -2.0 * (a + np.log1p(np.exp(-2.0 * a)) - LOG2)


def _check_square(B, Zc):
    B = np.asarray(B, dtype=np.float64)
    Zc = np.asarray(Zc, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DimensionError(f"B must be square, got shape {B.shape}")
    if Zc.ndim != 2 or Zc.shape[0] != B.shape[1]:
        raise DimensionError(f"B {B.shape} does not act on data of shape {Zc.shape}")
    return B, Zc


def entropy_cost(B, Zc) -> float:
    B, Zc = _check_square(B, Zc)
    sign, logdet = np.linalg.slogdet(B)
    if sign == 0 or logdet < np.log(1e-300):
        raise NumericalError("separation matrix is singular", stage="infomax")
    u = B @ Zc
    return float(logdet + np.sum(_log_sech2(u)) / Zc.shape[1])


def gradient(B, Zc) -> np.ndarray:
    """Euclidean gradient of :func:`entropy_cost` with respect to ``B``."""
    B, Zc = _check_square(B, Zc)
    try:
        inv_t = np.linalg.inv(B).T
    except np.linalg.LinAlgError:
        raise NumericalError("separation matrix is singular", stage="infomax") from None
    u = B @ Zc
    return inv_t + score(u) @ Zc.T / Zc.shape[1]


def natural_gradient_step(B, z_batch, mu: float) -> np.ndarray:
    """One natural-gradient update, averaging ``phi(u) u^T`` over the batch."""
    B = np.asarray(B, dtype=np.float64)
    z = np.asarray(z_batch, dtype=np.float64)
    if z.ndim == 1:
        z = z[:, None]
    u = B @ z
    M = score(u) @ u.T / z.shape[1]
    return B + mu * (np.eye(B.shape[0]) + M) @ B


@numba.njit(cache=True)
def _stochastic_epoch(B, Z, order, mu):
    k = B.shape[0]
    u = np.empty(k)
    phi = np.empty(k)
    H = np.empty((k, k))
    dB = np.empty((k, k))
    for t in order:
        for i in range(k):
            s = 0.0
            for j in range(k):
                s += B[i, j] * Z[j, t]
            u[i] = s
            phi[i] = -2.0 * np.tanh(s)
        for i in range(k):
            for j in range(k):
                H[i, j] = phi[i] * u[j]
            H[i, i] += 1.0
        for i in range(k):
            for j in range(k):
                s = 0.0
                for l in range(k):
                    s += H[i, l] * B[l, j]
                dB[i, j] = s
        for i in range(k):
            for j in range(k):
                B[i, j] += mu * dB[i, j]
    return B


def run_infomax(B_initial, d, params: InfomaxParams = InfomaxParams()):
    """Iterate the natural gradient from ``B_initial`` over sub-band coefficients.

    ``d`` is a :class:`SubbandDecomposition` (its bands are concatenated in
    band order) or a plain ``(k, T)`` array. ``B_initial`` must be a square
    matrix acting on the channels of ``d``.

    Returns ``(B_final, InfomaxTrace)``.
    """
    data = d.concatenated() if isinstance(d, SubbandDecomposition) else np.asarray(d, dtype=np.float64)
    B = np.array(B_initial, dtype=np.float64)
    B, data = _check_square(B, data)
    if np.linalg.matrix_rank(B) < B.shape[0]:
        raise NumericalError("B_initial is not full rank", stage="infomax")
    data = np.ascontiguousarray(data)
    rng = np.random.Generator(np.random.PCG64(params.seed))
    trace = InfomaxTrace(cost=[entropy_cost(B, data)])
    T = data.shape[1]

    for _ in range(params.max_epochs):
        B_prev = B.copy()
        if params.mode == "batch":
            B = natural_gradient_step(B, data, params.mu)
        else:
            order = rng.permutation(T)
            B = _stochastic_epoch(B, data, order, params.mu)
        if not np.all(np.isfinite(B)):
            raise NumericalError("natural gradient diverged", stage="infomax")
        rel = float(np.linalg.norm(B - B_prev) / np.linalg.norm(B_prev))
        trace.rel_change.append(rel)
        trace.cost.append(entropy_cost(B, data))
        trace.epochs_run += 1
        if rel < params.conv_tol:
            trace.converged = True
            break
    return B, trace


def estimate_mutual_information(Y, bins: int = 32) -> np.ndarray:
    """Pairwise mutual information (nats) by histogram plug-in.

    Equal-width bins spanning each row's range. The diagonal is zero by
    convention. Rows of zero range have undefined MI; their entries are
    reported as 0 and a :class:`DegenerateChannelWarning` is emitted.
    """
    Y = signal_matrix(Y)
    n, T = Y.shape
    if T < 10 * bins:
        raise DimensionError(f"need T >= 10 * bins ({10 * bins}), got T={T}")
    lo, hi = Y.min(axis=1), Y.max(axis=1)
    degenerate = hi - lo <= 0
    if np.any(degenerate):
        warnings.warn(f"constant channels {np.flatnonzero(degenerate).tolist()}: MI reported as 0",
                      DegenerateChannelWarning, stacklevel=2)
    span = np.where(degenerate, 1.0, hi - lo)
    codes = np.minimum(((Y - lo[:, None]) / span[:, None] * bins).astype(np.int64), bins - 1)

    def entropy(counts):
        p = counts[counts > 0] / T
        return float(-np.sum(p * np.log(p)))

    H = [entropy(np.bincount(c, minlength=bins)) for c in codes]
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if degenerate[i] or degenerate[j]:
                continue
            joint = np.bincount(codes[i] * bins + codes[j], minlength=bins * bins)
            mi[i, j] = mi[j, i] = max(H[i] + H[j] - entropy(joint), 0.0)
    return mi
