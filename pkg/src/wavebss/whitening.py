"""Centering, covariance, eigendecomposition and whitening of observations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DimensionError, NumericalError, signal_matrix

#: relative rank guard: retained eigenvalues must exceed this times the largest
EPS_EIG = 1e-12


@dataclass(frozen=True)
class WhiteningResult:
    """Whitening matrix ``W`` (k x n) and the decomposition it came from.

    ``V`` holds orthonormal eigenvectors in columns, ``C`` the eigenvalues in
    descending order, ``mean`` the channel means removed before whitening.
    """

    W: np.ndarray
    V: np.ndarray
    C: np.ndarray
    mean: np.ndarray

    @property
    def k(self) -> int:
        return self.W.shape[0]

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return self.W @ (X - self.mean[:, None])


def center(X):
    """Remove the per-row sample mean; returns ``(X0, mean)``."""
    X = signal_matrix(X)
    mean = X.mean(axis=1)
    return X - mean[:, None], mean


def covariance(X0) -> np.ndarray:
    """Zero-lag covariance ``X0 X0^T / T``, exactly symmetric."""
    X0 = np.asarray(X0, dtype=np.float64)
    T = X0.shape[1]
    if T == 0:
        raise DimensionError("covariance of an empty signal")
    R = X0 @ X0.T / T
    return 0.5 * (R + R.T)


def sym_eig(R):
    """Eigendecomposition ``R = V diag(C) V^T`` of a symmetric matrix.

    Eigenvalues are returned in descending order; each eigenvector column is
    signed so that its largest-magnitude entry is positive.
    """
    R = np.asarray(R, dtype=np.float64)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(R))))
    if np.max(np.abs(R - R.T)) > 1e-9 * scale:
        raise ValueError("matrix is not symmetric")
    C, V = np.linalg.eigh(0.5 * (R + R.T))
    order = np.argsort(C)[::-1]
    C, V = C[order], V[:, order]
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs, C


def whitening_matrix(V, C, k: Optional[int] = None) -> np.ndarray:
    """``W = diag(C[:k])^(-1/2) V[:, :k]^T``."""
    V = np.asarray(V, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    n = C.shape[0]
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise DimensionError(f"retained dimension k={k} must be in [1, {n}]")
    eps = EPS_EIG * max(float(C[0]), 0.0)
    if np.any(C[:k] <= eps) or C[0] <= 0:
        raise NumericalError(
            f"covariance is rank deficient at k={k} (eigenvalues {C[:k]})",
            stage="whitening")
    return V[:, :k].T / np.sqrt(C[:k])[:, None]


def whiten(X, k: Optional[int] = None):
    """Whiten ``X``; returns ``(Z, WhiteningResult)`` with ``cov(Z) = I_k``."""
    X0, mean = center(X)
    V, C = sym_eig(covariance(X0))
    W = whitening_matrix(V, C, k)
    return W @ X0, WhiteningResult(W=W, V=V, C=C, mean=mean)
