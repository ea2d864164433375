"""Joint approximate diagonalization of sub-band covariances by Givens sweeps."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import DimensionError, separation_matrix
from .wavelet import SubbandDecomposition


@dataclass(frozen=True)
class CovarianceSet:
    mats: tuple
    band_ids: tuple

    def __post_init__(self):
        if len(self.mats) < 1:
            raise ValueError("covariance set must contain at least one matrix")
        mats = tuple(np.array(M, dtype=np.float64) for M in self.mats)
        k = mats[0].shape
        for M in mats:
            if M.ndim != 2 or M.shape != k or k[0] != k[1]:
                raise DimensionError("covariance matrices must be square and equal-sized")
            if np.max(np.abs(M - M.T)) > 1e-9:
                raise ValueError("covariance matrices must be symmetric")
        object.__setattr__(self, "mats", mats)
        if len(self.band_ids) != len(mats):
            raise ValueError("band_ids length must match the number of matrices")

    @classmethod
    def of(cls, mats: Sequence) -> "CovarianceSet":
        return cls(tuple(mats), tuple(range(len(mats))))

    @property
    def k(self) -> int:
        return self.mats[0].shape[0]


@dataclass(frozen=True)
class JadResult:
    Q: np.ndarray
    off_final: float
    sweeps: int
    converged: bool
    off_history: tuple = ()


def subband_covariances(d: SubbandDecomposition, skip_first: bool = False) -> CovarianceSet:
    """One zero-lag covariance per band. ``skip_first`` drops band 0."""
    mats, ids = [], []
    for i, band in enumerate(d.bands):
        if skip_first and i == 0:
            continue
        Ti = band.shape[1]
        if Ti < 1:
            raise DimensionError(f"band {i} is empty")
        R = band @ band.T / Ti
        mats.append(0.5 * (R + R.T))
        ids.append(i)
    return CovarianceSet(tuple(mats), tuple(ids))


def _as_set(mats) -> CovarianceSet:
    return mats if isinstance(mats, CovarianceSet) else CovarianceSet.of(mats)


def off_criterion(mats, Q) -> float:
    """Sum of squared off-diagonal entries of ``Q^T M Q`` over the set."""
    mats = _as_set(mats)
    Q = np.asarray(Q, dtype=np.float64)
    total = 0.0
    for M in mats.mats:
        D = Q.T @ M @ Q
        total += float(np.sum(D ** 2) - np.sum(np.diag(D) ** 2))
    return total


def joint_diagonalize(mats, tol: float = 1e-8, max_sweeps: int = 100,
                      Q0: Optional[np.ndarray] = None) -> JadResult:
    """Find orthogonal ``Q`` making every ``Q^T M_k Q`` as diagonal as possible.

    Cyclic sweeps over index pairs ``(p, q)``; each rotation angle is the
    closed-form optimum for that pair, taken from the principal eigenvector
    of ``G = sum_k h_k h_k^T`` with ``h_k = (M_k[p,p] - M_k[q,q], 2 M_k[p,q])``.
    """
    mats = _as_set(mats)
    k = mats.k
    if k < 2:
        raise DimensionError("joint diagonalization needs k >= 2")
    A = np.stack(mats.mats)  # (m, k, k), rotated in place
    Q = np.eye(k) if Q0 is None else np.array(Q0, dtype=np.float64)
    if Q0 is not None:
        A = np.einsum("ji,mjl,lk->mik", Q, A, Q)

    history = [off_criterion(mats, Q)]
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        rotated = False
        for p in range(k - 1):
            for q in range(p + 1, k):
                h = np.stack([A[:, p, p] - A[:, q, q], A[:, p, q] + A[:, q, p]])
                G = h @ h.T
                ton = G[0, 0] - G[1, 1]
                toff = G[0, 1] + G[1, 0]
                r = np.hypot(ton, toff)
                if r <= 1e-14 * (G[0, 0] + G[1, 1]) or r == 0.0:
                    continue  # equal eigenvalues of G: angle indeterminate
                theta = 0.5 * np.arctan2(toff, ton + r)
                c, s = np.cos(theta), np.sin(theta)
                if abs(s) < tol:
                    continue
                rotated = True
                R = np.array([[c, -s], [s, c]])
                pq = [p, q]
                Q[:, pq] = Q[:, pq] @ R
                A[:, pq, :] = np.einsum("ji,mjl->mil", R, A[:, pq, :])
                A[:, :, pq] = A[:, :, pq] @ R
        history.append(off_criterion(mats, Q))
        if not rotated:
            converged = True
            break
    return JadResult(Q=Q, off_final=history[-1], sweeps=sweeps,
                     converged=converged, off_history=tuple(history))


def initial_separation(Q, W) -> np.ndarray:
    """``B_initial = Q^T W``."""
    Q = np.asarray(Q, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    if Q.shape[0] != Q.shape[1] or Q.shape[0] != W.shape[0]:
        raise DimensionError(f"Q {Q.shape} and W {W.shape} do not compose")
    return separation_matrix(Q.T @ W, "B_initial")
