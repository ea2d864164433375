"""Separation quality: performance index, SNR, source matching."""
from __future__ import annotations

import numpy as np

from .model import DimensionError, MixingModel, SourceMatching, signal_matrix


def global_matrix(B, A) -> np.ndarray:
    """``G = B A``; a scaled permutation when separation is perfect."""
    A = A.A if isinstance(A, MixingModel) else np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2 or A.ndim != 2 or B.shape[1] != A.shape[0]:
        raise DimensionError(f"B {B.shape} and A {A.shape} do not compose")
    G = B @ A
    if G.shape[0] != G.shape[1] or not np.all(np.isfinite(G)):
        raise DimensionError(f"global matrix must be square and finite, got {G.shape}")
    return G


def _row_term(absG: np.ndarray) -> float:
    peak = absG.max(axis=1)
    if np.any(peak == 0):
        raise ValueError("performance index undefined: a row of G is entirely zero")
    return float(np.sum(absG.sum(axis=1) / peak - 1.0))


def performance_index(G, variant: str = "amari") -> float:
    """Distance of ``G`` from a scaled permutation; 0 is perfect separation.

    ``variant="paper"`` uses rows only,
    ``1/(k(k-1)) sum_i (sum_j |G_ij| / max_l |G_il| - 1)``;
    ``variant="amari"`` averages the row and column terms with
    normalization ``1/(2k(k-1))``.
    """
    absG = np.abs(np.asarray(G, dtype=np.float64))
    if absG.ndim != 2 or absG.shape[0] != absG.shape[1]:
        raise DimensionError(f"G must be square, got shape {absG.shape}")
    k = absG.shape[0]
    if k < 2:
        raise DimensionError("performance index needs k >= 2")
    if variant == "paper":
        return _row_term(absG) / (k * (k - 1))
    if variant == "amari":
        return (_row_term(absG) + _row_term(absG.T)) / (2 * k * (k - 1))
    raise ValueError(f"unknown performance index variant {variant!r}")


def match_sources(Y, S) -> SourceMatching:
    """Greedily pair outputs with sources by largest ``|corr|``, without reuse.

    Ties go to the lowest (source, output) index pair.
    """
    Y = signal_matrix(Y, "outputs")
    S = signal_matrix(S, "sources")
    if Y.shape != S.shape:
        raise DimensionError(f"outputs {Y.shape} and sources {S.shape} differ in shape")
    Yc = Y - Y.mean(axis=1, keepdims=True)
    Sc = S - S.mean(axis=1, keepdims=True)
    ny, ns = np.linalg.norm(Yc, axis=1), np.linalg.norm(Sc, axis=1)
    if np.any(ny == 0) or np.any(ns == 0):
        raise ValueError("correlation undefined for a constant row")
    C = (Sc @ Yc.T) / np.outer(ns, ny)  # C[i, j] = corr(S_i, Y_j)

    n = len(S)
    perm, signs, corrs = [0] * n, [1] * n, [0.0] * n
    mag = np.abs(C)
    free_s, free_y = set(range(n)), set(range(n))
    for _ in range(n):
        best = max(((mag[i, j], -i, -j) for i in sorted(free_s) for j in sorted(free_y)))
        i, j = -best[1], -best[2]
        perm[i] = j
        signs[i] = 1 if C[i, j] >= 0 else -1
        corrs[i] = float(min(abs(C[i, j]), 1.0))
        free_s.discard(i)
        free_y.discard(j)
    return SourceMatching(tuple(perm), tuple(signs), tuple(corrs))


def apply_matching(Y, matching: SourceMatching) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    return np.asarray(matching.signs, dtype=np.float64)[:, None] * Y[list(matching.permutation)]


def snr_db(clean, noisy) -> np.ndarray:
    """Per-channel ``10 log10(var(clean) / var(noisy - clean))``; ``inf`` for zero noise."""
    clean = np.atleast_2d(np.asarray(clean, dtype=np.float64))
    noisy = np.atleast_2d(np.asarray(noisy, dtype=np.float64))
    if clean.shape != noisy.shape:
        raise DimensionError(f"shapes differ: {clean.shape} vs {noisy.shape}")
    ps = clean.var(axis=1)
    pn = (noisy - clean).var(axis=1)
    with np.errstate(divide="ignore"):
        return np.where(pn > 0, 10.0 * np.log10(ps / np.where(pn > 0, pn, 1.0)), np.inf)
