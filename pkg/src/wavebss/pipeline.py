"""The two-stage separation pipeline.

1. whiten the centered mixtures,
2. wavelet-packet transform the whitened signals,
3. jointly diagonalize the sub-band covariances,
4. form ``B_initial = Q^T W``,
5. refine with the natural gradient on the sub-band coefficients.
"""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .infomax import InfomaxParams, run_infomax
from .jad import initial_separation, joint_diagonalize, subband_covariances
from .metrics import global_matrix, match_sources, performance_index
from .model import BSSError, NumericalError, SeparationResult, signal_matrix
from .whitening import covariance, whiten
from .wavelet import WaveletSpec, wavelet_packet_forward


@dataclass(frozen=True)
class PipelineConfig:
    wavelet: WaveletSpec = WaveletSpec()
    infomax: InfomaxParams = InfomaxParams()
    k: Optional[int] = None
    jad_tol: float = 1e-8
    jad_max_sweeps: int = 100
    skip_first_band: bool = False
    # run the natural gradient on space-domain whitened data instead of sub-band coefficients
    space_domain_refinement: bool = False
    pi_variant: str = "amari"


@contextmanager
def _stage(name: str, timing: dict):
    t0 = time.perf_counter()
    try:
        yield
    except BSSError as exc:
        if isinstance(exc, NumericalError) and not exc.stage:
            exc.stage = name
        raise
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        raise NumericalError(f"{name}: {exc}", stage=name) from exc
    finally:
        timing[name] = time.perf_counter() - t0


def separate(X, config: PipelineConfig = PipelineConfig(), A=None, S=None) -> SeparationResult:
    """Run the full pipeline on mixtures ``X`` (n x T).

    ``A`` (true mixing matrix) enables the performance indices and ``S``
    (true sources) enables source matching; both are optional.
    """
    X = signal_matrix(X, "mixtures")
    timing: dict = {}
    diag: dict = {"timing": timing}

    with _stage("whitening", timing):
        Z, wres = whiten(X, config.k)
        diag["whitening"] = {
            "eigenvalues": wres.C.tolist(),
            "whiteness_residual": float(np.max(np.abs(covariance(Z) - np.eye(wres.k)))),
        }
    with _stage("wavelet", timing):
        d = wavelet_packet_forward(Z, config.wavelet)
    with _stage("jad", timing):
        cov_set = subband_covariances(d, skip_first=config.skip_first_band)
        jres = joint_diagonalize(cov_set, tol=config.jad_tol, max_sweeps=config.jad_max_sweeps)
        B_initial = initial_separation(jres.Q, wres.W)
        diag["jad"] = {"off_final": jres.off_final, "sweeps": jres.sweeps,
                       "converged": jres.converged, "bands": list(cov_set.band_ids)}
    with _stage("infomax", timing):
        data = Z if config.space_domain_refinement else d
        # the rotation acts on whitened channels; W is re-applied afterwards
        R, trace = run_infomax(jres.Q.T, data, config.infomax)
        B_final = R @ wres.W
        diag["infomax"] = trace.summary()
        diag["infomax_trace"] = trace
    Y = B_final @ (X - wres.mean[:, None])

    pi_initial = pi_final = None
    matching = None
    if A is not None:
        pi_initial = performance_index(global_matrix(B_initial, A), config.pi_variant)
        pi_final = performance_index(global_matrix(B_final, A), config.pi_variant)
    if S is not None:
        matching = match_sources(Y, S)
    return SeparationResult(B_initial=B_initial, B_final=B_final, Y=Y,
                            pi_initial=pi_initial, pi_final=pi_final,
                            matching=matching, diagnostics=diag)
