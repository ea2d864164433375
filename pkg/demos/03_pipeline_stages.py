"""Walk through the pipeline one stage at a time.

Each stage of ``wavebss.separate`` is called by hand here so the
intermediate quantities can be inspected: the whitened covariance, the
sub-band covariances before and after the joint diagonalizer, and the
Infomax cost trace.
"""
import numpy as np

from wavebss import (InfomaxParams, WaveletSpec, images_to_signals, initial_separation,
                     joint_diagonalize, mix, performance_index, run_infomax,
                     subband_covariances, wavelet_packet_forward, whiten)
from wavebss.textures import texture_pair

S = images_to_signals(texture_pair(128, seed=0))
A = np.array([[1.0, 0.4], [0.4, 1.0]])
X = mix(S, A)

# 1. whitening: unit covariance, so what is left to find is a rotation
Z, wres = whiten(X)
print("eigenvalues of cov(X):", np.round(wres.C, 4))
print("max |cov(Z) - I|:", np.abs(Z @ Z.T / Z.shape[1] - np.eye(2)).max())

# 2. wavelet packets at depth 2 give four sub-bands of length T/4
d = wavelet_packet_forward(Z, WaveletSpec("db4", 2))
print("band shapes:", [b.shape for b in d.bands])

# 3. one covariance per band; the sources differ in how their energy is spread
cs = subband_covariances(d)
for i, M in enumerate(cs.mats):
    print(f"band {i} covariance:\n{np.round(M, 4)}")

# 4. one rotation that makes every band covariance as diagonal as possible
jad = joint_diagonalize(cs.mats)
print(f"off-diagonal energy {jad.off_history[0]:.3e} -> {jad.off_final:.3e} in {jad.sweeps} sweeps")
B0 = initial_separation(jad.Q, wres.W)
print("PI after the diagonalizer:", round(performance_index(B0 @ A), 4))

# 5. Infomax refines the rotation on the same sub-band coefficients
R, trace = run_infomax(jad.Q.T, d, InfomaxParams(seed=1))
B = R @ wres.W
print(f"Infomax cost {trace.cost[0]:.5f} -> {trace.cost[-1]:.5f} over {trace.epochs_run} epochs")
print("PI after Infomax:", round(performance_index(B @ A), 4))
