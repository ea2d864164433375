"""Blind separation of image mixtures: sub-band joint diagonalization
followed by natural-gradient Infomax refinement."""

__version__ = "0.1.0"

from .model import (BSSError, DimensionError, ImagePlane, MixingModel, NumericalError,
                    SeparationResult, SourceMatching, images_to_signals, mix,
                    signals_to_images)
from .whitening import WhiteningResult, center, covariance, sym_eig, whiten, whitening_matrix
from .wavelet import (SubbandDecomposition, WaveletSpec, subband_components,
                      wavelet_packet_forward, wavelet_packet_inverse)
from .jad import (CovarianceSet, JadResult, initial_separation, joint_diagonalize,
                  off_criterion, subband_covariances)
from .infomax import (InfomaxParams, InfomaxTrace, entropy_cost, estimate_mutual_information,
                      gradient, natural_gradient_step, run_infomax, score)
from .metrics import global_matrix, match_sources, performance_index, snr_db
from .corruption import NoiseSpec, add_gaussian_noise, add_salt_pepper
from .pipeline import PipelineConfig, separate
