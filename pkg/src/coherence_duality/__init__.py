"""Coherence versus path information for two-photon polarisation states.

Build the three families of partially entangled states, compute the
normalised l1 coherence C of the path (target) photon and the minimum-error
path information P of the detector photon, and emulate the tomography
pipeline that measures them.
"""
from .discrimination import (DetectorEnsemble, DualityPoint, PovmSet, duality_point,
                             extract_ensemble, helstrom_povm, helstrom_success,
                             optimize_povm, povm_success)
from .measures import (CoherenceReport, concurrence, fidelity, l1_coherence, path_coherence,
                       purity, visibility)
from .qmath import hermitian_eig, partial_trace, tensor_product, trace_norm
from .state_prep import (LossChannel, PreparedState, SourceSpec, StateClass, apply_loss,
                         build_path_detector_state, fresnel_transmission, hwp_unitary, prepare,
                         singlet, state_class)

__version__ = "0.1.0"
