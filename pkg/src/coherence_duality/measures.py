"""Coherence, entanglement and state-quality figures of merit."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .state_prep import PreparedState

_YY = qmath.tensor_product(qmath.SY, qmath.SY)


@dataclass(frozen=True)
class CoherenceReport:
    c_l1: float
    c_normalized: float
    n_paths: int


def as_density(state):
    """Accept a PreparedState, a ket or a density matrix and return a density matrix."""
    if isinstance(state, PreparedState):
        return state.state
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return qmath.density_from_ket(state)
    return state


def l1_coherence(rho):
    """Sum of the moduli of all off-diagonal entries."""
    rho = np.asarray(rho)
    return float(np.abs(rho).sum() - np.abs(np.diag(rho)).sum())


def target_state(state, n_paths=2):
    rho = as_density(state)
    dim = rho.shape[0]
    if dim % n_paths:
        raise ValueError(f"dimension {dim} is not divisible by {n_paths} paths")
    return qmath.partial_trace(rho, (n_paths, dim // n_paths), keep="A")


def path_coherence(state, n_paths=2):
    """Normalised coherence C = C_l1(rho_target) / N of the path qubit."""
    c = l1_coherence(target_state(state, n_paths))
    return CoherenceReport(c, c / n_paths, n_paths)


def concurrence(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for two-qubit states")
    # lambda_i are the singular values of sqrt(rho) sqrt(rho~); taking them
    # directly avoids square roots of round-off eigenvalues for pure states
    s = qmath.sqrtm_psd(rho)
    lam = np.linalg.svd(s @ _YY @ s.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def purity(rho):
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


_BASES = {
    "HV": (qmath.H, qmath.V),
    "DA": (qmath.D, qmath.A),
    "RL": (qmath.R, qmath.L),
}


def visibility(rho, basis="HV"):
    """Two-photon polarisation visibility in the given basis.

    Photon 1 is projected onto the first basis state while photon 2's
    analyser takes both basis states; the visibility is (max-min)/(max+min)
    of the two coincidence probabilities.
    """
    rho = np.asarray(rho, dtype=complex)
    first, second = _BASES[basis]
    probs = [np.real(np.trace(rho @ qmath.projector(qmath.tensor_product(first, x))))
             for x in (first, second)]
    total = max(probs) + min(probs)
    if total <= 0:
        return 0.0
    return float((max(probs) - min(probs)) / total)


def fidelity(a, b):
    """Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))**2."""
    sa = qmath.sqrtm_psd(np.asarray(a, dtype=complex))
    sb = qmath.sqrtm_psd(np.asarray(b, dtype=complex))
    return float(min(1.0, np.linalg.svd(sa @ sb, compute_uv=False).sum() ** 2))
