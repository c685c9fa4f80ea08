"""Path information from minimum-error discrimination of the detector states."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .measures import as_density, path_coherence
from .state_prep import PreparedState

PSD_FLOOR = -1e-10
COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True)
class DetectorEnsemble:
    """Priors p_i and conditional detector states rho_i.

    ``empty`` flags branches with zero prior, whose state is set to I/d.
    """
    priors: np.ndarray
    states: list
    empty: tuple = ()

    def __post_init__(self):
        priors = np.asarray(self.priors, dtype=float)
        if np.any(priors < -1e-15) or abs(priors.sum() - 1) > 1e-10:
            raise ValueError("priors must be nonnegative and sum to 1")
        if len(self.states) != len(priors):
            raise ValueError("need one state per prior")
        object.__setattr__(self, "priors", np.clip(priors, 0, None))
        if not self.empty:
            object.__setattr__(self, "empty", (False,) * len(priors))

    @property
    def n(self):
        return len(self.priors)

    @property
    def dim(self):
        return self.states[0].shape[0]

    def weighted(self):
        return [p * rho for p, rho in zip(self.priors, self.states)]


@dataclass(frozen=True)
class PovmSet:
    elements: list
    converged: bool = True
    iterations: int = 0

    def validate(self, psd_floor=PSD_FLOOR, tol=COMPLETENESS_TOL):
        dim = self.elements[0].shape[0]
        for e in self.elements:
            if not qmath.is_hermitian(e) or np.linalg.eigvalsh(e).min() < psd_floor:
                raise ValueError("POVM element is not positive semidefinite")
        if np.abs(sum(self.elements) - np.eye(dim)).max() > tol:
            raise ValueError("POVM elements do not sum to the identity")
        return self


@dataclass(frozen=True)
class DualityPoint:
    zeta: float
    coherence: float
    path_info: float
    p_success: float
    sum_of_squares: float
    n_paths: int = 2
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def bound(self):
        return (1 - 1 / self.n_paths) ** 2


def extract_ensemble(state, n_paths=2, detector_dim=None):
    """Split a target ⊗ detector state into priors and conditional detector states."""
    rho = as_density(state)
    dim = rho.shape[0]
    detector_dim = dim // n_paths if detector_dim is None else detector_dim
    if n_paths * detector_dim != dim:
        raise ValueError(f"state dimension {dim} != {n_paths} x {detector_dim}")
    blocks = rho.reshape(n_paths, detector_dim, n_paths, detector_dim)
    priors, states, empty = [], [], []
    for i in range(n_paths):
        block = blocks[i, :, i, :]
        p = float(np.trace(block).real)
        if p <= 1e-15:
            priors.append(0.0)
            states.append(np.eye(detector_dim, dtype=complex) / detector_dim)
            empty.append(True)
        else:
            priors.append(p)
            block = block / p
            states.append((block + qmath.dag(block)) / 2)
            empty.append(False)
    priors = np.array(priors)
    return DetectorEnsemble(priors / priors.sum(), states, tuple(empty))


def _require_two(ensemble):
    if ensemble.n != 2:
        raise ValueError(f"Helstrom formulas need exactly two hypotheses, got {ensemble.n}")


def helstrom_success(ensemble):
    """Optimal two-state success probability (1 + ||p1 rho1 - p2 rho2||_1) / 2."""
    _require_two(ensemble)
    w1, w2 = ensemble.weighted()
    return 0.5 * (1 + qmath.trace_norm(w1 - w2))


def helstrom_success_pure(p1, p2, overlap):
    """Closed form for pure states with |<eta1|eta2>| = ``overlap``."""
    return 0.5 * (1 + np.sqrt(max(0.0, 1 - 4 * p1 * p2 * abs(overlap) ** 2)))


def helstrom_povm(ensemble):
    """Projector onto the nonnegative eigenspace of p1 rho1 - p2 rho2, and its complement.

    Zero eigenvalues go to the first element.
    """
    _require_two(ensemble)
    w1, w2 = ensemble.weighted()
    evals, evecs = qmath.hermitian_eig(w1 - w2)
    keep = evals >= -1e-14
    pi1 = evecs[:, keep] @ qmath.dag(evecs[:, keep])
    pi2 = np.eye(ensemble.dim, dtype=complex) - pi1
    return PovmSet([pi1, pi2])


def povm_success(ensemble, povm):
    """Average probability sum_i p_i Tr(Pi_i rho_i) of a correct guess."""
    if len(povm.elements) != ensemble.n:
        raise ValueError("POVM must have one element per hypothesis")
    povm.validate()
    ps = sum(np.trace(e @ w).real for e, w in zip(povm.elements, ensemble.weighted()))
    return float(np.clip(ps, 0.0, 1.0))


def pretty_good_measurement(ensemble):
    weighted = ensemble.weighted()
    g = qmath.pinv_sqrtm_psd(sum(weighted))
    return _complete([g @ w @ g for w in weighted])


def _complete(elements):
    # the fixed-point map only acts on the support of the averaged state;
    # the orthogonal complement is handed to the first outcome
    dim = elements[0].shape[0]
    elements = [(e + qmath.dag(e)) / 2 for e in elements]
    elements[0] = elements[0] + np.eye(dim) - sum(elements)
    return elements


def optimize_povm(ensemble, max_iters=10_000, tol=1e-10):
    """Minimum-error POVM for any number of hypotheses.

    Starts from the pretty-good measurement and iterates the fixed-point map
    ``Pi_i <- G^-1/2 (p_i rho_i Pi_i p_i rho_i) G^-1/2`` with
    ``G = sum_j p_j rho_j Pi_j p_j rho_j``, whose fixed points satisfy the
    optimality conditions. Stops once the success probability changes by
    less than ``tol``.

    Returns
    -------
    povm : PovmSet
        Best POVM found; ``converged`` is False if ``max_iters`` was hit.
    p_success : float
    """
    weighted = ensemble.weighted()
    elements = pretty_good_measurement(ensemble)

    def success(els):
        return sum(np.trace(e @ w).real for e, w in zip(els, weighted))

    best, best_ps = elements, success(elements)
    ps_old = best_ps
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        g = qmath.pinv_sqrtm_psd(sum(w @ e @ w for e, w in zip(elements, weighted)))
        elements = _complete([g @ w @ e @ w @ g for e, w in zip(elements, weighted)])
        ps = success(elements)
        if ps > best_ps:
            best, best_ps = elements, ps
        if abs(ps - ps_old) < tol:
            converged = True
            break
        ps_old = ps
    return PovmSet(best, converged, it), float(min(best_ps, 1.0))


def optimal_success(ensemble):
    if ensemble.n == 2:
        return helstrom_success(ensemble)
    return optimize_povm(ensemble)[1]


def duality_point(state, n_paths=2, zeta=None):
    """Coherence C, path information P = P_s - 1/N and C^2 + P^2 for one state.

    Raises if the duality bound (1 - 1/N)^2 is exceeded.
    """
    if isinstance(state, PreparedState) and zeta is None:
        zeta = state.zeta
    rho = as_density(state)
    coherence = path_coherence(rho, n_paths).c_normalized
    ensemble = extract_ensemble(rho, n_paths)
    if zeta is None:
        zeta = float(np.sqrt(ensemble.priors[0] / ensemble.priors[1])) if (
            n_paths == 2 and ensemble.priors[1] > 0) else (np.inf if n_paths == 2 else np.nan)
    ps = optimal_success(ensemble)
    p = ps - 1 / n_paths
    total = coherence ** 2 + p ** 2
    bound = (1 - 1 / n_paths) ** 2
    if total > bound + 1e-9:
        raise ArithmeticError(f"duality bound violated: C^2+P^2={total!r} > {bound!r}")
    return DualityPoint(float(zeta), coherence, float(p), float(ps), float(total), n_paths)
