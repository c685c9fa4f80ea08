"""Simulated two-photon polarisation tomography.

Counts are drawn from Poisson distributions over 36 product projectors
(the six eigenstates H, V, D, A, R, L on each photon), reconstructed with a
diluted RρR maximum-likelihood iteration, and resampled to obtain Monte
Carlo error bars on C and P.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .discrimination import extract_ensemble, helstrom_success
from .measures import path_coherence

_SINGLE = {"H": qmath.H, "V": qmath.V, "D": qmath.D, "A": qmath.A, "R": qmath.R, "L": qmath.L}

DEFAULT_EXPOSURE = 1e5
MLE_TOL = 1e-10
MLE_MAX_ITERS = 5000


@dataclass(frozen=True)
class MeasurementSetting:
    projector: np.ndarray
    label: str


@dataclass(frozen=True)
class CountsRecord:
    """Coincidence counts per setting.

    ``counts`` are integers for simulated data; exact mode stores the
    expected (real-valued) counts ``exposure * probability`` instead.
    """
    labels: tuple
    counts: np.ndarray
    exposure: float

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        if counts.shape != (len(self.labels),):
            raise ValueError("one count per setting label is required")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", np.asarray(self.counts))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["setting_label", "count", "exposure"])
            for label, n in zip(self.labels, self.counts):
                writer.writerow([label, _fmt(n), repr(float(self.exposure))])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{path}: no counts")
        counts = np.array([float(r["count"]) for r in rows])
        if np.all(counts == np.round(counts)):
            counts = counts.astype(np.int64)
        exposures = {float(r["exposure"]) for r in rows}
        if len(exposures) != 1:
            raise ValueError(f"{path}: mixed exposures are not supported")
        return cls(tuple(r["setting_label"] for r in rows), counts, exposures.pop())


def _fmt(n):
    return str(int(n)) if float(n).is_integer() else repr(float(n))


@dataclass(frozen=True)
class MleResult:
    state: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    history: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True)
class UncertaintyReport:
    c_mean: float
    c_std: float
    p_mean: float
    p_std: float
    rounds: int
    failed_rounds: int = 0
    unconverged_rounds: int = 0
    s_mean: float = float("nan")
    s_std: float = float("nan")


def make_rng(seed, *stream):
    """Counter-based (Philox) generator for ``seed`` and an optional stream index.

    Distinct stream indices give independent generators, so Monte Carlo
    rounds can be evaluated in any order.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def standard_settings():
    """The 36 product projectors drawn from {H,V,D,A,R,L} on each photon."""
    out = []
    for a, b in itertools.product("HVDARL", repeat=2):
        psi = qmath.tensor_product(_SINGLE[a], _SINGLE[b])
        out.append(MeasurementSetting(qmath.projector(psi), a + b))
    return out


def settings_by_label(labels):
    table = {s.label: s for s in standard_settings()}
    try:
        return [table[label] for label in labels]
    except KeyError as err:
        raise ValueError(f"unknown setting label {err.args[0]!r}") from None


def _stack(settings):
    return np.stack([s.projector for s in settings])


def born_probability(rho, setting):
    return float(np.clip(np.real(np.trace(setting.projector @ rho)), 0.0, 1.0))


def born_probabilities(rho, settings):
    return np.clip(np.einsum("kij,ji->k", _stack(settings), rho).real, 0.0, 1.0)


def simulate_counts(rho, settings, exposure=DEFAULT_EXPOSURE, seed=0):
    """Poisson counts with mean ``exposure * Tr(Pi rho)`` per setting."""
    if exposure <= 0:
        raise ValueError("exposure must be positive")
    rng = make_rng(seed)
    counts = rng.poisson(exposure * born_probabilities(rho, settings))
    return CountsRecord(tuple(s.label for s in settings), counts, float(exposure))


def exact_counts(rho, settings, exposure=DEFAULT_EXPOSURE):
    """Noise-free expected counts, for separating algorithmic from statistical error."""
    return CountsRecord(tuple(s.label for s in settings),
                        exposure * born_probabilities(rho, settings), float(exposure))


def _hermitian_basis(dim=4):
    paulis = [qmath.I2, qmath.SX, qmath.SY, qmath.SZ]
    return np.stack([qmath.tensor_product(a, b) for a, b in itertools.product(paulis, repeat=2)])


def linear_inversion(freqs, projectors):
    """Least-squares state estimate from normalised frequencies (batched, may be unphysical)."""
    basis = _hermitian_basis()
    design = np.einsum("kij,mji->km", projectors, basis).real / 4
    coef = np.linalg.lstsq(design, np.atleast_2d(freqs).T, rcond=None)[0].T
    rho = np.einsum("bm,mij->bij", coef, basis) / 4
    return rho / np.trace(rho, axis1=1, axis2=2)[:, None, None]


def _project_physical(rho, mix=1e-9):
    # clipped estimates are rank deficient, and RρR cannot leave a support;
    # mix in a little white noise wherever clipping removed real weight
    evals, evecs = np.linalg.eigh((rho + qmath.dag(rho)) / 2)
    clipped = (evals < -1e-12).any(axis=1)
    evals = np.clip(evals, 0, None)
    evals = evals / evals.sum(axis=1, keepdims=True)
    evals = np.where(clipped[:, None], (1 - mix) * evals + mix / rho.shape[-1], evals)
    return np.einsum("bij,bj,bkj->bik", evecs, evals, evecs.conj())


def _loglik(counts, probs):
    safe = np.where(counts > 0, probs, 1.0)
    return (counts * np.log(np.maximum(safe, 1e-300))).sum(axis=-1) / counts.sum(axis=-1)


def mle_batch(counts, projectors, tol=MLE_TOL, max_iters=MLE_MAX_ITERS, record=False):
    """Diluted RρR reconstruction of several count vectors at once.

    Parameters
    ----------
    counts : (B, K) array
    projectors : (K, d, d) array
        Must resolve a multiple of the identity (true for complete bases).

    The log-likelihood is normalised by the total count, so ``tol`` is a
    per-event gain. Each accepted step never lowers the likelihood: a step
    that would is rejected and its dilution factor halved.
    """
    counts = np.atleast_2d(np.asarray(counts, dtype=float))
    nb, _ = counts.shape
    dim = projectors.shape[-1]
    if np.any(counts.sum(axis=1) <= 0):
        raise ValueError("cannot reconstruct from zero total counts")
    if np.abs(projectors.sum(axis=0) - np.trace(projectors.sum(axis=0)).real / dim * np.eye(dim)).max() > 1e-9:
        raise ValueError("settings must resolve a multiple of the identity")
    scale = projectors.sum(axis=0)[0, 0].real
    freqs = counts / counts.sum(axis=1, keepdims=True) * scale

    rho = _project_physical(linear_inversion(freqs, projectors))
    probs = np.einsum("kij,bji->bk", projectors, rho).real
    ll = _loglik(counts, probs)
    eps = np.full(nb, 1e3)
    active = np.ones(nb, dtype=bool)
    iters = np.zeros(nb, dtype=int)
    eye = np.eye(dim)
    history = [ll.copy()] if record else None

    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        p = np.maximum(probs[idx], 1e-300)
        r = np.einsum("bk,kij->bij", counts[idx] / p, projectors) / counts[idx].sum(axis=1)[:, None, None]
        step = eye + eps[idx, None, None] * r
        new = step @ rho[idx] @ qmath.dag(step)
        new = new / np.trace(new, axis1=1, axis2=2).real[:, None, None]
        new = (new + qmath.dag(new)) / 2
        new_probs = np.einsum("kij,bji->bk", projectors, new).real
        new_ll = _loglik(counts[idx], new_probs)
        gain = new_ll - ll[idx]
        ok = gain >= 0
        acc = idx[ok]
        rho[acc], probs[acc], ll[acc] = new[ok], new_probs[ok], new_ll[ok]
        iters[idx] += 1
        eps[idx[~ok]] /= 2
        eps[acc] = np.minimum(eps[acc] * 2, 1e3)
        done = ok & (gain < tol)
        active[idx[done]] = False
        # dilution collapsed: no uphill step exists any more
        active[idx[~ok & (eps[idx] < 1e-12)]] = False
        if record:
            history.append(ll.copy())
    converged = ~active
    out_hist = np.array(history) if record else None
    return rho, ll, iters, converged, out_hist


def mle_reconstruct(counts, settings=None, tol=MLE_TOL, max_iters=MLE_MAX_ITERS):
    """Maximum-likelihood density matrix for one :class:`CountsRecord`."""
    settings = settings_by_label(counts.labels) if settings is None else settings
    projectors = _stack(settings)
    if np.linalg.matrix_rank(projectors.reshape(len(settings), -1)) < 16:
        raise ValueError("settings are not informationally complete")
    rho, ll, iters, conv, hist = mle_batch(counts.counts[None, :], projectors, tol, max_iters, record=True)
    return MleResult(rho[0], float(ll[0]), int(iters[0]), bool(conv[0]), hist[:, 0])


def coherence_and_path(rho):
    """(C, P) of a two-qubit target ⊗ detector state."""
    c = path_coherence(rho, 2).c_normalized
    p = helstrom_success(extract_ensemble(rho, 2)) - 0.5
    return c, p


def monte_carlo_uncertainty(counts, settings=None, rounds=1000, seed=0,
                            tol=MLE_TOL, max_iters=MLE_MAX_ITERS):
    """Resample every count as Poisson(observed), reconstruct, and collect C and P.

    Round ``r`` uses the generator ``make_rng(seed, r)``.
    """
    if rounds < 2:
        raise ValueError("need at least two Monte Carlo rounds")
    settings = settings_by_label(counts.labels) if settings is None else settings
    projectors = _stack(settings)
    observed = np.asarray(counts.counts, dtype=float)
    samples = np.stack([make_rng(seed, r).poisson(observed) for r in range(rounds)])
    good = samples.sum(axis=1) > 0
    cs, ps = [], []
    unconverged = 0
    failed = int((~good).sum())
    if good.any():
        rhos, _, _, conv, _ = mle_batch(samples[good], projectors, tol, max_iters)
        unconverged = int((~conv).sum())
        for rho in rhos:
            if not np.all(np.isfinite(rho)):
                failed += 1
                continue
            c, p = coherence_and_path(rho)
            cs.append(c)
            ps.append(p)
    if failed > 0.01 * rounds:
        raise RuntimeError(f"{failed} of {rounds} Monte Carlo reconstructions failed")
    cs, ps = np.array(cs), np.array(ps)
    ss = cs ** 2 + ps ** 2
    return UncertaintyReport(float(cs.mean()), float(cs.std(ddof=1)), float(ps.mean()),
                             float(ps.std(ddof=1)), rounds, failed, unconverged,
                             float(ss.mean()), float(ss.std(ddof=1)))


# -- direct measurement of the discrimination POVM -------------------------

def povm_projectors(detector_povm, n_paths=2):
    """Joint outcomes |i><i| ⊗ Pi_j; outcome (i, i) is a correct identification."""
    basis = np.eye(n_paths, dtype=complex)
    return np.stack([qmath.tensor_product(qmath.projector(basis[i]), e)
                     for i in range(n_paths) for e in detector_povm.elements])


def simulate_povm_counts(rho, detector_povm, exposure=DEFAULT_EXPOSURE, seed=0, exact=False):
    """Counts of the N*N joint outcomes (target path, POVM outcome), row-major."""
    n = len(detector_povm.elements)
    probs = np.clip(np.einsum("kij,ji->k", povm_projectors(detector_povm, n), rho).real, 0, None)
    if exact:
        return exposure * probs
    return make_rng(seed).poisson(exposure * probs)


def p_success_from_counts(counts):
    """Fraction of events where the POVM outcome names the true path."""
    counts = np.asarray(counts, dtype=float)
    n = int(round(np.sqrt(counts.shape[-1])))
    grid = counts.reshape(counts.shape[:-1] + (n, n))
    return np.trace(grid, axis1=-2, axis2=-1) / counts.sum(axis=-1)


def p_success_propagated_error(counts):
    """Standard error of the success fraction for independent Poisson counts."""
    counts = np.asarray(counts, dtype=float)
    n = int(round(np.sqrt(counts.size)))
    hit = np.trace(counts.reshape(n, n))
    miss = counts.sum() - hit
    total = hit + miss
    return float(np.sqrt(hit * miss / total ** 3)) if total > 0 else float("nan")


def povm_monte_carlo(counts, rounds=1000, seed=0):
    """Mean and std of the success fraction over Poisson resamplings of ``counts``."""
    if rounds < 2:
        raise ValueError("need at least two Monte Carlo rounds")
    observed = np.asarray(counts, dtype=float)
    samples = np.stack([make_rng(seed, r).poisson(observed) for r in range(rounds)])
    samples = samples[samples.sum(axis=1) > 0]
    ps = p_success_from_counts(samples)
    return float(ps.mean()), float(ps.std(ddof=1))
