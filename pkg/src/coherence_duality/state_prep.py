"""Preparation of the two-photon polarisation states.

The source emits a (possibly noisy) singlet. A half-wave plate rotates the
target photon, then a stack of Brewster windows (or a PBS) filters the
detector photon with polarisation-dependent loss. Postselecting on both
photons surviving gives the prepared target ⊗ detector state.

Transmissions quoted for a window (e.g. 99.7 % / 71.9 %) are intensity
transmissions; the amplitude factor applied per window is their square root.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath

# measured intensity transmission of one fused-silica window at 60 degrees
EPS_H = 0.997
EPS_V = 0.719
FUSED_SILICA_INDEX = 1.4585  # at 810 nm

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class SourceSpec:
    """Imperfect singlet source.

    ``noise_weight`` is the white-noise admixture ``w`` in
    ``(1 - w)|psi-><psi-| + w I/4``. The two visibilities are descriptive
    only (they are what a characterisation would report) and are not used
    to build the state.
    """
    visibility_hv: float = 1.0
    visibility_da: float = 1.0
    noise_weight: float = 0.0

    def __post_init__(self):
        for name in ("visibility_hv", "visibility_da", "noise_weight"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class LossChannel:
    """Polarisation-dependent loss, ``t_h``/``t_v`` are amplitude factors per pass."""
    t_h: float
    t_v: float
    passes: int

    def __post_init__(self):
        if not 0.0 <= self.t_v <= self.t_h <= 1.0:
            raise ValueError(f"need 0 <= t_v <= t_h <= 1, got t_h={self.t_h}, t_v={self.t_v}")
        if self.passes < 0 or int(self.passes) != self.passes:
            raise ValueError(f"passes must be a nonnegative integer, got {self.passes}")

    @classmethod
    def from_intensity(cls, eps_h, eps_v, passes):
        return cls(float(np.sqrt(eps_h)), float(np.sqrt(eps_v)), int(passes))

    @property
    def amplitudes(self):
        """Total amplitude transmissions ``(t_h**n, t_v**n)``."""
        return self.t_h ** self.passes, self.t_v ** self.passes

    def kraus(self):
        a, b = self.amplitudes
        return np.diag([a, b]).astype(complex)


@dataclass(frozen=True)
class StateClass:
    label: str
    channel: LossChannel


_WINDOWS = {"I": 4, "II": 6}


def state_class(label, eps_h=EPS_H, eps_v=EPS_V, windows=None):
    """Class I (4 windows), II (6 windows) or III (PBS, the t_v -> 0 limit).

    ``windows`` overrides the window count of class I or II.
    """
    if label == "III":
        return StateClass("III", LossChannel(1.0, 0.0, 1))
    if label not in _WINDOWS:
        raise ValueError(f"unknown state class {label!r}")
    n = _WINDOWS[label] if windows is None else windows
    return StateClass(label, LossChannel.from_intensity(eps_h, eps_v, n))


@dataclass(frozen=True)
class PreparedState:
    state: np.ndarray
    postselection_probability: float
    hwp_angle: float
    zeta: float
    label: str = ""


def singlet(spec=SourceSpec()):
    p = qmath.projector(SINGLET)
    w = spec.noise_weight
    return (1 - w) * p + w * np.eye(4) / 4


def noise_for_purity(purity):
    """White-noise weight giving a noisy singlet of the requested purity."""
    if not 0.25 <= purity <= 1:
        raise ValueError("two-qubit purity must lie in [1/4, 1]")
    return 1 - np.sqrt((purity - 0.25) / 0.75)


def hwp_unitary(theta):
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def hwp_amplitudes(theta):
    """Amplitudes (alpha, beta, gamma, delta) of (U_hwp ⊗ I)|psi->."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    r = 1 / np.sqrt(2)
    return -s * r, c * r, c * r, s * r


def apply_loss(state, channel, side="detector"):
    """Filter one qubit with the channel's Kraus operator and renormalise.

    Returns the postselected state and the survival probability.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape != (4, 4):
        raise ValueError("apply_loss expects a two-qubit density matrix")
    k = channel.kraus()
    if side == "detector":
        kk = qmath.tensor_product(qmath.I2, k)
    elif side == "target":
        kk = qmath.tensor_product(k, qmath.I2)
    else:
        raise ValueError(f"side must be 'target' or 'detector', got {side!r}")
    out = kk @ state @ qmath.dag(kk)
    prob = float(np.trace(out).real)
    if prob < 1e-12:
        raise ValueError("state entirely filtered by the loss channel")
    out = out / prob
    return (out + qmath.dag(out)) / 2, prob


def zeta(alpha, beta, gamma, delta, a, b):
    """Prior-ratio parameter sqrt((|a alpha|^2+|b beta|^2)/(|a gamma|^2+|b delta|^2))."""
    num = abs(alpha * a) ** 2 + abs(beta * b) ** 2
    den = abs(gamma * a) ** 2 + abs(delta * b) ** 2
    if den <= 1e-30 * num:
        return np.inf
    return float(np.sqrt(num / den))


def prepare(cls, theta, spec=SourceSpec()):
    """Singlet -> HWP on the target -> loss on the detector -> PreparedState."""
    rho = singlet(spec)
    u = qmath.tensor_product(hwp_unitary(theta), qmath.I2)
    rho = u @ rho @ qmath.dag(u)
    rho, prob = apply_loss(rho, cls.channel, side="detector")
    a, b = cls.channel.amplitudes
    z = zeta(*hwp_amplitudes(theta), a, b)
    return PreparedState(rho, prob, float(theta), z, cls.label)


def theta_grid(n_points=21):
    return np.linspace(0, np.pi / 4, n_points)


def build_path_detector_state(priors, detectors):
    """N-path state sum_i sqrt(p_i)|i>|eta_i> on a space of dimension N*d."""
    priors = np.asarray(priors, dtype=float)
    if np.any(priors < 0) or abs(priors.sum() - 1) > 1e-12:
        raise ValueError("priors must be nonnegative and sum to 1")
    detectors = [qmath.normalize(eta) for eta in detectors]
    n = len(priors)
    if len(detectors) != n:
        raise ValueError("need one detector state per path")
    if len({eta.shape for eta in detectors}) != 1:
        raise ValueError("detector states must share a dimension")
    basis = np.eye(n, dtype=complex)
    psi = sum(np.sqrt(p) * qmath.tensor_product(basis[i], eta)
              for i, (p, eta) in enumerate(zip(priors, detectors)))
    return qmath.normalize(psi)


def fresnel_transmission(angle_deg, refractive_index=FUSED_SILICA_INDEX, pol="p", surfaces=2):
    """Intensity transmission through ``surfaces`` air/glass interfaces.

    Entry and exit faces of a parallel plate have the same reflectance, so
    the total (ignoring multiple reflections) is ``(1 - R)**surfaces``.
    Accepts scalar or array angles.
    """
    angle = np.radians(np.asarray(angle_deg, dtype=float))
    if np.any(angle < 0) or np.any(angle >= np.pi / 2):
        raise ValueError("incidence angle must lie in [0, 90) degrees")
    if refractive_index <= 1:
        raise ValueError("refractive index must exceed 1")
    n = refractive_index
    ci = np.cos(angle)
    ct = np.sqrt(1 - (np.sin(angle) / n) ** 2)
    if pol == "s":
        r = (ci - n * ct) / (ci + n * ct)
    elif pol == "p":
        r = (n * ci - ct) / (n * ci + ct)
    else:
        raise ValueError(f"pol must be 's' or 'p', got {pol!r}")
    out = (1 - r ** 2) ** surfaces
    return float(out) if out.ndim == 0 else out


def brewster_angle(refractive_index=FUSED_SILICA_INDEX):
    return float(np.degrees(np.arctan(refractive_index)))
