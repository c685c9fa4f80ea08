"""Reproducible runs: zeta sweeps, the C^2+P^2 table, analytic-vs-POVM
comparison and the Brewster-window transmission scan.

Every run is a deterministic function of an :class:`ExperimentConfig`
(including its master seed). Results are plain dataclasses plus CSV/JSON
writers.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import state_prep, tomography
from .discrimination import DualityPoint, duality_point, extract_ensemble, helstrom_povm
from .measures import concurrence, purity
from .state_prep import SourceSpec

CLASS_LABELS = ("I", "II", "III")

SWEEP_COLUMNS = ("zeta", "C_theory", "P_theory", "C_tomo", "C_err", "P_tomo", "P_err", "theta")
BAGAN_COLUMNS = ("class", "theta", "zeta", "tag", "sum_theory", "sum_tomo", "sum_tomo_err",
                 "sum_povm", "sum_povm_err")
POVM_COLUMNS = ("theta", "zeta", "P_theory", "P_analytic", "P_analytic_err", "P_povm",
                "P_povm_err", "P_povm_err_propagated", "mismatch")
FRESNEL_COLUMNS = ("angle_deg", "T_p", "T_s")


@dataclass
class ExperimentConfig:
    classes: tuple = CLASS_LABELS
    n_theta: int = 21
    theta_min: float = 0.0
    theta_max: float = math.pi / 4
    eps_h: float = state_prep.EPS_H
    eps_v: float = state_prep.EPS_V
    windows_i: int = 4
    windows_ii: int = 6
    refractive_index: float = state_prep.FUSED_SILICA_INDEX
    noise_weight: float = 0.0
    exposure: float = tomography.DEFAULT_EXPOSURE
    rounds: int = 1000
    seed: int = 0
    exact: bool = False
    out_dir: str = "results"
    angle_min: float = 0.0
    angle_max: float = 89.0
    angle_step: float = 0.5
    theta: float = math.pi / 8
    counts: str = ""

    def __post_init__(self):
        if isinstance(self.classes, str):
            self.classes = tuple(c.strip() for c in self.classes.split(",") if c.strip())
        self.classes = tuple(self.classes)
        for label in self.classes:
            if label not in CLASS_LABELS:
                raise ValueError(f"unknown state class {label!r}")
        if self.n_theta < 1:
            raise ValueError("n_theta must be positive")
        if not (0 < self.eps_v <= self.eps_h <= 1):
            raise ValueError("need 0 < eps_v <= eps_h <= 1")
        if not 0 <= self.noise_weight <= 1:
            raise ValueError("noise_weight must lie in [0, 1]")
        if self.exposure <= 0:
            raise ValueError("exposure must be positive")
        if self.rounds != 0 and self.rounds < 2:
            raise ValueError("rounds must be 0 (no error bars) or at least 2")
        if self.refractive_index <= 1:
            raise ValueError("refractive_index must exceed 1")
        if not 0 <= self.angle_min <= self.angle_max <= 89:
            raise ValueError("angles must lie in [0, 89] degrees")

    def thetas(self):
        return np.linspace(self.theta_min, self.theta_max, self.n_theta)

    def state_class(self, label):
        windows = {"I": self.windows_i, "II": self.windows_ii}.get(label)
        return state_prep.state_class(label, self.eps_h, self.eps_v, windows)

    def source(self):
        return SourceSpec(noise_weight=self.noise_weight)

    def as_dict(self):
        d = dataclasses.asdict(self)
        d["classes"] = ",".join(self.classes)
        return d


def _coerce(f, raw):
    kind = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
    if kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{f.name}: not a boolean: {raw!r}")
    if kind == "int":
        return int(float(raw)) if float(raw).is_integer() else int(raw)
    if kind == "float":
        return float(raw)
    return raw


def parse_config_text(text):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    known = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(known[key], raw)
    return values


def load_config(path=None, **overrides):
    values = {}
    if path:
        with open(path) as fh:
            values.update(parse_config_text(fh.read()))
    known = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    for key, value in overrides.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = _coerce(known[key], value) if isinstance(value, str) else value
    return ExperimentConfig(**values)


def derive_seed(seed, *keys):
    return int(np.random.SeedSequence(entropy=seed, spawn_key=keys).generate_state(1)[0])


# -- per-state pipeline ------------------------------------------------------

@dataclass
class SweepPoint:
    theta: float
    theory: DualityPoint
    c_tomo: float
    p_tomo: float
    uncertainty: tomography.UncertaintyReport | None = None
    p_povm: float = float("nan")
    p_povm_err: float = float("nan")
    p_povm_err_propagated: float = float("nan")

    @property
    def zeta(self):
        return self.theory.zeta

    @property
    def c_err(self):
        return self.uncertainty.c_std if self.uncertainty else 0.0

    @property
    def p_err(self):
        return self.uncertainty.p_std if self.uncertainty else 0.0


@dataclass
class SweepResult:
    label: str
    points: list
    concurrence: float
    purity: float
    postselection_probability: float
    extra: dict = field(default_factory=dict)


def evaluate_state(config, label, index, theta, with_povm=False):
    """Theory, simulated tomography and (optionally) direct POVM measurement of one state."""
    cls_key = CLASS_LABELS.index(label)
    prepared = state_prep.prepare(config.state_class(label), theta, config.source())
    theory = duality_point(prepared)
    settings = tomography.standard_settings()
    if config.exact:
        counts = tomography.exact_counts(prepared.state, settings, config.exposure)
    else:
        counts = tomography.simulate_counts(prepared.state, settings, config.exposure,
                                            seed=derive_seed(config.seed, cls_key, index, 0))
    rec = tomography.mle_reconstruct(counts, settings)
    c_tomo, p_tomo = tomography.coherence_and_path(rec.state)
    report = None
    if config.rounds:
        report = tomography.monte_carlo_uncertainty(
            counts, settings, config.rounds, seed=derive_seed(config.seed, cls_key, index, 1))
    point = SweepPoint(float(theta), theory, c_tomo, p_tomo, report)
    if with_povm:
        povm = helstrom_povm(extract_ensemble(prepared.state))
        pc = tomography.simulate_povm_counts(prepared.state, povm, config.exposure,
                                             seed=derive_seed(config.seed, cls_key, index, 2),
                                             exact=config.exact)
        point.p_povm = float(tomography.p_success_from_counts(pc)) - 0.5
        point.p_povm_err_propagated = tomography.p_success_propagated_error(pc)
        if config.rounds:
            point.p_povm_err = tomography.povm_monte_carlo(
                pc, config.rounds, seed=derive_seed(config.seed, cls_key, index, 3))[1]
        else:
            point.p_povm_err = 0.0
    return point


def run_sweep(config, label=None, with_povm=False):
    """Theoretical and simulated (C, P) along the HWP-angle grid of one class."""
    label = config.classes[0] if label is None else label
    points = [evaluate_state(config, label, i, th, with_povm) for i, th in enumerate(config.thetas())]
    for pt in points:
        bound = pt.theory.bound
        if pt.theory.sum_of_squares > bound + 1e-9:
            raise ArithmeticError(f"duality bound violated at theta={pt.theta}")
    points.sort(key=lambda pt: (pt.zeta, pt.theta))
    base = state_prep.prepare(config.state_class(label), 0.0, config.source())
    return SweepResult(label, points, concurrence(base.state), purity(base.state),
                       base.postselection_probability)


def run_sweeps(config, with_povm=False):
    return [run_sweep(config, label, with_povm) for label in config.classes]


def _sum_err(c, p, sc, sp):
    return float(np.hypot(2 * c * sc, 2 * p * sp))


def run_bagan_table(config, sweeps=None):
    """One row per generated state with C^2+P^2 from tomography and from the POVM pipeline."""
    sweeps = run_sweeps(config, with_povm=True) if sweeps is None else sweeps
    rows = []
    for sweep in sweeps:
        for pt in sweep.points:
            unc = pt.uncertainty
            sum_tomo = pt.c_tomo ** 2 + pt.p_tomo ** 2
            sum_tomo_err = unc.s_std if unc else 0.0
            sum_povm = pt.c_tomo ** 2 + pt.p_povm ** 2
            sum_povm_err = _sum_err(pt.c_tomo, pt.p_povm, pt.c_err, pt.p_povm_err)
            rows.append({
                "class": sweep.label,
                "theta": pt.theta,
                "zeta": pt.zeta,
                "tag": "povm" if sweep.label == "III" else "tomography",
                "sum_theory": pt.theory.sum_of_squares,
                "sum_tomo": sum_tomo,
                "sum_tomo_err": sum_tomo_err,
                "sum_povm": sum_povm,
                "sum_povm_err": sum_povm_err,
            })
    return rows


def run_povm_comparison(config):
    """Class III: path information from the reconstructed state vs. the measured POVM."""
    cfg = dataclasses.replace(config, classes=("III",))
    sweep = run_sweep(cfg, "III", with_povm=True)
    rows = []
    for pt in sweep.points:
        rows.append({
            "theta": pt.theta,
            "zeta": pt.zeta,
            "P_theory": pt.theory.path_info,
            "P_analytic": pt.p_tomo,
            "P_analytic_err": pt.p_err,
            "P_povm": pt.p_povm,
            "P_povm_err": pt.p_povm_err,
            "P_povm_err_propagated": pt.p_povm_err_propagated,
            "mismatch": abs(pt.p_tomo - pt.p_povm),
        })
    return rows


def run_fresnel_scan(angle_min=0.0, angle_max=89.0, step=0.5,
                     refractive_index=state_prep.FUSED_SILICA_INDEX, surfaces=2):
    """Transmission of one window for both polarisations, plus the Brewster angle."""
    if not 0 <= angle_min <= angle_max <= 89:
        raise ValueError("angles must lie in [0, 89] degrees")
    angles = np.arange(angle_min, angle_max + step / 2, step)
    tp = state_prep.fresnel_transmission(angles, refractive_index, "p", surfaces)
    ts = state_prep.fresnel_transmission(angles, refractive_index, "s", surfaces)
    rows = [{"angle_deg": float(a), "T_p": float(p), "T_s": float(s)} for a, p, s in zip(angles, tp, ts)]
    summary = {
        "refractive_index": refractive_index,
        "surfaces": surfaces,
        "brewster_angle_deg": state_prep.brewster_angle(refractive_index),
        "grid_max_T_p_angle_deg": float(angles[np.argmax(tp)]),
    }
    return rows, summary


# -- output --------------------------------------------------------------------

def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row[c]) for c in columns])


def sweep_rows(sweep):
    return [{
        "zeta": pt.zeta,
        "C_theory": pt.theory.coherence,
        "P_theory": pt.theory.path_info,
        "C_tomo": pt.c_tomo,
        "C_err": pt.c_err,
        "P_tomo": pt.p_tomo,
        "P_err": pt.p_err,
        "theta": pt.theta,
    } for pt in sweep.points]


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(_json_safe(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(out_dir, command, config, outputs):
    write_json(os.path.join(out_dir, f"{command}_manifest.json"),
               {"command": command, "seed": config.seed, "config": config.as_dict(),
                "outputs": sorted(outputs)})
