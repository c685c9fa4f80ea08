"""Command line entry point: ``coherence-duality <subcommand> [options]``.

Subcommands write CSV tables, a JSON summary and a manifest into
``--out-dir``. On failure a single JSON error line goes to stderr and the
exit code is nonzero.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments as ex
from . import measures, state_prep, tomography


def _common_options(defaults):
    p = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS if not defaults else None
    p.add_argument("--seed", type=int, default=sup)
    p.add_argument("--config", default=sup, help="flat key=value config file")
    p.add_argument("--out-dir", dest="out_dir", default=sup)
    p.add_argument("--exact", action="store_true", default=sup,
                   help="feed exact Born probabilities instead of Poisson counts")
    p.add_argument("--rounds", type=int, default=sup, help="Monte Carlo rounds (0 disables)")
    p.add_argument("--exposure", type=float, default=sup, help="expected pairs per setting")
    p.add_argument("--classes", default=sup, help="comma separated subset of I,II,III")
    p.add_argument("--n-theta", dest="n_theta", type=int, default=sup)
    p.add_argument("--noise-weight", dest="noise_weight", type=float, default=sup)
    p.add_argument("--set", dest="overrides", action="append", default=sup, metavar="KEY=VALUE",
                   help="override any config key; repeatable")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="coherence-duality", description=__doc__,
                                     parents=[_common_options(True)])
    common = _common_options(False)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="C and P along the HWP sweep of each class")
    sub.add_parser("bagan", parents=[common], help="C^2+P^2 table for every generated state")
    sub.add_parser("povm-compare", parents=[common], help="class III analytic vs measured POVM")
    fr = sub.add_parser("fresnel", parents=[common], help="Brewster-window transmission scan")
    fr.add_argument("--surfaces", type=int, default=2)
    tomo = sub.add_parser("tomo", parents=[common],
                          help="reconstruct a counts CSV, or simulate one for --class/--theta")
    tomo.add_argument("--counts", default=argparse.SUPPRESS, help="counts CSV to reconstruct")
    tomo.add_argument("--theta", type=float, default=argparse.SUPPRESS)
    return parser


def config_from_args(args):
    opts = {k: v for k, v in vars(args).items() if v is not None}
    path = opts.pop("config", None)
    overrides = {}
    for item in opts.pop("overrides", None) or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for key in ("command", "surfaces"):
        opts.pop(key, None)
    if opts.get("exact") is False:
        opts.pop("exact")
    overrides.update(opts)
    return ex.load_config(path, **overrides)


def cmd_sweep(config):
    outputs, summary = [], {}
    for sweep in ex.run_sweeps(config):
        name = f"sweep_{sweep.label}.csv"
        ex.write_csv(os.path.join(config.out_dir, name), ex.SWEEP_COLUMNS, ex.sweep_rows(sweep))
        outputs.append(name)
        sums = [pt.theory.sum_of_squares for pt in sweep.points]
        summary[sweep.label] = {
            "base_concurrence": sweep.concurrence,
            "base_purity": sweep.purity,
            "postselection_probability": sweep.postselection_probability,
            "zeta_range": [sweep.points[0].zeta, sweep.points[-1].zeta],
            "max_P_theory": max(pt.theory.path_info for pt in sweep.points),
            "max_C_theory": max(pt.theory.coherence for pt in sweep.points),
            "max_abs_sum_minus_quarter": max(abs(s - 0.25) for s in sums),
        }
    return outputs, summary


def cmd_bagan(config):
    rows = ex.run_bagan_table(config)
    ex.write_csv(os.path.join(config.out_dir, "bagan.csv"), ex.BAGAN_COLUMNS, rows)
    dev = [abs(r["sum_tomo"] - 0.25) for r in rows]
    return ["bagan.csv"], {"rows": len(rows), "bound": 0.25, "max_abs_tomo_deviation": max(dev),
                           "max_sum_tomo": max(r["sum_tomo"] for r in rows)}


def cmd_povm_compare(config):
    rows = ex.run_povm_comparison(config)
    ex.write_csv(os.path.join(config.out_dir, "povm_compare.csv"), ex.POVM_COLUMNS, rows)
    return ["povm_compare.csv"], {"max_mismatch": max(r["mismatch"] for r in rows), "rows": len(rows)}


def cmd_fresnel(config, surfaces=2):
    rows, summary = ex.run_fresnel_scan(config.angle_min, config.angle_max, config.angle_step,
                                        config.refractive_index, surfaces)
    ex.write_csv(os.path.join(config.out_dir, "fresnel.csv"), ex.FRESNEL_COLUMNS, rows)
    return ["fresnel.csv"], summary


def cmd_tomo(config):
    settings = tomography.standard_settings()
    outputs = []
    if config.counts:
        counts = tomography.CountsRecord.from_csv(config.counts)
        settings = tomography.settings_by_label(counts.labels)
        truth = None
    else:
        label = config.classes[0]
        truth = state_prep.prepare(config.state_class(label), config.theta, config.source()).state
        if config.exact:
            counts = tomography.exact_counts(truth, settings, config.exposure)
        else:
            counts = tomography.simulate_counts(truth, settings, config.exposure, config.seed)
        counts.to_csv(os.path.join(config.out_dir, "counts.csv"))
        outputs.append("counts.csv")
    rec = tomography.mle_reconstruct(counts, settings)
    c, p = tomography.coherence_and_path(rec.state)
    summary = {
        "C": c, "P": p, "sum_of_squares": c * c + p * p,
        "purity": measures.purity(rec.state), "concurrence": measures.concurrence(rec.state),
        "log_likelihood": rec.log_likelihood, "iterations": rec.iterations,
        "converged": rec.converged,
        "rho_real": np.real(rec.state).tolist(), "rho_imag": np.imag(rec.state).tolist(),
    }
    if truth is not None:
        summary["fidelity_to_prepared"] = measures.fidelity(rec.state, truth)
    if config.rounds:
        unc = tomography.monte_carlo_uncertainty(counts, settings, config.rounds,
                                                 seed=ex.derive_seed(config.seed, 99))
        summary.update(C_err=unc.c_std, P_err=unc.p_std, sum_err=unc.s_std)
    return outputs, summary


COMMANDS = {"sweep": cmd_sweep, "bagan": cmd_bagan, "povm-compare": cmd_povm_compare,
            "fresnel": cmd_fresnel, "tomo": cmd_tomo}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        os.makedirs(config.out_dir, exist_ok=True)
        if args.command == "fresnel":
            outputs, summary = cmd_fresnel(config, args.surfaces)
        else:
            outputs, summary = COMMANDS[args.command](config)
        name = args.command.replace("-", "_") + "_summary.json"
        ex.write_json(os.path.join(config.out_dir, name), summary)
        ex.write_manifest(config.out_dir, args.command, config, outputs + [name])
    except Exception as err:  # reported as one machine-readable line
        print(json.dumps({"error": type(err).__name__, "message": str(err)}), file=sys.stderr)
        return 1
    print(json.dumps({"command": args.command, "out_dir": config.out_dir,
                      "outputs": outputs + [name]}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
