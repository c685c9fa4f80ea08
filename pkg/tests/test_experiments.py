import csv
import json

import numpy as np
import pytest

from coherence_duality import cli, experiments as ex, state_prep as sp


def small(**kw):
    base = dict(n_theta=5, rounds=0, exposure=1e5)
    base.update(kw)
    return ex.ExperimentConfig(**base)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_parse(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\nclasses = I,III\nn_theta = 7\nexact = true\nnoise_weight=0.01  # w\n")
        cfg = ex.load_config(path, rounds="10")
        assert cfg.classes == ("I", "III")
        assert cfg.n_theta == 7 and cfg.exact and cfg.rounds == 10
        assert cfg.noise_weight == 0.01

    def test_rejects_unknown_key(self):
        with pytest.raises(ValueError):
            ex.parse_config_text("colour = blue")
        with pytest.raises(ValueError):
            ex.load_config(None, colour="blue")

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            ex.ExperimentConfig(classes="IV")
        with pytest.raises(ValueError):
            ex.ExperimentConfig(rounds=1)
        with pytest.raises(ValueError):
            ex.ExperimentConfig(noise_weight=2)


class TestSweep:
    def test_exact_class_iii(self):
        res = ex.run_sweep(small(exact=True, n_theta=9), "III")
        for pt in res.points:
            assert pt.c_tomo == pytest.approx(pt.theory.coherence, abs=1e-6)
            assert pt.p_tomo == pytest.approx(pt.theory.path_info, abs=1e-6)
        zetas = [pt.zeta for pt in res.points]
        assert zetas == sorted(zetas)

    def test_class_i_concurrence(self):
        res = ex.run_sweep(small(exact=True), "I")
        assert res.concurrence == pytest.approx(0.8188, abs=1e-4)

    def test_complementarity_grows(self):
        sweeps = ex.run_sweeps(small(exact=True, n_theta=9))
        ceiling = [max(pt.theory.coherence for pt in s.points) for s in sweeps]
        spread = [max(pt.zeta for pt in s.points) for s in sweeps]
        assert ceiling[0] < ceiling[1] < ceiling[2]
        assert spread[0] < spread[1] < spread[2]

    def test_theory_independent_of_seed_and_exposure(self):
        a = ex.run_sweep(small(seed=1, exposure=1e3), "II")
        b = ex.run_sweep(small(seed=2, exposure=1e5), "II")
        assert [p.theory for p in a.points] == [p.theory for p in b.points]
        assert [p.c_tomo for p in a.points] != [p.c_tomo for p in b.points]

    def test_error_bars(self):
        res = ex.run_sweep(small(rounds=50, n_theta=3), "I")
        for pt in res.points:
            assert pt.uncertainty.rounds == 50
            assert pt.c_err > 0 and pt.p_err > 0


class TestBagan:
    def test_exact_rows_saturate(self):
        rows = ex.run_bagan_table(small(exact=True))
        assert len(rows) == 5 * 3
        for row in rows:
            assert abs(row["sum_tomo"] - 0.25) < 1e-9
            assert abs(row["sum_povm"] - 0.25) < 1e-9
            assert abs(row["sum_theory"] - 0.25) < 1e-9
        assert {r["tag"] for r in rows if r["class"] == "III"} == {"povm"}

    def test_noisy_rows_cover_theory(self):
        # white noise lowers the saturated value to (1 - w)^2 / 4
        w = 0.03
        rows = ex.run_bagan_table(small(noise_weight=w, rounds=200, seed=3))
        for row in rows:
            assert row["sum_theory"] == pytest.approx((1 - w) ** 2 / 4, abs=1e-12)
            assert abs(row["sum_tomo"] - row["sum_theory"]) <= 3 * row["sum_tomo_err"]
            assert row["sum_tomo"] < 0.25


class TestPovmComparison:
    def test_exact_mismatch(self):
        rows = ex.run_povm_comparison(small(exact=True, n_theta=21))
        assert max(r["mismatch"] for r in rows) < 1e-10

    def test_finite_exposure_within_errors(self):
        rows = ex.run_povm_comparison(small(rounds=200, n_theta=7, seed=11))
        for r in rows:
            sigma = np.hypot(r["P_analytic_err"], r["P_povm_err"])
            assert r["mismatch"] <= 3 * sigma

    def test_deterministic(self):
        cfg = small(rounds=20, n_theta=3, seed=5)
        assert ex.run_povm_comparison(cfg) == ex.run_povm_comparison(cfg)


class TestFresnelScan:
    def test_scan(self):
        rows, summary = ex.run_fresnel_scan(0, 89, 0.1)
        tp = np.array([r["T_p"] for r in rows])
        ts = np.array([r["T_s"] for r in rows])
        angles = np.array([r["angle_deg"] for r in rows])
        assert summary["brewster_angle_deg"] == pytest.approx(55.6, abs=0.05)
        assert angles[np.argmax(tp)] == pytest.approx(summary["brewster_angle_deg"], abs=0.1)
        assert np.all(np.diff(ts) < 0)
        at60 = rows[int(np.argmin(abs(angles - 60)))]
        assert at60["T_p"] == pytest.approx(0.997, abs=0.005)
        assert 0.70 <= at60["T_s"] <= 0.74


class TestCli:
    def test_sweep_outputs_and_reproducible(self, tmp_path, capsys):
        args = ["sweep", "--n-theta", "3", "--rounds", "5", "--seed", "7", "--classes", "I,III"]
        assert cli.main(args + ["--out-dir", str(tmp_path / "a")]) == 0
        assert cli.main(args + ["--out-dir", str(tmp_path / "b")]) == 0
        for name in ("sweep_I.csv", "sweep_III.csv", "sweep_summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        rows = read_csv(tmp_path / "a" / "sweep_I.csv")
        assert list(rows[0]) == list(ex.SWEEP_COLUMNS)
        assert len(rows) == 3
        manifest = json.loads((tmp_path / "a" / "sweep_manifest.json").read_text())
        assert manifest["seed"] == 7 and manifest["config"]["rounds"] == 5
        assert json.loads(capsys.readouterr().out.splitlines()[-1])["command"] == "sweep"

    def test_config_file_and_set(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("classes = III\nn_theta = 3\nrounds = 0\n")
        out = tmp_path / "out"
        assert cli.main(["bagan", "--config", str(cfg), "--exact", "--set", "n_theta=4",
                         "--out-dir", str(out)]) == 0
        rows = read_csv(out / "bagan.csv")
        assert len(rows) == 4
        assert list(rows[0]) == list(ex.BAGAN_COLUMNS)

    def test_global_flags_before_subcommand(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["--exact", "--rounds", "0", "--n-theta", "5", "--out-dir", str(out),
                         "povm-compare"]) == 0
        summary = json.loads((out / "povm_compare_summary.json").read_text())
        assert summary["max_mismatch"] < 1e-10

    def test_fresnel(self, tmp_path):
        assert cli.main(["fresnel", "--out-dir", str(tmp_path), "--set", "angle_step=1"]) == 0
        rows = read_csv(tmp_path / "fresnel.csv")
        assert len(rows) == 90
        assert list(rows[0]) == list(ex.FRESNEL_COLUMNS)

    def test_tomo_simulate_then_reconstruct(self, tmp_path):
        sim = tmp_path / "sim"
        assert cli.main(["tomo", "--classes", "II", "--theta", "0.25", "--rounds", "0",
                         "--out-dir", str(sim)]) == 0
        first = json.loads((sim / "tomo_summary.json").read_text())
        assert first["fidelity_to_prepared"] > 0.999
        rec = tmp_path / "rec"
        assert cli.main(["tomo", "--counts", str(sim / "counts.csv"), "--rounds", "10",
                         "--out-dir", str(rec)]) == 0
        second = json.loads((rec / "tomo_summary.json").read_text())
        assert second["C"] == pytest.approx(first["C"], abs=1e-12)
        assert second["C_err"] > 0

    def test_error_line(self, tmp_path, capsys):
        assert cli.main(["sweep", "--set", "colour=blue", "--out-dir", str(tmp_path)]) == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "ValueError"

    def test_module_entry_point(self, tmp_path):
        import subprocess
        import sys
        proc = subprocess.run([sys.executable, "-m", "coherence_duality", "fresnel",
                               "--out-dir", str(tmp_path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
