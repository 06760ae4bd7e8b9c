"""Command-line behavior: exit codes, output files, sidecars, reruns.

Everything goes through vortexzbw.cli.main(argv) in process, so the
tests can assert on return codes and inspect the written CSV files and
their .meta.json sidecars without spawning subprocesses.
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np
import pytest

import vortexzbw
from vortexzbw.cli import main
from vortexzbw.config import load_config
from vortexzbw.errors import GridConvergenceError

# unit tags the config grammar expects for each key
_UNITS = {
    "ell": "1",
    "k_r": "1/compton",
    "w0": "compton",
    "sigma_z": "compton",
    "k0z": "1/compton",
    "z0": "compton",
    "t_max": "hbar/mc2",
    "n_samples": "1",
    "eps_trunc": "1",
    "eps_conv": "1",
    "fit_tol": "1",
    "sweep_ell": "1",
    "units": "name",
    "out_dir": "path",
}


def write_config(dirpath, entries, name="run.cfg"):
    lines = [f"{key} [{_UNITS[key]}] {value}" for key, value in entries.items()]
    path = os.path.join(str(dirpath), name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def read_meta(csv_path):
    base, _ = os.path.splitext(str(csv_path))
    with open(base + ".meta.json", encoding="utf-8") as fh:
        return json.load(fh)


def check_sidecar(meta, command, header, cfg_path=None):
    assert meta["command"] == command
    assert meta["version"] == vortexzbw.__version__
    sha = meta["config_sha256"]
    assert len(sha) == 64 and set(sha) <= set("0123456789abcdef")
    assert meta["columns"] == list(header)
    assert meta["units"]["name"] in ("natural", "electron_si")
    assert set(meta["tolerances"]) == {"eps_trunc", "eps_conv", "fit_tol"}
    # reruns must be byte-identical, so nothing time-of-run-dependent
    # may appear in the sidecar
    flat = json.dumps(meta).lower()
    for word in ("timestamp", "created", "mtime", "hostname"):
        assert word not in flat
    if cfg_path is not None:
        assert sha == load_config(cfg_path).content_hash()


class TestArgHandling:
    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        out = capsys.readouterr().out
        assert "vzbw" in out
        assert vortexzbw.__version__ in out

    def test_requires_subcommand(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().err.lower()

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_threads_must_be_positive(self, tmp_path, capsys):
        out = tmp_path / "o"
        code = main(["validate", "--threads", "0", "--out", str(out)])
        assert code == 2
        assert "--threads" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["validate", "--config", str(tmp_path / "nope.cfg")])
        assert code == 2
        assert capsys.readouterr().err.startswith("configuration error:")

    def test_malformed_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("ell = 3\n", encoding="utf-8")
        assert main(["validate", "--config", str(path)]) == 2
        assert "configuration error" in capsys.readouterr().err

    def test_config_bounds_enforced(self, tmp_path, capsys):
        cfgp = write_config(tmp_path, {"w0": "0", "out_dir": str(tmp_path / "o")})
        assert main(["validate", "--config", cfgp]) == 2
        assert "w0" in capsys.readouterr().err


class TestValidateCommand:
    def test_default_configuration_passes(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfgp = write_config(tmp_path, {"out_dir": str(out)})
        # --threads is accepted (and ignored: the run is sequential)
        assert main(["validate", "--config", cfgp, "--threads", "2"]) == 0

        header, rows = read_csv(out / "validate.csv")
        assert header == ["check", "status", "residual", "tolerance"]
        assert [r[0] for r in rows] == [
            "momentum_norm",
            "energy_sector_recombination",
            "norm_conservation",
            "initial_velocity",
            "initial_position",
            "realspace_transverse_norm",
            "realspace_longitudinal_norm",
            "nonrelativistic_regime",
            "negative_energy_fraction",
        ]
        assert all(r[1] == "pass" for r in rows)
        for r in rows:
            assert float(r[2]) <= float(r[3])

        check_sidecar(read_meta(out / "validate.csv"), "validate", header, cfgp)
        meta = read_meta(out / "validate.csv")
        assert meta["grid"]["n_perp"] > 0 and meta["grid"]["n_z"] > 0

        assert not list(out.glob("*.tmp"))
        stdout = capsys.readouterr().out
        assert "momentum_norm" in stdout
        assert "wrote" in stdout

    def test_hard_check_failure_exits_one(self, tmp_path, monkeypatch, capsys):
        # force the reporting path: a hard check that does not meet its
        # tolerance must flip the exit code to 1 and be marked in the CSV
        monkeypatch.setattr(
            "vortexzbw.observables.velocity_expectation",
            lambda state, t: np.array([0.0, 0.0, 1.0]),
        )
        out = tmp_path / "out"
        cfgp = write_config(tmp_path, {"out_dir": str(out)})
        assert main(["validate", "--config", cfgp]) == 1

        header, rows = read_csv(out / "validate.csv")
        status = {r[0]: r[1] for r in rows}
        assert status["initial_velocity"] == "fail"
        assert status["momentum_norm"] == "pass"
        assert "fail" in capsys.readouterr().out


class TestEvolveCommand:
    def test_outputs_and_rerun_determinism(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfgp = write_config(tmp_path, {"out_dir": str(out)})
        argv = ["evolve", "--config", cfgp]
        assert main(argv) == 0

        names = ["velocity.csv", "position.csv", "interference.csv", "fit.csv"]
        names += [n.replace(".csv", ".meta.json") for n in names]
        first = {n: (out / n).read_bytes() for n in names}

        assert main(argv) == 0
        for n in names:
            assert (out / n).read_bytes() == first[n], f"{n} changed on rerun"
        assert not list(out.glob("*.tmp"))

        header, rows = read_csv(out / "velocity.csv")
        assert header == ["t", "vx", "vy", "vz"]
        assert len(rows) == 168
        assert float(rows[0][0]) == 0.0
        assert float(rows[-1][0]) == pytest.approx(11.0, abs=1e-12)
        # transverse velocity vanishes identically, longitudinal starts at zero
        assert float(rows[0][1]) == 0.0 and float(rows[0][2]) == 0.0
        assert abs(float(rows[0][3])) < 1e-12

        header, rows = read_csv(out / "position.csv")
        assert header == ["t", "x", "y", "z"]
        assert abs(float(rows[0][3])) < 1e-12

        header, rows = read_csv(out / "interference.csv")
        assert header == ["t", "displacement"]
        assert float(rows[0][1]) == 0.0

        header, rows = read_csv(out / "fit.csv")
        assert header == [
            "amplitude",
            "angular_frequency",
            "phase",
            "envelope_decay_time",
            "rms_residual",
        ]
        assert len(rows) == 1
        amp, omega, phase, tau, rms = (float(v) for v in rows[0])
        assert 0.02 < amp < 0.04
        assert 1.9 < omega < 2.1
        assert rms < 1e-4
        assert math.isinf(tau) or tau > 0.0

        meta = read_meta(out / "fit.csv")
        check_sidecar(meta, "evolve", header, cfgp)
        assert meta["fitted_series"] == "interference_displacement"
        assert meta["regime_ok"] is True
        assert 0.0 < meta["negative_energy_fraction"] < 0.05
        assert meta["drift_velocity"] == pytest.approx(0.05, rel=0.1)
        check_sidecar(read_meta(out / "velocity.csv"), "evolve",
                      ("t", "vx", "vy", "vz"), cfgp)

        stdout = capsys.readouterr().out
        assert "drift velocity" in stdout
        assert "wrote" in stdout


class TestSweepCommand:
    def test_two_charge_sweep(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfgp = write_config(tmp_path, {"out_dir": str(out), "sweep_ell": "0,1"})
        assert main(["sweep-ell", "--config", cfgp]) == 0

        raw = (out / "sweep.csv").read_bytes()
        assert b"\r" not in raw
        first_line = raw.split(b"\n", 1)[0]
        assert first_line == b"ell,amplitude,ratio_to_ell0,predicted_sqrt_ell,gamma_ratio_prediction"

        header, rows = read_csv(out / "sweep.csv")
        assert [r[0] for r in rows] == ["0", "1"]
        r0 = [float(v) for v in rows[0]]
        r1 = [float(v) for v in rows[1]]
        assert r0[2] == 1.0 and r0[3] == 1.0 and r0[4] == 1.0
        assert r1[2] > 1.0
        assert r1[3] == 1.0  # square-root law is normalized to 1 at the base charge
        assert r1[4] == 1.5
        assert r1[1] / r0[1] == pytest.approx(r1[2], rel=1e-12)

        meta = read_meta(out / "sweep.csv")
        check_sidecar(meta, "sweep-ell", header, cfgp)
        assert meta["loglog_slope"] is None  # a slope needs two charges above zero
        assert len(meta["regime"]) == 2
        for entry in meta["regime"]:
            assert set(entry) == {
                "ell",
                "max_momentum_scale",
                "negative_energy_fraction",
                "regime_ok",
            }
            assert entry["regime_ok"] is True

        stdout = capsys.readouterr().out
        assert "ell=   0" in stdout and "ell=   1" in stdout
        assert "log-log" not in stdout
        assert "wrote" in stdout


class TestLimitsCommand:
    def test_report_and_out_override(self, tmp_path, capsys):
        cfgout = tmp_path / "cfgout"
        override = tmp_path / "override"
        cfgp = write_config(tmp_path, {"out_dir": str(cfgout)})
        assert main(["limits", "--config", cfgp, "--out", str(override)]) == 0

        # --out replaces the config's out_dir entirely
        assert not cfgout.exists()
        header, rows = read_csv(override / "report.csv")
        assert header == [
            "claim",
            "case",
            "description",
            "reference",
            "computed",
            "rel_deviation",
            "verdict",
            "note",
        ]
        assert len(rows) == 24
        verdicts = {r[6] for r in rows}
        assert "confirmed" in verdicts
        for r in rows:
            float(r[5])  # rel_deviation column is numeric

        meta = read_meta(override / "report.csv")
        check_sidecar(meta, "limits", header)
        assert len(meta["claims"]) == 9
        # the hash records the effective config, and --out changed it
        assert meta["config_sha256"] != load_config(cfgp).content_hash()

        stdout = capsys.readouterr().out
        assert "confirmed" in stdout
        assert "wrote" in stdout


class TestDensityCommand:
    def test_profiles(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfgp = write_config(tmp_path, {"out_dir": str(out)})
        assert main(["density", "--config", cfgp]) == 0

        header, rows = read_csv(out / "density_radial.csv")
        assert header == ["r", "density", "marginal"]
        r = np.array([float(row[0]) for row in rows])
        dens = np.array([float(row[1]) for row in rows])
        marg = np.array([float(row[2]) for row in rows])
        assert np.all(np.diff(r) > 0)
        assert np.all(dens >= 0.0) and dens.max() > 0.0
        assert np.all(marg >= 0.0)

        header, rows = read_csv(out / "density_axial.csv")
        assert header == ["z", "density"]
        z = np.array([float(row[0]) for row in rows])
        dz = np.array([float(row[1]) for row in rows])
        # default packet is centered on z = 0
        spacing = float(np.max(np.diff(z)))
        assert abs(z[int(np.argmax(dz))]) < 2 * spacing

        meta = read_meta(out / "density_radial.csv")
        check_sidecar(meta, "density", ("r", "density", "marginal"), cfgp)
        for key in ("n_perp", "n_z", "n_r", "n_z_real"):
            assert meta["grid"][key] > 0
        assert "wrote" in capsys.readouterr().out


class TestNumericalFailure:
    def test_grid_failure_maps_to_exit_three(self, tmp_path, monkeypatch, capsys):
        def boom(params, **kwargs):
            raise GridConvergenceError("synthetic refinement cap")

        monkeypatch.setattr("vortexzbw.cli.build_grid", boom)
        out = tmp_path / "out"
        cfgp = write_config(tmp_path, {"out_dir": str(out)})
        assert main(["evolve", "--config", cfgp]) == 3

        err = capsys.readouterr().err
        assert err.startswith("numerical failure:")
        assert "synthetic refinement cap" in err
        assert not out.exists()
