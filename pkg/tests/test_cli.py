import shlex
import subprocess
import sys

import numpy as np
import pytest

from haarsde.cli import main, read_manifest
from haarsde.csvio import read_expansion, read_fbm, read_sample_path, write_expansion
from haarsde.experiment import path_rng, theoretical_rate
from haarsde.scheme import sample_brownian_grid
from haarsde.wavelets import HaarExpansion

SMALL_STUDY = [
    "study", "--beta0-list", "0.1,0.2", "--paths", "12", "--m0", "64",
    "--m-list", "8,16,32", "--level", "5",
]


def run(*args):
    return subprocess.run(
        [sys.executable, "-m", "haarsde", *args],
        capture_output=True,
        text=True,
    )


def data_lines(path):
    return [l for l in path.read_text().splitlines() if not l.startswith("#")][1:]


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestExitCodes:
    def test_success(self, tmp_path):
        assert run("rates", "--out-dir", str(tmp_path)).returncode == 0

    def test_usage_errors(self, tmp_path):
        out = str(tmp_path)
        assert run("fbm", "--hurst", "0.5", "--points", "100", "--seed", "0", "--out-dir", out).returncode == 2
        assert run("rates", "--bogus", "--out-dir", out).returncode == 2
        assert run("drift", "--beta0", "0.1", "--hurst", "0.8", "--out-dir", out).returncode == 2
        assert run("mollify", "--beta0", "0.1", "--eta", "0", "--out-dir", out).returncode == 2
        assert run().returncode == 2

    def test_numerical_failure(self, tmp_path):
        r = run("fbm", "--hurst", "0.9999999999", "--points", "512", "--seed", "0",
                "--refine", "--out-dir", str(tmp_path))
        assert r.returncode == 1
        assert "not positive definite" in r.stderr


class TestFbm:
    def test_shapes(self, tmp_path):
        assert main(["fbm", "--hurst", "0.85", "--points", "64", "--seed", "3", "--refine",
                     "--out-dir", str(tmp_path)]) == 0
        coarse = read_fbm(tmp_path / "fbm.csv")
        fine = read_fbm(tmp_path / "fbm_refined.csv")
        assert len(data_lines(tmp_path / "fbm.csv")) == 64
        assert len(fine) == 128
        assert np.array_equal(fine.values[1::2], coarse.values)

    def test_rerun_byte_identical(self, tmp_path):
        args = ["fbm", "--hurst", "0.7", "--points", "32", "--seed", "11", "--refine"]
        main(args + ["--out-dir", str(tmp_path / "a")])
        main(args + ["--out-dir", str(tmp_path / "b")])
        assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")


class TestDrift:
    def test_level_nine(self, tmp_path):
        assert main(["drift", "--beta0", "0.05", "--out-dir", str(tmp_path)]) == 0
        # mu0 plus 2^0 + ... + 2^9 wavelet coefficients
        assert len(data_lines(tmp_path / "drift.csv")) == 1024
        assert read_expansion(tmp_path / "drift.csv").level == 9
        assert "hurst=0.96" in (tmp_path / "drift_summary.txt").read_text()

    def test_level_zero(self, tmp_path):
        main(["drift", "--beta0", "0.1", "--level", "0", "--out-dir", str(tmp_path)])
        assert len(data_lines(tmp_path / "drift.csv")) == 2

    def test_mollify_from_file(self, tmp_path):
        main(["drift", "--beta0", "0.1", "--level", "3", "--out-dir", str(tmp_path)])
        assert main(["mollify", "--drift", str(tmp_path / "drift.csv"), "--eta", "0.01",
                     "--points", "11", "--out-dir", str(tmp_path)]) == 0
        assert len(data_lines(tmp_path / "drift_values.csv")) == 11
        assert (tmp_path / "mollified_drift.csv").read_text().startswith("# eta=0.01\n")


class TestSimulate:
    def test_zero_drift_is_cumulative_noise(self, tmp_path):
        drift = write_expansion(tmp_path / "zero.csv", HaarExpansion.zeros(2))
        assert main(["simulate", "--drift", str(drift), "--eta", "0.1", "--steps", "16",
                     "--seed", "4", "--x0", "0.5", "--out-dir", str(tmp_path)]) == 0
        sp = read_sample_path(tmp_path / "path.csv")
        dW = sample_brownian_grid(1.0, 16, path_rng(4, 0)).increments
        expected = [0.5]
        for w in dW:
            expected.append(expected[-1] + w)
        assert np.array_equal(sp.states, expected)

    def test_eta_from_file(self, tmp_path):
        main(["mollify", "--beta0", "0.1", "--level", "2", "--eta", "0.02", "--points", "3",
              "--out-dir", str(tmp_path)])
        assert main(["simulate", "--drift", str(tmp_path / "mollified_drift.csv"),
                     "--steps", "8", "--out-dir", str(tmp_path)]) == 0
        assert read_manifest(tmp_path / "run_manifest")["eta"] == "None"

    def test_eta_missing(self, tmp_path):
        drift = write_expansion(tmp_path / "zero.csv", HaarExpansion.zeros(2))
        assert main(["simulate", "--drift", str(drift), "--out-dir", str(tmp_path)]) == 2


class TestRates:
    def test_custom_q0(self, tmp_path, capsys):
        assert main(["rates", "--beta0", "0.05", "--q0", "20", "--out-dir", str(tmp_path)]) == 0
        line = (tmp_path / "rates.csv").read_text().splitlines()[1]
        assert float(line.split(",")[-1]) == pytest.approx(
            theoretical_rate(0.05, 20.0).predicted_rate, rel=1e-15
        )
        assert float(line.split(",")[-1]) == pytest.approx(0.123, abs=5e-4)

    def test_default_row(self, tmp_path, capsys):
        main(["rates", "--out-dir", str(tmp_path)])
        rounded = [float(l.split()[-1]) for l in capsys.readouterr().out.splitlines()[1:]]
        assert rounded == [0.17, 0.12, 0.08, 0.05, 0.02]


@pytest.fixture(scope="module")
def study_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("study")
    assert main(SMALL_STUDY + ["--out-dir", str(out)]) == 0
    return out


class TestStudyAndManifest:
    def test_outputs(self, study_dir):
        names = {p.name for p in study_dir.iterdir()}
        assert {"table.csv", "error_curves.csv", "error_curves.svg", "run_manifest",
                "error_curve_beta0=0.1.csv", "error_curve_beta0=0.2.csv"} <= names
        assert len(data_lines(study_dir / "table.csv")) == 2

    def test_manifest_records_parameters(self, study_dir):
        m = read_manifest(study_dir / "run_manifest")
        assert m["subcommand"] == "study"
        assert m["master_seed"] == "0" and m["drift_seed"] == "0"
        assert m["m_list"] == "8,16,32" and m["paths"] == "12"
        for f in study_dir.iterdir():
            if f.name != "run_manifest":
                assert f"sha256.{f.name}" in m

    def test_replay_from_manifest(self, study_dir, tmp_path):
        m = read_manifest(study_dir / "run_manifest")
        assert main(shlex.split(m["argv"]) + ["--out-dir", str(tmp_path)]) == 0
        assert snapshot(tmp_path) == snapshot(study_dir)

    def test_worker_count_irrelevant(self, study_dir, tmp_path):
        assert main(SMALL_STUDY + ["--workers", "4", "--out-dir", str(tmp_path)]) == 0
        for name, data in snapshot(study_dir).items():
            if name != "run_manifest":
                assert (tmp_path / name).read_bytes() == data, name
