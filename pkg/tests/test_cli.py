import subprocess
import sys

import numpy as np
import pytest

from sketchlab.cli import main
from sketchlab.errors import InvalidProfile
from sketchlab.experiments import ExperimentConfig, Mode, parse_k_grid, parse_profile, run_experiment
from sketchlab.io import format_csv, format_libsvm, read_csv
from sketchlab.spectrum import DecayProfile


def orthogonal(n, seed=0):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    return q


class TestParsing:
    def test_grid(self):
        assert parse_k_grid("10:50:10") == (10, 20, 30, 40, 50)
        assert parse_k_grid("3,5,9") == (3, 5, 9)
        with pytest.raises(ValueError):
            parse_k_grid("1:5:0")

    def test_profile(self):
        p = parse_profile("exponential:0.9:50", normalize=True)
        assert p.param == 0.9 and p.length == 50 and p.normalize_frobenius
        assert parse_profile("polynomial:3:20").param == 3
        assert parse_profile("flat:4").values == (1.0,) * 4
        with pytest.raises(InvalidProfile):
            parse_profile("cubic:1:2")

    def test_config_validation(self):
        prof = DecayProfile.exponential(0.9, 10)
        with pytest.raises(ValueError):
            ExperimentConfig(Mode.PREDICT, (3, 3), profile=prof)
        with pytest.raises(ValueError):
            ExperimentConfig(Mode.PREDICT, (3,), profile=prof, trials=0)
        with pytest.raises(ValueError):
            ExperimentConfig(Mode.PREDICT, (3,))


class TestRunExperiment:
    def test_lowrank_orthogonal(self):
        n = 10
        rows = run_experiment(ExperimentConfig(Mode.LOWRANK, (2, 4), matrix=orthogonal(n), trials=5))
        for r, k in zip(rows, (2, 4)):
            assert r.predicted == pytest.approx(n - k)
            assert r.empirical_mean == pytest.approx(n - k)
            assert r.empirical_std == pytest.approx(0, abs=1e-10)
            assert 0 <= r.empirical_mean <= n

    def test_gamma_table_flat(self):
        rows = run_experiment(ExperimentConfig(Mode.GAMMA, (2, 5), profile=parse_profile("flat:10")))
        assert [r.predicted for r in rows] == pytest.approx([2 / 8, 5 / 5])
        assert rows[0].closed_form is None

    def test_predict_closed_form_column(self):
        prof = DecayProfile.exponential(0.95, 300, normalize_frobenius=True)
        rows = run_experiment(ExperimentConfig(Mode.PREDICT, (5, 10), profile=prof))
        for r in rows:
            assert r.closed_form == pytest.approx(r.predicted, rel=0.1)

    def test_k_exceeds_rank_row(self):
        rows = run_experiment(ExperimentConfig(Mode.PREDICT, (2, 5), profile=parse_profile("flat:4")))
        assert rows[0].predicted is not None and not rows[0].k_exceeds_rank
        assert rows[1].k_exceeds_rank and rows[1].predicted is None

    def test_nystrom_bounds(self):
        b = np.random.default_rng(0).standard_normal((20, 20))
        k_mat = b @ b.T
        rows = run_experiment(ExperimentConfig(Mode.NYSTROM, (2, 6), matrix=k_mat, trials=4))
        for r in rows:
            assert 0 <= r.empirical_mean <= np.trace(k_mat)

    def test_kaczmarz_rows(self):
        prof = DecayProfile.explicit(np.linspace(2, 1, 12))
        rows = run_experiment(ExperimentConfig(Mode.KACZMARZ, (3,), profile=prof, trials=50, steps=3))
        r = rows[0]
        assert 0 < r.predicted < 1
        assert r.epsilon_hat < 0.2

    def test_threads_byte_identical(self):
        prof = DecayProfile.polynomial(2, 40, normalize_frobenius=True)
        out = [
            format_csv(run_experiment(ExperimentConfig(Mode.LOWRANK, (2, 4), profile=prof, trials=9, threads=t)))
            for t in (1, 4)
        ]
        assert out[0] == out[1]


def run_cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "sketchlab", *args], capture_output=True, text=True, env=env
    )


class TestCli:
    def test_predict_to_file(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["predict", "--profile", "flat:10", "--k-grid", "2:6:2", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [r.k for r in rows] == [2, 4, 6]
        assert rows[1].predicted == pytest.approx(6)

    def test_stdout(self, capsys):
        assert main(["gamma", "--profile", "flat:10", "--k", "4"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "k,predicted,empirical_mean,empirical_std,epsilon_hat,closed_form"
        assert lines[1].startswith("4,0.666666666667")

    def test_parse_error_exit(self, tmp_path):
        bad = tmp_path / "bad.svm"
        bad.write_text("1 2:1 1:1\n")
        assert main(["mc", "--input", str(bad), "--k", "1"]) == 2

    def test_all_exceed_exit(self):
        assert main(["predict", "--profile", "flat:3", "--k", "3,4"]) == 3

    def test_other_error_exit(self, tmp_path):
        assert main(["predict", "--input", str(tmp_path / "missing.svm"), "--k", "1"]) == 1
        assert main(["predict", "--profile", "exponential:1.5:10", "--k", "1"]) == 1

    def test_mc_from_libsvm(self, tmp_path):
        a = orthogonal(6, 3)
        p = tmp_path / "a.svm"
        p.write_text(format_libsvm(a))
        out = tmp_path / "o.csv"
        assert main(["mc", "--input", str(p), "--k", "2", "--trials", "3", "--out", str(out)]) == 0
        row = read_csv(out)[0]
        assert row.empirical_mean == pytest.approx(4)
        assert row.epsilon_hat is not None

    def test_nystrom_points(self, tmp_path):
        pts = tmp_path / "pts.csv"
        np.savetxt(pts, np.random.default_rng(0).standard_normal((30, 3)), delimiter=",")
        assert main(["nystrom", "--input", str(pts), "--sigma", "1.0", "--k", "3", "--trials", "3"]) == 0

    def test_env_threads_subprocess(self, tmp_path):
        import os

        args = ["mc", "--profile", "polynomial:2:30", "--normalize", "--k", "3,6", "--trials", "8", "--seed", "4"]
        outs = []
        for threads in ("1", "3"):
            env = dict(os.environ, SKETCHLAB_THREADS=threads)
            res = run_cli(*args, env=env)
            assert res.returncode == 0, res.stderr
            outs.append(res.stdout)
        assert outs[0] == outs[1]
