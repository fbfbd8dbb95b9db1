"""CLI commands, file formats, and exit-code contract."""

import json

import numpy as np
import pytest

from usvt import mse, signal_matrix, singular_values
from usvt.cli import (
    MatrixFileError,
    main,
    read_matrix,
    write_matrix,
)

MU_1 = 0.6527759416335704


def write_lines(path, text):
    path.write_text(text, encoding="utf-8")


class TestMatrixFile:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        x = np.concatenate([
            rng.standard_normal(20) * 10.0**rng.integers(-20, 20, size=20),
            [0.0, -0.0, 1e-300, -1e300, 3.141592653589793],
        ]).reshape(5, 5)
        p = tmp_path / "m.txt"
        write_matrix(p, x)
        assert np.array_equal(read_matrix(p), x)

    def test_write_then_read_is_canonical(self, tmp_path):
        p = tmp_path / "m.txt"
        write_lines(p, "1.50,2\n3,0.25\n")
        a = read_matrix(p)
        q = tmp_path / "canon.txt"
        write_matrix(q, a)
        assert q.read_text() == "1.5,2.0\n3.0,0.25\n"

    def test_ragged_reports_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        write_lines(p, "1,2,3\n4,5\n")
        with pytest.raises(MatrixFileError, match="line 2"):
            read_matrix(p)

    def test_unparseable_reports_position(self, tmp_path):
        p = tmp_path / "bad.txt"
        write_lines(p, "1,2\n3,x\n")
        with pytest.raises(MatrixFileError, match="line 2.*field 2"):
            read_matrix(p)

    def test_non_finite_rejected(self, tmp_path):
        p = tmp_path / "bad.txt"
        write_lines(p, "1,nan\n")
        with pytest.raises(MatrixFileError, match="non-finite"):
            read_matrix(p)

    def test_empty_rejected(self, tmp_path):
        p = tmp_path / "empty.txt"
        write_lines(p, "")
        with pytest.raises(MatrixFileError, match="empty"):
            read_matrix(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MatrixFileError, match="cannot read"):
            read_matrix(tmp_path / "nope.txt")


class TestMpQuantile:
    def test_gamma_one_lower_edge(self, capsys):
        assert main(["mp-quantile", "--gamma", "1", "--p", "0"]) == 0
        assert capsys.readouterr().out.strip() == "0"

    def test_gamma_one_median(self, capsys):
        assert main(["mp-quantile", "--gamma", "1", "--p", "0.5"]) == 0
        value = float(capsys.readouterr().out)
        assert value == pytest.approx(MU_1, abs=1e-8)

    def test_bad_gamma_is_usage_error(self, capsys):
        assert main(["mp-quantile", "--gamma", "1.5", "--p", "0.5"]) == 2
        err = capsys.readouterr().err
        assert "gamma" in err

    def test_bad_level_is_usage_error(self):
        assert main(["mp-quantile", "--gamma", "0.5", "--p", "1.5"]) == 2

    def test_missing_flag_is_usage_error(self, capsys):
        assert main(["mp-quantile", "--gamma", "0.5"]) == 2
        capsys.readouterr()


class TestEstimateSigma:
    def test_zero_matrix(self, tmp_path, capsys):
        p = tmp_path / "z.txt"
        write_matrix(p, np.zeros((4, 6)))
        assert main(["estimate-sigma", "--input", str(p)]) == 0
        assert float(capsys.readouterr().out) == 0.0

    def test_scaled_file_ratio(self, tmp_path, capsys):
        x = np.random.default_rng(1).standard_normal((10, 16))
        p1, p3 = tmp_path / "a.txt", tmp_path / "b.txt"
        write_matrix(p1, x)
        write_matrix(p3, 3.0 * x)
        main(["estimate-sigma", "--input", str(p1)])
        v1 = float(capsys.readouterr().out)
        main(["estimate-sigma", "--input", str(p3)])
        v3 = float(capsys.readouterr().out)
        assert v3 / v1 == pytest.approx(3.0, abs=1e-9)

    def test_pure_noise_file(self, tmp_path, capsys):
        x = 2.0 * np.random.default_rng(2).standard_normal((200, 1000))
        p = tmp_path / "noise.txt"
        write_matrix(p, x)
        assert main(["estimate-sigma", "--input", str(p)]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(2.0, abs=0.06)

    def test_ragged_file_runtime_error(self, tmp_path, capsys):
        p = tmp_path / "bad.txt"
        write_lines(p, "1,2\n3\n")
        assert main(["estimate-sigma", "--input", str(p)]) == 1
        assert "line 2" in capsys.readouterr().err


class TestSpectrum:
    def test_diagonal(self, tmp_path, capsys):
        p = tmp_path / "d.txt"
        write_matrix(p, np.diag([3.0, 2.0, 1.0]))
        assert main(["spectrum", "--input", str(p)]) == 0
        assert capsys.readouterr().out.splitlines() == ["3.0", "2.0", "1.0"]

    def test_zero(self, tmp_path, capsys):
        p = tmp_path / "z.txt"
        write_matrix(p, np.zeros((2, 5)))
        main(["spectrum", "--input", str(p)])
        assert capsys.readouterr().out.splitlines() == ["0.0", "0.0"]

    def test_transpose_same_output(self, tmp_path, capsys):
        x = np.random.default_rng(3).standard_normal((6, 11))
        p, pt = tmp_path / "x.txt", tmp_path / "xt.txt"
        write_matrix(p, x)
        write_matrix(pt, x.T)
        main(["spectrum", "--input", str(p)])
        out1 = capsys.readouterr().out
        main(["spectrum", "--input", str(pt)])
        assert capsys.readouterr().out == out1


class TestDenoise:
    def test_sigma_zero_byte_identity(self, tmp_path):
        x = np.random.default_rng(4).standard_normal((5, 9))
        src = tmp_path / "in.txt"
        out = tmp_path / "out.txt"
        rep = tmp_path / "rep.json"
        write_matrix(src, x)
        assert main(["denoise", "--input", str(src), "--sigma", "0",
                     "--output", str(out), "--report", str(rep)]) == 0
        assert out.read_bytes() == src.read_bytes()
        report = json.loads(rep.read_text())
        assert report["kept_rank"] == 5
        assert report["degenerate_sigma"] is True

    def test_enormous_sigma_zero_output(self, tmp_path):
        x = np.random.default_rng(5).standard_normal((4, 7))
        src, out, rep = (tmp_path / n for n in ("in.txt", "out.txt", "r.json"))
        write_matrix(src, x)
        assert main(["denoise", "--input", str(src), "--sigma", "1e6",
                     "--output", str(out), "--report", str(rep)]) == 0
        assert np.array_equal(read_matrix(out), np.zeros((4, 7)))
        assert json.loads(rep.read_text())["kept_rank"] == 0

    def test_report_keys(self, tmp_path):
        x = np.random.default_rng(6).standard_normal((6, 10))
        src, out, rep = (tmp_path / n for n in ("in.txt", "out.txt", "r.json"))
        write_matrix(src, x)
        assert main(["denoise", "--input", str(src),
                     "--output", str(out), "--report", str(rep)]) == 0
        report = json.loads(rep.read_text())
        assert list(report) == ["m", "n", "eta", "sigma_used", "mu_gamma",
                                "threshold", "kept_rank", "kept_indices",
                                "degenerate_sigma"]
        assert report["m"] == 6 and report["n"] == 10
        assert report["eta"] == 0.02
        assert report["kept_rank"] == len(report["kept_indices"])

    def test_signal_regime_improves(self, tmp_path):
        # M_50 + sigma A at 200 x 1000 beats the identity estimator; at
        # sigma = 0.1 the threshold clears part of the signal spectrum too
        rng = np.random.default_rng(12)
        signal = signal_matrix(50, 200, 1000, rng)
        for sigma in (1.0, 0.1):
            x = signal + sigma * rng.standard_normal((200, 1000))
            src, out, rep = (tmp_path / n for n in ("in.txt", "o.txt", "r.json"))
            write_matrix(src, x)
            assert main(["denoise", "--input", str(src), "--eta", "0.02",
                         "--output", str(out), "--report", str(rep)]) == 0
            denoised = read_matrix(out)
            assert mse(denoised, signal) < mse(x, signal)
            if sigma == 0.1:
                assert json.loads(rep.read_text())["kept_rank"] >= 1

    def test_bad_eta_usage_error(self, tmp_path):
        src = tmp_path / "in.txt"
        write_matrix(src, np.ones((2, 2)))
        assert main(["denoise", "--input", str(src), "--eta", "0",
                     "--output", str(tmp_path / "o"), "--report",
                     str(tmp_path / "r")]) == 2

    def test_missing_input_runtime_error(self, tmp_path, capsys):
        assert main(["denoise", "--input", str(tmp_path / "nope.txt"),
                     "--output", str(tmp_path / "o"), "--report",
                     str(tmp_path / "r")]) == 1
        capsys.readouterr()


class TestSimulate:
    def test_tiny_run_files(self, tmp_path):
        out = tmp_path / "res.csv"
        summary = tmp_path / "sum.csv"
        plot = tmp_path / "fig.gp"
        code = main(["simulate", "--m", "8", "--n", "12", "--ranks", "1,2",
                     "--sigmas", "0.2,0.5", "--reps", "3", "--seed", "9",
                     "--out", str(out), "--summary", str(summary),
                     "--plot", str(plot)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "rank,sigma,rep,sigma_hat,sq_err_sigma,mse_matrix,kept_rank"
        assert len(lines) == 1 + 2 * 2 * 3
        summary_lines = summary.read_text().splitlines()
        assert summary_lines[0] == "rank,sigma,mean_sq_err_sigma,mean_mse_matrix,count"
        assert len(summary_lines) == 1 + 2 * 2
        assert all(row.endswith(",3") for row in summary_lines[1:])
        script = plot.read_text()
        assert "set multiplot layout 1,2" in script
        assert str(summary) in script
        assert "r=2" in script

    def test_deterministic_bytes(self, tmp_path):
        args = ["simulate", "--m", "10", "--n", "14", "--ranks", "2",
                "--sigmas", "0.4", "--reps", "2", "--seed", "77"]
        a1, s1 = tmp_path / "a1.csv", tmp_path / "s1.csv"
        a2, s2 = tmp_path / "a2.csv", tmp_path / "s2.csv"
        assert main(args + ["--out", str(a1), "--summary", str(s1)]) == 0
        assert main(args + ["--out", str(a2), "--summary", str(s2)]) == 0
        assert a1.read_bytes() == a2.read_bytes()
        assert s1.read_bytes() == s2.read_bytes()

    def test_results_floats_roundtrip(self, tmp_path):
        out, summary = tmp_path / "r.csv", tmp_path / "s.csv"
        main(["simulate", "--m", "6", "--n", "8", "--ranks", "1",
              "--sigmas", "0.3", "--reps", "2", "--seed", "5",
              "--out", str(out), "--summary", str(summary)])
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        from usvt import ExperimentConfig, run_experiment
        records = run_experiment(ExperimentConfig(
            m=6, n=8, ranks=(1,), sigmas=(0.3,), replications=2, seed=5))
        for row, rec in zip(rows, records):
            assert float(row[3]) == rec.sigma_hat
            assert float(row[4]) == rec.sq_err_sigma
            assert float(row[5]) == rec.mse_matrix

    def test_unknown_preset_lists_available(self, capsys):
        code = main(["simulate", "--preset", "paper-fig2",
                     "--out", "x", "--summary", "y"])
        assert code == 2
        err = capsys.readouterr().err
        assert "paper-fig1" in err

    def test_missing_dimensions_without_preset(self, capsys):
        assert main(["simulate", "--ranks", "1", "--sigmas", "1",
                     "--out", "x", "--summary", "y"]) == 2
        assert "--m" in capsys.readouterr().err

    def test_invalid_rank_for_preset_shape(self, tmp_path, capsys):
        code = main(["simulate", "--preset", "paper-fig1", "--ranks", "500",
                     "--reps", "1", "--out", str(tmp_path / "a"),
                     "--summary", str(tmp_path / "b")])
        assert code == 2
        capsys.readouterr()


class TestExitCodes:
    def test_unknown_command(self):
        assert main(["transmogrify"]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()
