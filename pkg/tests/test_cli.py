import json
import subprocess
import sys

import numpy as np
import pytest

from srvm.cli import _int_grid, main, parse_layers


@pytest.fixture
def blobs_csv(tmp_path):
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(0, 0.6, (30, 2)), rng.normal(2, 0.6, (30, 2))])
    y = np.r_[np.zeros(30), np.ones(30)]
    path = tmp_path / "blobs.csv"
    np.savetxt(path, np.column_stack([X, y]), delimiter=",", fmt="%.6f")
    return path


@pytest.fixture
def regression_csv(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.uniform(-1, 1, (60, 1))
    y = np.sin(3 * x[:, 0]) + rng.normal(0, 0.05, 60)
    path = tmp_path / "reg.csv"
    np.savetxt(path, np.column_stack([x, y]), delimiter=",", fmt="%.6f")
    return path


def data_rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return lines[0], lines[1:]


class TestParsing:
    def test_grid_forms(self):
        assert _int_grid("10,20,40") == [10, 20, 40]
        assert _int_grid("10:30:10") == [10, 20, 30]

    def test_layers(self):
        layers = parse_layers("gaussian:0.5,erfc=2:0.5")
        assert [w for _, w in layers] == [0.5, 0.5]

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "srvm" in capsys.readouterr().out


class TestExitCodes:
    def test_no_command(self):
        assert main([]) == 2

    def test_even_R_with_sign(self, blobs_csv):
        assert main(["cv", "--dataset", str(blobs_csv), "-R", "4"]) == 2

    def test_bad_layer_weights(self, blobs_csv):
        assert main(["cv", "--dataset", str(blobs_csv), "-R", "3", "--layered", "gaussian:0.5,erfc:0.4"]) == 2

    def test_unknown_dataset(self):
        assert main(["cv", "--dataset", "no-such-dataset"]) == 3

    def test_metrics_needs_inputs(self):
        assert main(["metrics"]) == 2

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "srvm.cli", "cv", "--dataset", "nope"], capture_output=True)
        assert proc.returncode == 3


class TestCommands:
    def test_cv_outputs(self, blobs_csv, tmp_path, capsys):
        out = tmp_path / "res" / "cv.csv"
        preds = tmp_path / "res" / "preds.csv"
        assert main(["cv", "--dataset", str(blobs_csv), "-v", "10", "-R", "3", "--out", str(out), "--predictions", str(preds)]) == 0
        summary = json.loads(out.with_suffix(".json").read_text())["summary"]
        assert summary["mean_accuracy"] > 0.9
        assert "runtime_seconds" not in summary
        assert out.read_text().startswith("# srvm ")
        header, rows = data_rows(preds)
        assert header.split(",")[:4] == ["index", "fold", "target", "score"]
        assert len(rows) == 60
        capsys.readouterr()
        # predictions file feeds the metrics command
        assert main(["metrics", "--from", str(preds)]) == 0
        m = json.loads(capsys.readouterr().out)
        assert m["accuracy"] == pytest.approx(summary["mean_accuracy"], abs=0.05)

    def test_rerun_is_byte_identical(self, blobs_csv, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert main(["scan", "--dataset", str(blobs_csv), "--v-grid", "4,8", "-R", "3", "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_timing_adds_columns(self, blobs_csv, tmp_path):
        out = tmp_path / "cv.csv"
        assert main(["cv", "--dataset", str(blobs_csv), "-v", "8", "-R", "3", "--timing", "--out", str(out)]) == 0
        summary = json.loads(out.with_suffix(".json").read_text())["summary"]
        assert summary["runtime_seconds"] > 0 and "cop" in summary

    def test_scan_three_points(self, blobs_csv, tmp_path):
        out = tmp_path / "scan.csv"
        assert main(["scan", "--dataset", str(blobs_csv), "--v-grid", "4,8,12", "-R", "3", "--out", str(out)]) == 0
        header, rows = data_rows(out)
        assert header.startswith("v,R,mean_accuracy,normalized_overlap")
        assert [r.split(",")[0] for r in rows] == ["4", "8", "12"]

    def test_tune_from_scan_file(self, blobs_csv, tmp_path, capsys):
        scan = tmp_path / "scan.csv"
        assert main(["scan", "--dataset", str(blobs_csv), "--v-grid", "2:12:2", "-R", "3", "--out", str(scan)]) == 0
        capsys.readouterr()
        assert main(["tune", "--scan-file", str(scan)]) == 0
        v = json.loads(capsys.readouterr().out)["suggested_v"]
        assert 2 <= v <= 12

    def test_metrics_perfect(self, tmp_path, capsys):
        lab = tmp_path / "l.txt"
        lab.write_text("1\n-1\n1\n1\n-1\n")
        assert main(["metrics", "--labels", str(lab), "--predictions", str(lab)]) == 0
        m = json.loads(capsys.readouterr().out)
        assert m["accuracy"] == 1.0 and m["kappa"] == 1.0

    def test_roc(self, tmp_path, capsys):
        lab, sc = tmp_path / "l.txt", tmp_path / "s.txt"
        lab.write_text("1 1 -1 -1")
        sc.write_text("0.9 0.4 -0.3 -0.8")
        assert main(["roc", "--labels", str(lab), "--scores", str(sc)]) == 0
        assert json.loads(capsys.readouterr().out)["auc"] == 1.0

    def test_regress(self, regression_csv, tmp_path):
        out = tmp_path / "reg.csv"
        assert main(["regress", "--dataset", str(regression_csv), "--task", "regression", "-v", "15", "-R", "3",
                     "--voting", "identity", "--out", str(out)]) == 0
        summary = json.loads(out.with_suffix(".json").read_text())["summary"]
        assert summary["mse"] < 0.05
        assert 0 <= summary["durbin_watson"] <= 4

    def test_train_predict_roundtrip(self, blobs_csv, tmp_path, capsys):
        model = tmp_path / "m.json"
        assert main(["train", "--dataset", str(blobs_csv), "-v", "10", "-R", "3", "--model", str(model)]) == 0
        capsys.readouterr()
        assert main(["predict", "--dataset", str(blobs_csv), "--model", str(model)]) == 0
        assert json.loads(capsys.readouterr().out)["accuracy"] > 0.9

    def test_corrupt_model(self, blobs_csv, tmp_path):
        model = tmp_path / "m.json"
        model.write_text("{not json")
        assert main(["predict", "--dataset", str(blobs_csv), "--model", str(model)]) != 0

    def test_fetch_list(self, capsys):
        assert main(["fetch", "--list"]) == 0
        assert "heart" in capsys.readouterr().out
