import json
import math
from pathlib import Path

import pytest

from fractal_fourier.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write_ifs(path, ratios, translations, weights, separation="none", exponents=None):
    doc = {
        "ambient_dim": 1,
        "maps": [
            {"ratio": r, "orientation": [1.0], "translation": [t]}
            for r, t in zip(ratios, translations)
        ],
        "weights": weights,
        "declared_separation": separation,
    }
    if exponents:
        doc["exponents"] = exponents
    path.write_text(json.dumps(doc))
    return path


class TestDims:
    def test_cantor(self, capsys, tmp_path):
        code = main(
            ["dims", "--ifs", str(CONFIGS / "cantor.json"), "--out", str(tmp_path)]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "0.630930" in out
        assert "ad_regular = true" in out
        profile = json.loads((tmp_path / "profile.json").read_text())
        assert profile["kappa2"] == pytest.approx(math.log(2) / math.log(3), abs=1e-12)

    def test_missing_digit(self, capsys):
        code = main(["dims", "--ifs", str(CONFIGS / "missing_digit_b5.json")])
        assert code == 0
        assert "0.861353" in capsys.readouterr().out

    def test_bad_weights_exit_2(self, tmp_path, capsys):
        bad = write_ifs(tmp_path / "bad.json", [1 / 3, 1 / 3], [0.0, 2 / 3], [0.5, 0.4])
        code = main(["dims", "--ifs", str(bad)])
        assert code == 2
        assert "sum to 1" in capsys.readouterr().err

    def test_missing_file_exit_2(self):
        assert main(["dims", "--ifs", "no_such_file.json"]) == 2

    def test_inconsistent_exponents_exit_3(self, tmp_path, capsys):
        bad = write_ifs(
            tmp_path / "inc.json",
            [1 / 3, 1 / 3],
            [0.0, 2 / 3],
            [0.5, 0.5],
            separation="SSC",
            exponents={"kappa1": 0.7, "d_inf": 0.6, "kappa2": 0.62},
        )
        code = main(["dims", "--ifs", str(bad)])
        assert code == 3
        assert "kappa1 <= d_inf" in capsys.readouterr().err


class TestBounds:
    def test_cantor_sigma_and_baseline(self, capsys):
        code = main(
            [
                "bounds",
                "--ifs",
                str(CONFIGS / "cantor.json"),
                "--assume-curvature",
                "--thresholds",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "sigma = 0.061442548" in out
        assert "0.016" in out
        assert "0.765564437" in out
        assert "0.850781059" in out

    def test_report_written(self, tmp_path):
        code = main(
            [
                "bounds",
                "--ifs",
                str(CONFIGS / "cantor.json"),
                "--out",
                str(tmp_path),
                "--vdc",
                "2",
            ]
        )
        # vdc needs the plane; cantor is on the line -> validation failure
        assert code == 2

    def test_report_with_profile_roundtrip(self, tmp_path):
        assert (
            main(["dims", "--ifs", str(CONFIGS / "cantor.json"), "--out", str(tmp_path)])
            == 0
        )
        code = main(
            ["bounds", "--profile", str(tmp_path / "profile.json"), "--out", str(tmp_path)]
        )
        assert code == 0
        report = json.loads((tmp_path / "bounds.json").read_text())
        assert report["sigma"] == pytest.approx(0.0614425, abs=1e-6)
        assert "formula" in report

    def test_small_measure_warns_but_exits_zero(self, tmp_path, capsys):
        small = write_ifs(
            tmp_path / "small.json", [0.1, 0.1], [0.0, 0.9], [0.5, 0.5], "SSC"
        )
        code = main(["bounds", "--ifs", str(small)])
        out = capsys.readouterr().out
        assert code == 0
        assert "sigma = 0.000000000" in out
        assert "applicable = false" in out


class TestFourier:
    def test_recursion_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            [
                "fourier",
                "--ifs",
                str(CONFIGS / "cantor.json"),
                "--xi-min",
                "-50",
                "--xi-max",
                "50",
                "--count",
                "101",
                "--tol",
                "1e-8",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 102
        assert lines[0] == "xi,re,im,abs,error_bound,scheme,leaves_used"
        # xi = 0 row has value exactly 1
        mid = lines[51].split(",")
        assert float(mid[0]) == 0.0
        assert float(mid[1]) == 1.0

    def test_order1_map_sweep(self, tmp_path):
        out = tmp_path / "sq.csv"
        code = main(
            [
                "fourier",
                "--ifs",
                str(CONFIGS / "cantor.json"),
                "--scheme",
                "order1",
                "--map",
                '{"kind": "square"}',
                "--xi-list",
                "256,512,1024",
                "--tol",
                "1e-3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert len(out.read_text().strip().split("\n")) == 4

    def test_budget_exit_4(self, tmp_path, monkeypatch, capsys):
        mixed = write_ifs(tmp_path / "mixed.json", [0.5, 0.25], [0.0, 0.75], [0.5, 0.5])
        monkeypatch.setenv("FRACTAL_FOURIER_BUDGET", "50")
        code = main(
            [
                "fourier",
                "--ifs",
                str(mixed),
                "--xi-list",
                "4096",
                "--tol",
                "1e-6",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        assert code == 4
        assert "leaf_budget" in capsys.readouterr().err

    def test_map_required_for_order0(self):
        code = main(
            ["fourier", "--ifs", str(CONFIGS / "cantor.json"), "--scheme", "order0"]
        )
        assert code == 2


class TestDecayCommand:
    def test_small_run(self, tmp_path):
        cfg = {
            "ifs": str(CONFIGS / "cantor.json"),
            "map": {"kind": "square"},
            "octaves": [8, 11],
            "samples_per_octave": 8,
            "seed": 0,
            "tol": 1e-3,
        }
        cfg_path = tmp_path / "decay.json"
        cfg_path.write_text(json.dumps(cfg))
        code = main(["decay", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
        assert code == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert "fitted_slope" in summary
        assert summary["theoretical_sigma"] == pytest.approx(0.0614425, abs=1e-6)
        assert (tmp_path / "out" / "octaves.csv").exists()
        assert (tmp_path / "out" / "samples.csv").exists()

    def test_unknown_field_rejected(self, tmp_path):
        cfg_path = tmp_path / "decay.json"
        cfg_path.write_text(
            json.dumps({"ifs": "x.json", "map": {}, "octaves": [1, 2], "bogus": 1})
        )
        assert main(["decay", "--config", str(cfg_path)]) == 2


class TestConvolveCommand:
    def test_small_run(self, tmp_path):
        cfg = {
            "factors": [
                {"ifs": str(CONFIGS / "uniform12.json"), "map": {"kind": "log"}},
                {"ifs": str(CONFIGS / "uniform12.json"), "map": {"kind": "log"}},
            ],
            "max_frequency": 512.0,
            "density_points": 64,
        }
        cfg_path = tmp_path / "conv.json"
        cfg_path.write_text(json.dumps(cfg))
        code = main(
            ["convolve", "--config", str(cfg_path), "--out", str(tmp_path / "out")]
        )
        assert code == 0
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert 0.9 <= summary["mass"] <= 1.1
        density = (tmp_path / "out" / "density.csv").read_text().strip().split("\n")
        assert density[0] == "x,density,error_estimate"

    def test_support_violation_exit_5(self, tmp_path, capsys):
        cfg = {
            "factors": [
                {"ifs": str(CONFIGS / "uniform01.json"), "map": {"kind": "log"}},
                {"ifs": str(CONFIGS / "uniform12.json"), "map": {"kind": "log"}},
            ]
        }
        cfg_path = tmp_path / "conv.json"
        cfg_path.write_text(json.dumps(cfg))
        code = main(["convolve", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "right of" in capsys.readouterr().err


class TestArithCheck:
    def run_json(self, capsys, *argv):
        code = main(["arith-check", *argv])
        assert code == 0
        return json.loads(capsys.readouterr().out)

    def test_two_set(self, capsys):
        report = self.run_json(capsys, "two-set", "0.8", "0.8")
        assert report["verdict"] is True

    def test_three_set(self, capsys):
        report = self.run_json(capsys, "three-set", "0.851", "0.851", "0.851")
        assert report["verdict"] is True

    def test_two_measures(self, capsys):
        report = self.run_json(
            capsys, "two-measures", "0.9", "0.7", "--ad-regular"
        )
        assert report["verdict"] is True
        assert 3 in report["satisfied_bullets"]
        assert "7/9" in report["note"]

    def test_thresholds(self, capsys):
        report = self.run_json(capsys, "thresholds")
        assert report["two_fold"] == pytest.approx((math.sqrt(65) - 5) / 4, abs=1e-9)
        assert report["three_fold"] == pytest.approx((math.sqrt(41) - 3) / 4, abs=1e-9)

    def test_high_dim(self, capsys):
        report = self.run_json(capsys, "high-dim", "5", "4.6")
        assert report["verdict"] is True

    def test_bad_arity_exit_2(self):
        assert main(["arith-check", "two-set", "0.8"]) == 2


class TestHelp:
    def test_help_lists_subcommands(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        for name in ("dims", "bounds", "fourier", "decay", "convolve", "arith-check"):
            assert name in out
