import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from sphere_chords.analysis.caps import cap_delta_density
from sphere_chords.cli.main import main
from sphere_chords.geometry.bodies import SphericalCap, cap_boundary_area, cap_volume

PI_3 = "1.0471975511965976"


def _csv(text):
    return pd.read_csv(io.StringIO(text))


class TestCapCommands:
    def test_cap_delta_grid(self, capsys):
        assert main(["cap-delta", "--dim", "3", "--radius", PI_3, "--grid", "4"]) == 0
        frame = _csv(capsys.readouterr().out)
        assert list(frame.columns) == ["t", "f_delta", "F_delta"]
        assert len(frame) == 4
        assert frame["f_delta"].iloc[0] == 0.0
        assert frame["t"].iloc[-1] == pytest.approx(2 * math.pi / 3)

    def test_closed_form_matches_quadrature(self, capsys):
        assert main(["cap-delta", "--dim", "4", "--radius", "0.8"]) == 0
        quadrature = _csv(capsys.readouterr().out)
        assert main(["cap-delta", "--dim", "4", "--radius", "0.8", "--closed-form"]) == 0
        closed = _csv(capsys.readouterr().out)
        assert len(closed) == 512
        np.testing.assert_allclose(closed["f_delta"], quadrature["f_delta"], atol=1e-9)

    def test_json_output(self, capsys):
        assert main(["cap-sigma", "--dim", "3", "--radius", "0.5", "--grid", "3", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["columns"] == ["s", "F_sigma", "survival"]
        assert payload["data"][0]["F_sigma"] == 0.0
        assert payload["data"][-1]["F_sigma"] == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "argv",
        [
            ["cap-delta", "--dim", "2", "--radius", "0.5"],
            ["cap-delta", "--dim", "3", "--radius", "2.0"],
            ["cap-delta", "--dim", "5", "--radius", "0.5", "--closed-form"],
            ["cap-sigma", "--dim", "3", "--radius", "0.5", "--grid", "1"],
        ],
    )
    def test_domain_errors_exit_2(self, argv, capsys):
        assert main(argv) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_log_level(self, capsys):
        assert main(["cap-sigma", "--dim", "3", "--radius", "0.5", "--log-level", "LOUD"]) == 2


class TestTransform:
    def test_round_trip_through_a_chord_table(self, tmp_path, capsys):
        assert main(["cap-sigma", "--dim", "3", "--radius", PI_3]) == 0
        table = tmp_path / "sigma.csv"
        table.write_text(capsys.readouterr().out, encoding="utf-8")
        assert len(_csv(table.read_text(encoding="utf-8"))) == 4097

        argv = ["transform", "--sigma-cdf", str(table), "--volume", repr(math.pi),
                "--boundary", repr(math.pi * math.sqrt(3)), "--dim", "3"]
        assert main(argv) == 0
        frame = _csv(capsys.readouterr().out)
        assert main(["cap-delta", "--dim", "3", "--radius", PI_3]) == 0
        direct = _csv(capsys.readouterr().out)

        np.testing.assert_allclose(frame["t"], direct["t"], atol=1e-15)
        np.testing.assert_allclose(frame["f_delta"], direct["f_delta"], atol=1e-6)
        np.testing.assert_allclose(frame["F_delta"], direct["F_delta"], atol=1e-6)
        assert frame["F_delta"].iloc[-1] == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("d, radius", [(4, "0.8"), (6, "1.2")])
    def test_round_trip_in_higher_dimensions(self, tmp_path, capsys, d, radius):
        assert main(["cap-sigma", "--dim", str(d), "--radius", radius]) == 0
        table = tmp_path / "sigma.csv"
        table.write_text(capsys.readouterr().out, encoding="utf-8")
        cap = SphericalCap.centered(d, float(radius))
        argv = ["transform", "--sigma-cdf", str(table), "--volume", repr(cap_volume(cap, d)),
                "--boundary", repr(cap_boundary_area(cap, d)), "--dim", str(d), "--grid", "101"]
        assert main(argv) == 0
        frame = _csv(capsys.readouterr().out)
        expected = cap_delta_density(cap, d, frame["t"].to_numpy())
        np.testing.assert_allclose(frame["f_delta"], expected, atol=1e-6)

    def test_non_monotone_table_exit_3(self, tmp_path, capsys):
        table = tmp_path / "bad.csv"
        table.write_text("s,F_sigma\n0,0\n0.5,0.6\n1,0.5\n2,1\n", encoding="utf-8")
        argv = ["transform", "--sigma-cdf", str(table), "--volume", "1", "--boundary", "1", "--dim", "3"]
        assert main(argv) == 3
        assert "row 3" in capsys.readouterr().err

    def test_empty_table_exit_3(self, tmp_path):
        table = tmp_path / "empty.csv"
        table.write_text("", encoding="utf-8")
        argv = ["transform", "--sigma-cdf", str(table), "--volume", "1", "--boundary", "1", "--dim", "3"]
        assert main(argv) == 3

    def test_non_numeric_table_exit_3(self, tmp_path):
        table = tmp_path / "text.csv"
        table.write_text("s,F_sigma\n0,0\nhalf,0.5\n2,1\n", encoding="utf-8")
        argv = ["transform", "--sigma-cdf", str(table), "--volume", "1", "--boundary", "1", "--dim", "3"]
        assert main(argv) == 3


class TestMonteCarlo:
    ARGS = ["mc", "--what", "sigma", "--body", "cap", "--dim", "3", "--radius", PI_3,
            "--n", "20000", "--seed", "5"]

    def test_summary_is_deterministic(self, capsys):
        assert main(self.ARGS) == 0
        first = capsys.readouterr().out
        assert main(self.ARGS) == 0
        assert capsys.readouterr().out == first
        summary = json.loads(first)
        assert summary["n"] == 20000
        assert summary["hit_rate"] == pytest.approx(math.sqrt(3) / 2, abs=0.01)
        assert sum(summary["histogram"]["counts"]) == 20000

    def test_samples_output(self, capsys):
        argv = ["mc", "--what", "delta", "--body", "cap", "--dim", "4", "--radius", "0.8",
                "--n", "300", "--output", "samples"]
        assert main(argv) == 0
        frame = _csv(capsys.readouterr().out)
        assert list(frame.columns) == ["value"]
        assert len(frame) == 300
        assert frame["value"].max() <= 1.6

    def test_halfspace_body_file(self, body_file, capsys):
        path = body_file(np.eye(3), [1, 1, 1])
        argv = ["mc", "--what", "delta", "--body", "halfspaces", "--body-file", str(path), "--n", "2000"]
        assert main(argv) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["body"]["kind"] == "halfspaces"
        assert summary["max"] <= math.pi / 2 + 1e-12

    def test_inefficient_body_exit_4(self, body_file, capsys):
        eps = 1e-5
        path = body_file([[0, 0, 1], [0, eps, -1], [eps, 0, -1]], [2, 2, eps])
        argv = ["mc", "--what", "delta", "--body", "halfspaces", "--body-file", str(path), "--n", "100"]
        assert main(argv) == 4
        assert "error:" in capsys.readouterr().err

    def test_malformed_body_file_exit_3(self, tmp_path):
        path = tmp_path / "body.txt"
        path.write_text("1 0 0\n0 one 0\ninterior: 1 1 1\n", encoding="utf-8")
        argv = ["mc", "--what", "sigma", "--body", "halfspaces", "--body-file", str(path)]
        assert main(argv) == 3

    def test_missing_body_file_exit_2(self):
        assert main(["mc", "--what", "sigma", "--body", "halfspaces"]) == 2


class TestVerify:
    def test_bp_suite(self, capsys):
        argv = ["verify", "--suite", "bp", "--dim", "3", "--radius", PI_3, "--n", "20000"]
        assert main(argv) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 1
        report = json.loads(lines[0])
        assert report["name"] == "bp_identity"
        assert report["stats"]["lhs"] == pytest.approx(math.pi**2)
        assert report["pass"] is True
        assert report["ms"] is None

    def test_timings(self, capsys):
        argv = ["verify", "--suite", "bp", "--dim", "3", "--n", "2000", "--timings"]
        main(argv)
        report = json.loads(capsys.readouterr().out.splitlines()[0])
        assert report["ms"] is not None

    def test_unknown_suite_is_a_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--suite", "everything"])
        assert info.value.code == 2

    def test_repeated_runs_with_two_workers_are_byte_identical(self, capsys):
        argv = ["verify", "--suite", "cap-sigma", "--dim", "3", "--radius", PI_3,
                "--n", "20000", "--seed", "4", "--workers", "2"]
        code = main(argv)
        first = capsys.readouterr().out
        assert main(argv) == code
        assert capsys.readouterr().out == first
        assert json.loads(first)["params"]["workers"] == 2


@pytest.mark.parametrize("what", ["sigma", "delta"])
def test_mc_with_two_workers_is_byte_identical(what, capsys):
    argv = ["mc", "--what", what, "--body", "cap", "--dim", "4", "--radius", "0.8",
            "--n", "5000", "--seed", "11", "--workers", "2", "--output", "samples"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    assert len(_csv(first)) == 5000
