import csv
import json

import numpy as np
import pytest

from clfstab.cli import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_VERIFY_FAIL,
    ConfigError,
    RunConfig,
    grid_points,
    main,
    resolve,
)

S3 = np.sqrt(3.0)


def write_config(tmp_path, **overrides):
    data = RunConfig().to_dict()
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return str(path)


class TestConfig:
    def test_default_resolves(self):
        problem = resolve(RunConfig())
        assert problem.M == 2.5
        assert problem.example.name == "triangle-example"

    def test_unknown_example(self):
        with pytest.raises(ConfigError, match="example"):
            resolve(RunConfig(example="nope"))

    def test_bad_gauge_dimension(self):
        with pytest.raises(ConfigError, match="cvs"):
            resolve(RunConfig(cvs={"variant": "weighted_l1", "weights": [1.0]}))

    def test_bad_epsilon(self):
        with pytest.raises(ConfigError, match="epsilon"):
            resolve(RunConfig(epsilon=-1.0))

    def test_bad_grid(self):
        with pytest.raises(ConfigError, match="grid"):
            resolve(RunConfig(grid={"min": [-1.0], "max": [1.0], "counts": [2]}))

    def test_unknown_field_named(self):
        with pytest.raises(ConfigError, match="bogus"):
            RunConfig.from_dict({"bogus": 1})

    def test_grid_points_shape(self):
        pts = grid_points({"min": [-3, -3], "max": [3, 3], "counts": [4, 4]})
        assert len(pts) == 16
        np.testing.assert_allclose(pts[0], [-3.0, -3.0])


class TestGaugeEval:
    def test_vertex_on_boundary(self, capsys):
        assert main(["gauge-eval", "-u", str(S3), "1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "phi(u) = 1" in out and "member = True" in out
        assert "M = max over box of phi = 2.5" in out

    def test_origin(self, capsys):
        assert main(["gauge-eval", "-u", "0", "0"]) == EXIT_OK
        assert "phi(u) = 0" in capsys.readouterr().out

    def test_json_summary(self, capsys):
        assert main(["gauge-eval", "--json", "-u", "0.5", "0.5"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["M"] == 2.5 and data["member"] is True

    def test_dimension_mismatch_is_config_error(self, capsys):
        assert main(["gauge-eval", "-u", "1", "2", "3"]) == EXIT_CONFIG


class TestVerify:
    def test_default_passes(self, capsys):
        assert main(["verify"]) == EXIT_OK
        assert "overall: pass" in capsys.readouterr().out

    def test_shrunk_box_fails(self, tmp_path, capsys):
        cfg = write_config(tmp_path, box={"lower": [0.1, 0.1], "upper": [0.1, 0.1]},
                           cvs={"variant": "box", "lower": [0.1, 0.1],
                                "upper": [0.1, 0.1]})
        assert main(["verify", "--config", cfg]) == EXIT_VERIFY_FAIL
        assert "CLF violation" in capsys.readouterr().out

    def test_bad_epsilon_is_config_error(self, capsys):
        assert main(["verify", "--epsilon", "-1"]) == EXIT_CONFIG
        assert "epsilon" in capsys.readouterr().err

    def test_json_summary(self, capsys):
        assert main(["verify", "--json"]) == EXIT_OK
        data = json.loads(capsys.readouterr().out)
        assert data["passed"] is True
        assert data["clf"]["violations"] == []


class TestSimulate:
    def test_converges_and_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        assert main(["simulate", "--x0", "2", "2", "--out", str(out)]) == EXIT_OK
        assert "converged = True" in capsys.readouterr().out
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["traj_id", "t", "x1", "x2", "u1", "u2", "V"]

    def test_first_control_matches_feedback(self, tmp_path):
        out = tmp_path / "run.csv"
        assert main(["simulate", "--x0", "1", "1", "--out", str(out)]) == EXIT_OK
        with open(out) as fh:
            first = list(csv.reader(fh))[1]
        assert float(first[4]) == pytest.approx(-0.68131, abs=1e-4)
        assert float(first[5]) == pytest.approx(-0.81994, abs=1e-4)

    def test_origin_immediate(self, tmp_path, capsys):
        out = tmp_path / "o.csv"
        assert main(["simulate", "--x0", "0", "0", "--out", str(out)]) == EXIT_OK
        assert "converged = True" in capsys.readouterr().out

    def test_wrong_x0_dimension(self, tmp_path):
        assert main(["simulate", "--x0", "1", "--out",
                     str(tmp_path / "x.csv")]) == EXIT_CONFIG

    def test_unwritable_path_is_io_error(self, capsys):
        assert main(["simulate", "--x0", "1", "1",
                     "--out", "/nonexistent-dir/run.csv"]) == EXIT_IO


class TestPortrait:
    def test_default_grid(self, tmp_path, capsys):
        out = tmp_path / "portrait.csv"
        assert main(["portrait", "--out", str(out)]) == EXIT_OK
        assert "16 trajectories, 16 converged" in capsys.readouterr().out
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert len({r[0] for r in rows[1:]}) == 16
        assert all(len(r) == 7 for r in rows)

    def test_single_point_grid(self, tmp_path, capsys):
        cfg = write_config(tmp_path, grid={"min": [0.0, 0.0], "max": [0.0, 0.0],
                                           "counts": [1, 1]})
        out = tmp_path / "one.csv"
        assert main(["portrait", "--config", cfg, "--out", str(out)]) == EXIT_OK
        assert "1 trajectories, 1 converged" in capsys.readouterr().out

    def test_jobs_flag(self, tmp_path):
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(["portrait", "--out", str(out_a)]) == EXIT_OK
        assert main(["portrait", "--out", str(out_b), "--jobs", "4"]) == EXIT_OK
        assert out_a.read_text() == out_b.read_text()

    def test_unwritable_path_is_io_error(self):
        assert main(["portrait", "--out", "/nonexistent-dir/p.csv"]) == EXIT_IO


class TestDumpConfig:
    def test_round_trip(self, tmp_path):
        dumped = tmp_path / "dumped.json"
        assert main(["verify", "--dump-config", str(dumped)]) == EXIT_OK
        reloaded = RunConfig.from_dict(json.loads(dumped.read_text()))
        assert reloaded == RunConfig()

    def test_round_trip_with_overrides(self, tmp_path):
        cfg = write_config(tmp_path, epsilon=3.5)
        dumped = tmp_path / "dumped.json"
        assert main(["verify", "--config", cfg, "--dump-config", str(dumped)]) == EXIT_OK
        reloaded = RunConfig.from_dict(json.loads(dumped.read_text()))
        assert reloaded.epsilon == 3.5

    def test_malformed_json_is_config_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["verify", "--config", str(bad)]) == EXIT_CONFIG
        assert "config" in capsys.readouterr().err
