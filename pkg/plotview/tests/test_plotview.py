import json
import math

import numpy as np
import pytest

from plotview import PlotSpec, SchemaError, load_trajectories, render_control_set, render_portrait
from plotview.cli import main
from plotview.render import gauge_boundary, gauge_value

S3 = math.sqrt(3.0)
TRIANGLE_SPEC = {"variant": "triangle",
                 "box": {"lower": [S3, 2.0], "upper": [S3, 1.0]}}


def spiral_csv(tmp_path, num_trajectories=16, steps=40):
    """Synthetic CSV obeying the trajectory contract: inward spirals with
    control samples strictly inside the triangle."""
    lines = ["traj_id,t,x1,x2,u1,u2,V"]
    for tid in range(num_trajectories):
        phase = 2.0 * math.pi * tid / num_trajectories
        for k in range(steps):
            t = 0.1 * k
            r = 3.0 * math.exp(-0.3 * t)
            x1 = r * math.cos(phase + t)
            x2 = r * math.sin(phase + t)
            u1 = 0.8 * math.cos(phase + 2 * t)
            u2 = 0.5 * math.sin(phase + 2 * t) - 0.2
            V = 0.5 * (x1 * x1 + x2 * x2)
            lines.append(f"{tid},{t},{x1},{x2},{u1},{u2},{V}")
    path = tmp_path / "portrait.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestLoad:
    def test_parses_ids_and_columns(self, tmp_path):
        tables = load_trajectories(spiral_csv(tmp_path, num_trajectories=3))
        assert sorted(tables) == [0, 1, 2]
        assert tables[0].x.shape == (40, 2)
        assert tables[0].u.shape == (40, 2)
        np.testing.assert_allclose(tables[0].V,
                                   0.5 * np.sum(tables[0].x ** 2, axis=1))

    def test_rejects_missing_file_header(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            load_trajectories(empty)

    def test_rejects_header_only(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text("traj_id,t,x1,x2,u1,u2,V\n")
        with pytest.raises(SchemaError, match="no data"):
            load_trajectories(p)

    def test_rejects_bad_column(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("traj_id,t,x1,q2,u1,V\n0,0,1,1,0.1,0.5\n")
        with pytest.raises(SchemaError, match="q2"):
            load_trajectories(p)

    def test_rejects_ragged_row(self, tmp_path):
        p = tmp_path / "ragged.csv"
        p.write_text("traj_id,t,x1,x2,u1,u2,V\n0,0,1,1,0.1\n")
        with pytest.raises(SchemaError, match="line 2"):
            load_trajectories(p)


class TestGaugeSpec:
    def test_triangle_vertices_on_boundary(self):
        for v in ([0.0, -2.0], [S3, 1.0], [-S3, 1.0]):
            assert gauge_value({"variant": "triangle"}, np.array(v)) == pytest.approx(1.0)

    def test_all_variants(self):
        u = np.array([0.5, -0.25])
        assert gauge_value({"variant": "weighted_l1", "weights": [1, 1]}, u) == 0.75
        assert gauge_value({"variant": "ellipsoid", "Q": [[1, 0], [0, 1]]}, u) == pytest.approx(
            np.linalg.norm(u))
        assert gauge_value({"variant": "box", "lower": [1, 1], "upper": [1, 1]}, u) == 0.5
        assert gauge_value({"variant": "polytope", "normals": [[1, 0], [-1, 0],
                                                               [0, 1], [0, -1]]},
                           u) == 0.5
        with pytest.raises(SchemaError):
            gauge_value({"variant": "nope"}, u)

    def test_boundary_points_on_level_set(self):
        pts = gauge_boundary({"variant": "triangle"})
        for p in pts[::37]:
            assert gauge_value({"variant": "triangle"}, p) == pytest.approx(1.0)


class TestRenderPortrait:
    def test_sixteen_curves(self, tmp_path):
        out = tmp_path / "portrait.png"
        count = render_portrait(PlotSpec(csv_path=str(spiral_csv(tmp_path)),
                                         out_png=str(out)))
        assert count == 16
        assert out.stat().st_size > 0

    def test_single_trajectory(self, tmp_path):
        out = tmp_path / "one.png"
        count = render_portrait(PlotSpec(
            csv_path=str(spiral_csv(tmp_path, num_trajectories=1)),
            out_png=str(out)))
        assert count == 1

    def test_deterministic_data(self, tmp_path):
        csv_path = spiral_csv(tmp_path)
        a = load_trajectories(csv_path)
        b = load_trajectories(csv_path)
        for tid in a:
            assert np.array_equal(a[tid].x, b[tid].x)


class TestRenderControlSet:
    def test_all_points_inside_triangle(self, tmp_path):
        out = tmp_path / "controls.png"
        report = render_control_set(PlotSpec(csv_path=str(spiral_csv(tmp_path)),
                                             out_png=str(out),
                                             overlay_cvs=TRIANGLE_SPEC))
        assert out.stat().st_size > 0
        assert report.outside_count == 0
        assert report.max_gauge_value <= 1.0 + 1e-9

    def test_box_only_overlay(self, tmp_path):
        out = tmp_path / "box.png"
        report = render_control_set(PlotSpec(
            csv_path=str(spiral_csv(tmp_path)),
            out_png=str(out),
            overlay_cvs={"variant": "box", "lower": [S3, 2.0], "upper": [S3, 1.0],
                         "box": {"lower": [S3, 2.0], "upper": [S3, 1.0]}}))
        assert report.outside_count == 0

    def test_requires_overlay(self, tmp_path):
        with pytest.raises(SchemaError, match="overlay"):
            render_control_set(PlotSpec(csv_path=str(spiral_csv(tmp_path)),
                                        out_png="x.png"))

    def test_rejects_wrong_control_dimension(self, tmp_path):
        p = tmp_path / "onectl.csv"
        p.write_text("traj_id,t,x1,x2,u1,V\n0,0.0,1.0,1.0,0.1,1.0\n")
        with pytest.raises(SchemaError, match="two control columns"):
            render_control_set(PlotSpec(csv_path=str(p), out_png="x.png",
                                        overlay_cvs=TRIANGLE_SPEC))


class TestCli:
    def test_happy_path(self, tmp_path, capsys):
        csv_path = spiral_csv(tmp_path)
        out = tmp_path / "p.png"
        controls = tmp_path / "c.png"
        status = main(["--csv", str(csv_path), "--out", str(out),
                       "--cvs", json.dumps(TRIANGLE_SPEC),
                       "--controls-out", str(controls)])
        assert status == 0
        assert out.exists() and controls.exists()
        assert "16 trajectories" in capsys.readouterr().out

    def test_malformed_csv_nonzero_exit(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope,nope\n1,2\n")
        status = main(["--csv", str(bad), "--out", str(tmp_path / "x.png")])
        assert status != 0
        assert "error" in capsys.readouterr().err

    def test_empty_csv_nonzero_exit(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("")
        assert main(["--csv", str(bad), "--out", str(tmp_path / "x.png")]) != 0

    def test_cvs_from_file(self, tmp_path):
        spec_file = tmp_path / "cvs.json"
        spec_file.write_text(json.dumps(TRIANGLE_SPEC))
        status = main(["--csv", str(spiral_csv(tmp_path)),
                       "--out", str(tmp_path / "p.png"),
                       "--cvs", f"@{spec_file}",
                       "--controls-out", str(tmp_path / "c.png")])
        assert status == 0

    def test_bad_cvs_json(self, tmp_path, capsys):
        status = main(["--csv", str(spiral_csv(tmp_path)),
                       "--out", str(tmp_path / "p.png"), "--cvs", "{bad"])
        assert status == 2
