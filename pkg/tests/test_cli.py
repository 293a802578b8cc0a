"""Command-line front end: config merging and subcommand smoke tests."""

import json

import numpy as np
import pytest

from inrfem.cli import main, build_config
from inrfem.geometry.io import save_obj
from inrfem.geometry.soup import icosphere


class TestConfigMerge:
    def test_json_overrides_defaults_flags_override_json(self, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps(
            {"base-level": 5, "boundary-level": 6, "gamma": 123.0}))

        class Args:
            config = str(cfg_file)
            base_level = None
            boundary_level = 7
            geometry = None
            case = None
            lambda_criteria = None
            gamma = None
            tol = None
            max_iter = None
            fd_step = None
            grid = None
            delta = None
            out = None
            seed = None
            workers = None

        cfg = build_config(Args())
        assert cfg.base_level == 5            # from file
        assert cfg.boundary_level == 7        # flag wins
        assert cfg.gamma == 123.0

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "bad.json"
        cfg_file.write_text(json.dumps({"verbosity": 3}))

        class Args:
            config = str(cfg_file)

        with pytest.raises(SystemExit):
            build_config(Args())


class TestSubcommands:
    def test_mesh_writes_dump(self, tmp_path, capsys):
        out = tmp_path / "mesh.txt"
        rc = main(["mesh", "--geometry", "ring", "--base-level", "3",
                   "--boundary-level", "4", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) > 10
        assert len(lines[0].split()) == 4

    def test_solve_reports_error_and_writes_vtk(self, tmp_path, capsys):
        out = tmp_path / "sol.vtk"
        rc = main(["solve", "--case", "linear-patch-2d", "--base-level", "3",
                   "--boundary-level", "4", "--out", str(out)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "L2_error=" in text
        err = float([l for l in text.splitlines()
                     if l.startswith("L2_error=")][0].split("=")[1])
        assert err < 1e-8
        assert out.read_text().startswith("# vtk DataFile")

    def test_convergence_table(self, capsys):
        rc = main(["convergence", "--case", "ring2d", "--levels", "4,5"])
        assert rc == 0
        text = capsys.readouterr().out
        rows = [l for l in text.splitlines() if "e-" in l or "e+" in l]
        assert len(rows) == 2

    def test_export_vtk(self, tmp_path):
        out = tmp_path / "mesh.vtk"
        rc = main(["export-vtk", "--case", "linear-patch-2d", "--geometry",
                   "ring", "--base-level", "3", "--boundary-level", "3",
                   "--out", str(out)])
        assert rc == 0
        assert "UNSTRUCTURED_GRID" in out.read_text()

    def test_bench_prints_counters(self, tmp_path, capsys):
        p = tmp_path / "ico.obj"
        save_obj(icosphere(subdivisions=1, radius=0.5), str(p))
        rc = main(["bench", "--models", f"soup:{p}", "--base-level", "3",
                   "--boundary-level", "3"])
        assert rc == 0
        text = capsys.readouterr().out
        assert "triangle_visits=" in text and "leaves=" in text

    def test_geom_metrics_self_oracle(self, tmp_path, capsys):
        p = tmp_path / "ico.obj"
        save_obj(icosphere(subdivisions=2, radius=0.5), str(p))
        rc = main(["geom-metrics", "--geometry", f"soup:{p}", "--oracle",
                   str(p), "--base-level", "3", "--boundary-level", "3",
                   "--grid", "24", "--delta", "0.05"])
        assert rc == 0
        text = capsys.readouterr().out
        nmse = float([l for l in text.splitlines()
                      if l.startswith("NMSE_delta=")][0].split("=")[1])
        mcs = float([l for l in text.splitlines()
                     if l.startswith("mean_cosine_similarity=")][0]
                    .split("=")[1].split()[0])
        assert nmse == 0.0
        assert mcs == pytest.approx(1.0, abs=1e-12)
