"""Command-line front end.

Subcommands: mesh, solve, convergence, geom-metrics, export-vtk, bench.
A JSON config file (--config) may supply any flag's value; explicit flags
win over the file.
"""

import argparse
import json
import sys

import numpy as np

from .pipeline import (RunConfig, run_case, run_convergence_study, run_bench,
                       resolve_geometry, default_geometry_for_case)
from .fem import get_case, displacement
from .octree import (MeshConfig, build_octree, classify_elements,
                     extract_surrogate_boundary, attach_distance_vectors)
from .inr.model import InrModel
from .inr.cache import GradientCache
from .metrics import nmse_delta, gauss_point_direction_error, l2_field_error
from .vtk import export_vtk

_FLAG_KEYS = ("geometry", "case", "base_level", "boundary_level",
              "lambda_criteria", "gamma", "tol", "max_iter", "fd_step",
              "grid", "delta", "out", "seed", "workers")


def _add_common(p):
    p.add_argument("--config", default=None, help="JSON run-config file")
    p.add_argument("--geometry", default=None,
                   help="sphere | ring | gyroid | soup:PATH | inr:PATH")
    p.add_argument("--case", default=None)
    p.add_argument("--base-level", type=int, default=None)
    p.add_argument("--boundary-level", type=int, default=None)
    p.add_argument("--lambda", dest="lambda_criteria", type=float,
                   default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--fd-step", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)


def build_config(args):
    """Merge defaults <- JSON config <- explicit flags."""
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
        for k, v in data.items():
            key = k.replace("-", "_")
            if key not in _FLAG_KEYS:
                raise SystemExit(f"unknown config key {k!r}")
            setattr(cfg, key, v)
    for key in _FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            setattr(cfg, key, v)
    return cfg


def _geometry(cfg):
    if cfg.geometry:
        return resolve_geometry(cfg.geometry, cfg.fd_step)
    return default_geometry_for_case(cfg.case)


def cmd_mesh(cfg):
    geom, dim, domain = _geometry(cfg)
    mesh_cfg = MeshConfig(cfg.base_level, cfg.boundary_level, dim=dim,
                          lambda_criteria=cfg.lambda_criteria, domain=domain)
    octree = build_octree(geom, mesh_cfg)
    markers, _ = classify_elements(octree, geom)
    text = octree.dump(markers)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"leaves={len(octree)} nodes={len(octree.nodes)}", file=sys.stderr)
    return 0


def cmd_solve(cfg):
    result = run_case(cfg)
    case = get_case(cfg.case)
    geom, _, _ = _geometry(cfg)
    err = l2_field_error(result.solution, lambda x: displacement(case, x),
                         result.octree, geom, markers=result.markers)
    print(f"case={cfg.case} leaves={len(result.octree)} "
          f"dofs={result.solution.size}")
    print(f"solver iterations={result.solve_report.iterations} "
          f"residual={result.solve_report.residual:.3e}")
    print(f"L2_error={err:.6e}")
    for phase, t in result.timings.items():
        print(f"time[{phase}]={t:.3f}s")
    if cfg.out:
        material = case.material
        export_vtk(result.octree, result.markers, result.solution,
                   material, cfg.out)
        print(f"wrote {cfg.out}")
    return 0


def cmd_convergence(cfg, levels):
    rows = run_convergence_study(cfg.case or "ring2d", levels, cfg=cfg)
    print(f"{'h':>12} {'L2_error':>14} {'order':>8}")
    for h, err, order in rows:
        otxt = f"{order:8.3f}" if np.isfinite(order) else "       -"
        print(f"{h:12.6g} {err:14.6e} {otxt}")
    return 0


def cmd_geom_metrics(cfg, oracle_path):
    from .geometry.io import load_soup
    from .geometry.soup import rescale_soup
    geom, dim, domain = _geometry(cfg)
    oracle = load_soup(oracle_path)
    oracle, _ = rescale_soup(oracle)
    nmse = nmse_delta(geom, oracle, cfg.delta, cfg.grid, dim=dim)
    mesh_cfg = MeshConfig(cfg.base_level, cfg.boundary_level, dim=dim,
                          lambda_criteria=cfg.lambda_criteria, domain=domain)
    octree = build_octree(geom, mesh_cfg)
    markers, _ = classify_elements(octree, geom)
    faces = extract_surrogate_boundary(octree, markers)
    cache = GradientCache() if isinstance(geom, InrModel) else None
    attach_distance_vectors(faces, geom, cache)
    mcs, sd, fields = gauss_point_direction_error(faces, oracle, geom=geom)
    print(f"NMSE_delta={nmse:.6e}")
    print(f"mean_cosine_similarity={mcs:.6f} sd={sd:.6f} "
          f"skipped={fields['skipped']}")
    if cfg.out:
        np.savez(cfg.out, cosine=fields["cosine"],
                 log10_magnitude_error=fields["log10_magnitude_error"],
                 points=fields["points"])
        print(f"wrote {cfg.out}")
    return 0


def cmd_export_vtk(cfg):
    geom, dim, domain = _geometry(cfg)
    mesh_cfg = MeshConfig(cfg.base_level, cfg.boundary_level, dim=dim,
                          lambda_criteria=cfg.lambda_criteria, domain=domain)
    octree = build_octree(geom, mesh_cfg)
    markers, _ = classify_elements(octree, geom)
    case = get_case(cfg.case)
    path = cfg.out or "mesh.vtk"
    export_vtk(octree, markers, None, case.material, path)
    print(f"wrote {path}")
    return 0


def cmd_bench(cfg, sources):
    geoms = []
    for src in sources:
        geom, _, _ = resolve_geometry(src, cfg.fd_step)
        geoms.append((src, geom))
    rows = run_bench(geoms, cfg)
    for row in rows:
        print(" ".join(f"{k}={v}" for k, v in row.items()))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="inrfem",
        description="Mesh-free elasticity on implicit geometries")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("mesh", "solve", "convergence", "geom-metrics",
                 "export-vtk", "bench"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "convergence":
            p.add_argument("--levels", default="4,5,6",
                           help="comma-separated base levels")
        if name == "geom-metrics":
            p.add_argument("--oracle", required=True,
                           help="triangle soup path for ground truth")
        if name == "bench":
            p.add_argument("--models", required=True,
                           help="comma-separated geometry sources")
    args = parser.parse_args(argv)
    cfg = build_config(args)
    np.random.seed(cfg.seed)

    if args.command == "mesh":
        return cmd_mesh(cfg)
    if args.command == "solve":
        return cmd_solve(cfg)
    if args.command == "convergence":
        levels = [int(s) for s in args.levels.split(",")]
        return cmd_convergence(cfg, levels)
    if args.command == "geom-metrics":
        return cmd_geom_metrics(cfg, args.oracle)
    if args.command == "export-vtk":
        return cmd_export_vtk(cfg)
    if args.command == "bench":
        return cmd_bench(cfg, args.models.split(","))
    return 2


if __name__ == "__main__":
    sys.exit(main())
