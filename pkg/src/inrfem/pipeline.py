"""End-to-end orchestration: geometry -> octree -> classify -> assemble ->
solve -> metrics, plus the convergence and benchmark studies."""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownCase
from .geometry import Sphere, Annulus2D, Gyroid
from .geometry.io import load_soup
from .geometry.soup import TriangleSoup, rescale_soup, icosphere
from .inr.model import InrModel, load_inrw
from .inr.cache import GradientCache
from .octree import (MeshConfig, build_octree, classify_elements,
                     extract_surrogate_boundary, attach_distance_vectors,
                     Marker, in_surrogate)
from .fem import (Material, assemble_volume, assemble_sbm_faces,
                  apply_strong_dirichlet, reduce_hanging, get_case,
                  displacement, body_force_from_manufactured)
from .solver import SolverConfig, solve

RING_CENTER = (1.0, 1.0)
RING_INNER = 0.25
RING_OUTER = 1.0


@dataclass
class RunConfig:
    geometry: str = ""            # "sphere" | "ring" | "gyroid" | "soup:P" | "inr:P"
    case: str = "linear-patch"
    base_level: int = 3
    boundary_level: int = 5
    lambda_criteria: float = 1.0
    gamma: float = 0.0            # 0 -> material default
    tol: float = 1e-10
    max_iter: int = 0
    fd_step: float = 5e-4
    grid: int = 128
    delta: float = 2.0 ** -7
    out: str = ""
    seed: int = 0
    workers: int = 1


@dataclass
class RunResult:
    octree: object
    markers: np.ndarray
    faces: object
    solution: np.ndarray          # full nodal vector, hanging nodes filled
    solve_report: object
    timings: dict = field(default_factory=dict)
    eval_counts: dict = field(default_factory=dict)


def resolve_geometry(spec, fd_step=5e-4):
    """Geometry from a CLI-style source string.

    Returns (geometry, dim, domain interval).
    """
    if spec == "sphere":
        return Sphere(center=(0.0, 0.0, 0.0), radius=0.5), 3, (-1.0, 1.0)
    if spec == "ring":
        return (Annulus2D(RING_CENTER, RING_INNER, RING_OUTER), 2, (0.0, 2.0))
    if spec == "gyroid":
        return Gyroid(period=0.35), 3, (-1.0, 1.0)
    if spec.startswith("soup:"):
        soup = load_soup(spec[5:])
        soup, _ = rescale_soup(soup)
        return soup, 3, (-1.0, 1.0)
    if spec.startswith("inr:"):
        model = load_inrw(spec[4:])
        model.fd_step = fd_step
        return model, model.in_dim, (-1.0, 1.0)
    raise ValueError(f"unknown geometry source {spec!r}")


def default_geometry_for_case(name):
    if name in ("linear-patch", "icosphere"):
        soup = icosphere(subdivisions=3, radius=0.5) if name == "icosphere" \
            else None
        if soup is not None:
            return soup, 3, (-1.0, 1.0)
        return Sphere(center=(0.0, 0.0, 0.0), radius=0.5), 3, (-1.0, 1.0)
    if name in ("ring2d", "linear-patch-2d"):
        return (Annulus2D(RING_CENTER, RING_INNER, RING_OUTER), 2, (0.0, 2.0))
    if name == "gyroid":
        return Gyroid(period=0.35), 3, (-1.0, 1.0)
    raise UnknownCase(
        f"case {name!r} has no default geometry; pass one explicitly")


def _outer_ring_nodes(octree, r_outer=RING_OUTER, center=RING_CENTER):
    """Nodes of leaves cut by or outside the outer circle (strong band)."""
    c = np.asarray(center)
    corner_r = np.linalg.norm(
        octree.node_coords[octree.conn] - c, axis=-1)   # (n_leaf, 2^d)
    in_band = (corner_r >= r_outer - 1e-12).any(axis=1)
    return np.unique(octree.conn[in_band])


def _inner_face_mask(faces, center=RING_CENTER):
    """Faces belonging to the inner-circle surrogate boundary."""
    mid = 0.5 * (RING_INNER + RING_OUTER)
    r = np.linalg.norm(faces.gauss.mean(axis=1) - np.asarray(center), axis=1)
    return r < mid


def run_case(cfg, geom=None, material=None, case=None):
    """Full pipeline for a registered manufactured case.

    geom/material/case override the config-derived defaults (used heavily
    in tests).  Returns a RunResult; the solution vector covers all nodes
    with hanging values reconstructed from their masters.
    """
    case = case or get_case(cfg.case)
    if geom is None:
        if cfg.geometry:
            geom, dim, domain = resolve_geometry(cfg.geometry, cfg.fd_step)
        else:
            geom, dim, domain = default_geometry_for_case(case.name)
    else:
        dim = case.dim
        domain = (0.0, 2.0) if case.name == "ring2d" else (-1.0, 1.0)
    material = material or case.material

    timings = {}
    t0 = time.perf_counter()
    mesh_cfg = MeshConfig(cfg.base_level, cfg.boundary_level, dim=dim,
                          lambda_criteria=cfg.lambda_criteria, domain=domain)
    octree = build_octree(geom, mesh_cfg)
    markers, _ = classify_elements(octree, geom)
    timings["meshing"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    faces = extract_surrogate_boundary(octree, markers)
    cache = GradientCache() if isinstance(geom, InrModel) else None
    attach_distance_vectors(faces, geom, cache)
    timings["distance_vectors"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    body = body_force_from_manufactured(case, material)
    dirichlet = lambda x: displacement(case, x)
    system = assemble_volume(octree, material, body_force=body,
                             markers=markers)
    gamma = cfg.gamma if cfg.gamma > 0 else None
    face_mask = _inner_face_mask(faces) if case.name == "ring2d" else None
    system = system.add(assemble_sbm_faces(faces, dirichlet, material,
                                           gamma=gamma, face_mask=face_mask))
    timings["assembly"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    reduced, free, Tdof = reduce_hanging(system, octree)

    strong_nodes = []
    if case.name == "ring2d":
        strong_nodes = _outer_ring_nodes(octree)
    # orphan nodes of exterior-only leaves get pinned so jacobi stays valid
    touched = np.zeros(len(octree.nodes), dtype=bool)
    touched[np.unique(octree.conn[in_surrogate(markers)])] = True
    orphan = np.where(~touched)[0]

    pos = -np.ones(len(octree.nodes), dtype=np.int64)
    pos[free] = np.arange(len(free))
    dofs, values = [], []
    for node in strong_nodes:
        if pos[node] < 0:
            continue
        u = displacement(case, octree.node_coords[node][None])[0]
        for c in range(dim):
            dofs.append(pos[node] * dim + c)
            values.append(u[c])
    strong_set = set(int(n) for n in strong_nodes)
    for node in orphan:
        if pos[node] < 0 or int(node) in strong_set:
            continue
        for c in range(dim):
            dofs.append(pos[node] * dim + c)
            values.append(0.0)
    reduced = apply_strong_dirichlet(reduced, np.array(dofs, dtype=np.int64),
                                     np.array(values))
    timings["constraints"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    solver_cfg = SolverConfig(tol=cfg.tol, max_iter=cfg.max_iter)
    u_red, report = solve(reduced, solver_cfg)
    timings["solve"] = time.perf_counter() - t0

    u_full = Tdof @ u_red
    counts = {}
    if isinstance(geom, InrModel):
        counts["network_evaluations"] = geom.eval_count
    if isinstance(geom, TriangleSoup):
        counts["triangle_visits"] = geom.triangle_visits
    return RunResult(octree, markers, faces, u_full, report,
                     timings, counts)


def run_convergence_study(case_name, levels, cfg=None, geom=None,
                          boundary_offset=2):
    """Solve at each base level (boundary = base + offset); returns rows of
    (h, L2 error, observed order vs previous level)."""
    from .metrics import l2_field_error
    case = get_case(case_name)
    rows = []
    prev = None
    for lvl in levels:
        run_cfg = RunConfig(**{**(cfg.__dict__ if cfg else {}),
                               "case": case_name,
                               "base_level": lvl,
                               "boundary_level": lvl + boundary_offset})
        result = run_case(run_cfg, geom=geom)
        if geom is not None:
            g = geom
        elif run_cfg.geometry:
            g = resolve_geometry(run_cfg.geometry)[0]
        else:
            g = default_geometry_for_case(case_name)[0]
        err = l2_field_error(result.solution, lambda x: displacement(case, x),
                             result.octree, g, markers=result.markers)
        domain = result.octree.hi - result.octree.lo
        h = domain / (1 << lvl)
        order = np.log2(prev / err) if prev else float("nan")
        rows.append((h, err, float(order)))
        prev = err
    return rows


def run_bench(geometries, cfg):
    """Meshing/assembly wall time and work counters per geometry.

    geometries: list of (label, geometry) pairs; cfg fixes the mesh.
    """
    out = []
    for label, geom in geometries:
        if isinstance(geom, InrModel):
            geom.eval_count = 0
        if isinstance(geom, TriangleSoup):
            geom.triangle_visits = 0
        dim = getattr(geom, "dim", None) or getattr(geom, "in_dim", 3)
        mesh_cfg = MeshConfig(cfg.base_level, cfg.boundary_level, dim=dim,
                              lambda_criteria=cfg.lambda_criteria)
        t0 = time.perf_counter()
        octree = build_octree(geom, mesh_cfg)
        markers, _ = classify_elements(octree, geom)
        t_mesh = time.perf_counter() - t0
        mesh_evals = getattr(geom, "eval_count", None)
        mesh_visits = getattr(geom, "triangle_visits", None)

        t0 = time.perf_counter()
        material = Material.from_lame(1.0, 0.5)
        assemble_volume(octree, material, markers=markers)
        t_asm = time.perf_counter() - t0
        out.append({
            "label": label,
            "leaves": len(octree),
            "meshing_time": t_mesh,
            "assembly_time": t_asm,
            "network_evaluations": mesh_evals,
            "triangle_visits": mesh_visits,
        })
    return out
