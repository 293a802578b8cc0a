"""Accuracy metrics: narrow-band NMSE, distance-vector direction error,
L2 field error, surface error integral."""

import numpy as np

from .errors import NoPointsInBand
from .fem.basis import shape_values

CHARACTERISTIC_DIM = 2.0     # canonical cube side


def canonical_grid(resolution, dim):
    """Uniform point grid over the canonical cube [-1, 1]^dim."""
    axis = np.linspace(-1.0, 1.0, resolution)
    mesh = np.meshgrid(*[axis] * dim, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def nmse_delta(geom_inr, geom_oracle, delta, grid_resolution, dim=3,
               chunk=200_000):
    """Mean squared SDF error over grid points within |s_oracle| < delta,
    normalized by the characteristic dimension."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    pts = canonical_grid(grid_resolution, dim)
    total = 0.0
    count = 0
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        s = geom_oracle.signed_distance_batch(block)
        band = np.abs(s) < delta
        if not band.any():
            continue
        f = geom_inr.signed_distance_batch(block[band])
        total += float(np.sum((s[band] - f) ** 2))
        count += int(band.sum())
    if count == 0:
        raise NoPointsInBand(
            f"no grid points with |s| < {delta} at resolution {grid_resolution}")
    return total / count / CHARACTERISTIC_DIM


def gauss_point_direction_error(faces, oracle_soup, geom=None,
                                min_length=None):
    """Cosine similarity of attached distance vectors against the
    closest-point oracle of a triangle soup.

    Gauss points whose oracle distance to the surface is below
    ``min_length`` are excluded: the direction of a near-zero vector is
    ill-conditioned, so comparing it tells us nothing about the quality
    of the boundary map.  The default is 5% of the finest leaf size of
    the faces' octree.  The exclusion is gated on the oracle distance
    (not the attached vector's length), so a model cannot shrink its own
    vectors to dodge the comparison.

    Returns (mean cosine similarity, sd, fields dict).  fields carries the
    per-Gauss-point log10 magnitude error and similarity plus the count of
    skipped near-zero vectors.
    """
    if faces.dvec is None:
        from .errors import MissingDistanceVector
        raise MissingDistanceVector("faces carry no distance vectors")
    dim = faces.octree.dim
    if min_length is None:
        min_length = 0.05 * float(faces.octree.leaf_size().min())
    pts = faces.gauss.reshape(-1, dim)
    dvec = faces.dvec.reshape(-1, dim)
    s_true, closest = oracle_soup.signed_distance_with_point_batch(pts)
    d_true = closest - pts

    nv = np.linalg.norm(dvec, axis=1)
    nt = np.linalg.norm(d_true, axis=1)
    ok = (nv > 1e-12) & (nt > max(min_length, 1e-12))
    cos = np.sum(dvec[ok] * d_true[ok], axis=1) / (nv[ok] * nt[ok])
    cos = np.clip(cos, -1.0, 1.0)

    sdf_model = geom if geom is not None else None
    if sdf_model is not None:
        f = sdf_model.signed_distance_batch(pts)
        log_mag = np.log10(np.maximum(np.abs(f - s_true), 1e-300))
    else:
        log_mag = None

    mcs = float(np.mean(cos)) if len(cos) else float("nan")
    sd = float(np.std(cos)) if len(cos) else float("nan")
    fields = {
        "cosine": cos,
        "log10_magnitude_error": log_mag,
        "skipped": int(len(pts) - ok.sum()),
        "points": pts,
    }
    return mcs, sd, fields


def _field_at_local(solution, octree, leaf_idx, xi):
    """Interpolate a nodal vector field at local coords inside given leaves."""
    dim = octree.dim
    N = shape_values(xi)                              # (n, 2^d)
    conn = octree.conn[leaf_idx]                      # (n, 2^d)
    u_nodes = solution.reshape(-1, dim)[conn]         # (n, 2^d, d)
    return np.einsum("na,nad->nd", N, u_nodes)


def evaluate_field(solution, octree, points):
    """FE displacement at arbitrary points.

    Points outside every retained leaf use the nearest leaf's basis
    extrapolation.  Returns (values, n_outside).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(points)
    leaf = np.empty(n, dtype=np.int64)
    for k, p in enumerate(points):
        leaf[k] = octree.locate_point(p)
    outside = leaf < 0
    n_outside = int(outside.sum())
    if n_outside:
        origins = octree.leaf_origin()
        sizes = octree.leaf_size()[:, None]
        for k in np.where(outside)[0]:
            clamped = np.clip(points[k], origins, origins + sizes)
            d2 = np.sum((points[k] - clamped) ** 2, axis=1)
            leaf[k] = int(np.argmin(d2))
    origins = octree.leaf_origin(leaf)
    h = octree.leaf_size(leaf)
    xi = (points - origins) / h[:, None]
    return _field_at_local(solution, octree, leaf, xi), n_outside


def l2_field_error(solution, exact, octree, geom, markers=None, order=2):
    """sqrt of the inside-gated quadrature of ||u_h - u*||^2 over the leaves.

    exact: callable (n, d) -> (n, d).  Quadrature points whose signed
    distance is >= 0 are excluded (the exterior strip of the surrogate
    domain carries no physical solution).
    """
    dim = octree.dim
    pts, wts = octree.leaf_gauss_points(order)
    if markers is not None:
        from .octree.classify import in_surrogate
        keep = in_surrogate(markers)
        leaf_ids = np.where(keep)[0]
        pts, wts = pts[keep], wts[keep]
    else:
        leaf_ids = np.arange(len(octree))
    n_leaf, n_gp, _ = pts.shape
    flat = pts.reshape(-1, dim)
    inside = geom.inside_batch(flat)

    leaf_rep = np.repeat(leaf_ids, n_gp)
    origins = octree.leaf_origin(leaf_rep)
    h = octree.leaf_size(leaf_rep)
    xi = (flat - origins) / h[:, None]
    u_h = _field_at_local(solution, octree, leaf_rep, xi)
    u_ref = np.asarray(exact(flat), dtype=float)
    err2 = np.sum((u_h - u_ref) ** 2, axis=1)
    w = wts.reshape(-1)
    return float(np.sqrt(np.sum(w[inside] * err2[inside])))


def surface_error_integral(solution, octree, soup, reference,
                           return_outside_count=False):
    """Integral over the soup surface of |u_h - u_ref| via the 3-point
    edge-midpoint rule per triangle (degree-2 exact)."""
    tris = soup.vertices[soup.triangles]              # (T, 3, 3)
    mids = 0.5 * (tris + np.roll(tris, -1, axis=1))   # (T, 3, 3) edge midpoints
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)

    pts = mids.reshape(-1, 3)
    u_h, n_outside = evaluate_field(solution, octree, pts)
    u_ref = np.asarray(reference(pts), dtype=float)
    mag = np.linalg.norm(u_h - u_ref, axis=1).reshape(-1, 3)
    total = float(np.sum(areas / 3.0 * mag.sum(axis=1)))
    if return_outside_count:
        return total, n_outside
    return total


def von_mises(stress):
    """Von Mises invariant of (n, d, d) stress tensors (2D: plane strain
    in-plane components only)."""
    s = np.asarray(stress, dtype=float)
    d = s.shape[-1]
    tr = np.trace(s, axis1=-2, axis2=-1)
    if d == 3:
        dev = s - tr[..., None, None] / 3.0 * np.eye(3)
        return np.sqrt(1.5 * np.sum(dev * dev, axis=(-2, -1)))
    sxx, syy, sxy = s[..., 0, 0], s[..., 1, 1], s[..., 0, 1]
    return np.sqrt(sxx ** 2 - sxx * syy + syy ** 2 + 3.0 * sxy ** 2)


def element_stresses(solution, octree, material):
    """Element-center stress tensors (n_leaf, d, d) from the nodal field."""
    from .fem.basis import shape_gradients
    dim = octree.dim
    lam, mu = material.lame
    center = np.full((len(octree), dim), 0.5)
    G = shape_gradients(center) / octree.leaf_size()[:, None, None]
    u_nodes = solution.reshape(-1, dim)[octree.conn]   # (n, 2^d, d)
    grad = np.einsum("nja,nad->ndj", G, u_nodes)       # du_d/dx_j
    eps = 0.5 * (grad + np.swapaxes(grad, 1, 2))
    tr = np.trace(eps, axis1=1, axis2=2)
    return lam * tr[:, None, None] * np.eye(dim) + 2.0 * mu * eps
