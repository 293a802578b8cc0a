"""Element classification, surrogate-boundary extraction, distance vectors."""

from enum import IntEnum

import numpy as np

from .tree import corner_offsets, gauss_points_1d
from ..errors import DegenerateGradient
from ..inr.model import InrModel


class Marker(IntEnum):
    Interior = 0
    Exterior = 1
    TrueIntercepted = 2
    FalseIntercepted = 3


def classify_elements(octree, geom, lambda_criteria=None, order=None):
    """Per-leaf marker from the interior fraction of tensor Gauss points.

    Returns (markers, interior_counts).  With lambda_criteria = 1 the
    FalseIntercepted class is empty (fully-interior leaves are caught
    first), matching the surrogate-domain definition meas(T ∩ Ω) > 0.
    """
    lam = octree.cfg.lambda_criteria if lambda_criteria is None else lambda_criteria
    order = octree.cfg.gauss_order if order is None else order
    pts, _ = octree.leaf_gauss_points(order)
    n_gp = pts.shape[1]
    ins = geom.inside_batch(pts.reshape(-1, octree.dim)).reshape(
        len(octree), n_gp)
    counts = ins.sum(axis=1)
    markers = np.empty(len(octree), dtype=np.int64)
    lam_c = counts / n_gp
    markers[:] = Marker.TrueIntercepted
    markers[lam_c >= lam] = Marker.FalseIntercepted
    markers[counts == n_gp] = Marker.Interior
    markers[counts == 0] = Marker.Exterior
    return markers, counts


def in_surrogate(markers):
    return markers != Marker.Exterior


class SurrogateFaces:
    """Grid-aligned faces between the surrogate domain and the exterior.

    Arrays are ordered deterministically (owner Morton index, axis, side,
    subcell).  ``dvec`` stays None until attach_distance_vectors runs.
    """

    def __init__(self, octree, owner, axis, side, f_origin, f_size_int):
        self.octree = octree
        self.owner = np.asarray(owner, dtype=np.int64)
        self.axis = np.asarray(axis, dtype=np.int64)
        self.side = np.asarray(side, dtype=np.int64)
        self.f_origin = np.asarray(f_origin, dtype=np.int64).reshape(
            len(self.owner), octree.dim)
        self.f_size_int = np.asarray(f_size_int, dtype=np.int64)
        self.dvec = None
        self.flagged = np.zeros(len(self.owner), dtype=bool)
        self._build_quadrature()

    def __len__(self):
        return len(self.owner)

    def _build_quadrature(self, order=2):
        oc = self.octree
        dim = oc.dim
        pts1, wts1 = gauss_points_1d(order)
        loc1 = 0.5 * (pts1 + 1.0)
        n_gp = order ** (dim - 1)
        self.gauss = np.empty((len(self), n_gp, dim))
        self.weights = np.empty((len(self), n_gp))
        # reference tangential grid
        grids = np.meshgrid(*[loc1] * (dim - 1), indexing="ij")
        tan = np.stack([g.reshape(-1) for g in grids], axis=-1)  # (n_gp, dim-1)
        wgrids = np.meshgrid(*[wts1] * (dim - 1), indexing="ij")
        wtan = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=-1), axis=1)
        h = self.f_size_int * oc.h_min
        origin = oc.lo + self.f_origin * oc.h_min
        for ax in range(dim):
            sel = self.axis == ax
            if not sel.any():
                continue
            tang_axes = [k for k in range(dim) if k != ax]
            pts = np.repeat(origin[sel][:, None, :], n_gp, axis=1)
            for t, k in enumerate(tang_axes):
                pts[:, :, k] += tan[None, :, t] * h[sel, None]
            self.gauss[sel] = pts
            self.weights[sel] = wtan[None] * (h[sel, None] / 2.0) ** (dim - 1)

    @property
    def normals(self):
        n = np.zeros((len(self), self.octree.dim))
        n[np.arange(len(self)), self.axis] = self.side
        return n

    def areas(self):
        return (self.f_size_int * self.octree.h_min) ** (self.octree.dim - 1)

    def owner_h(self):
        """Edge length of each face's owner leaf (penalty scaling)."""
        return self.octree.leaf_size(self.owner)


def extract_surrogate_boundary(octree, markers):
    """Faces between surrogate-domain leaves and Exterior/absent regions.

    Outward normals point toward the exterior side.  Across a coarse face
    bordering finer neighbors, sub-faces are emitted at the finer size.
    """
    dim = octree.dim
    extent = 1 << octree.max_level
    sub_offs = corner_offsets(dim - 1) if dim > 1 else np.zeros((1, 0), np.int64)
    owner, axis_l, side_l, f_origin, f_size = [], [], [], [], []
    surro = in_surrogate(markers)
    for i in np.where(surro)[0]:
        a = octree.anchors[i]
        s = int(octree.leaf_size_int(i))
        lvl = int(octree.levels[i])
        for ax in range(dim):
            tang = [k for k in range(dim) if k != ax]
            for side in (-1, 1):
                plane = int(a[ax]) + (s if side > 0 else 0)
                probe_c = plane if side > 0 else plane - 1
                outside_domain = probe_c < 0 or probe_c >= extent
                half = s // 2
                # probe the across-region at child granularity
                probes = []
                if outside_domain:
                    neighbors = [-1] * max(1, 2 ** (dim - 1))
                else:
                    if half == 0 or lvl == octree.max_level:
                        sub = np.zeros((1, dim - 1), np.int64)
                        step = s
                    else:
                        sub = sub_offs
                        step = half
                    for so in sub:
                        p = [0] * dim
                        p[ax] = probe_c
                        for t, k in enumerate(tang):
                            p[k] = int(a[k]) + int(so[t]) * step
                        probes.append(tuple(p))
                    neighbors = [octree.find_leaf(p) for p in probes]
                uniq = set(neighbors)
                if len(uniq) == 1:
                    j = neighbors[0]
                    if j == i:
                        continue
                    if j >= 0 and surro[j]:
                        continue
                    o = a.copy()
                    o[ax] = plane
                    owner.append(i)
                    axis_l.append(ax)
                    side_l.append(side)
                    f_origin.append(o)
                    f_size.append(s)
                else:
                    for p, j in zip(probes, neighbors):
                        if j >= 0 and surro[j]:
                            continue
                        o = np.array(p, dtype=np.int64)
                        o[ax] = plane
                        owner.append(i)
                        axis_l.append(ax)
                        side_l.append(side)
                        f_origin.append(o)
                        f_size.append(half)
    return SurrogateFaces(octree, owner, axis_l, side_l,
                          np.array(f_origin, dtype=np.int64).reshape(-1, dim),
                          f_size)


def attach_distance_vectors(faces, geom, cache=None):
    """Populate per-Gauss-point distance vectors on the surrogate faces.

    Uses the shared gradient cache for neural models.  Faces whose landed
    point misses the surface by more than a quarter leaf are flagged for
    diagnostics rather than rejected.
    """
    oc = faces.octree
    n_face, n_gp, dim = faces.gauss.shape
    if hasattr(geom, "distance_vector_batch"):
        dvec = geom.distance_vector_batch(
            faces.gauss.reshape(-1, dim)).reshape(faces.gauss.shape)
    else:
        dvec = np.empty_like(faces.gauss)
        is_inr = isinstance(geom, InrModel)
        for fi in range(n_face):
            for gi in range(n_gp):
                q = faces.gauss[fi, gi]
                try:
                    if is_inr:
                        dvec[fi, gi] = geom.distance_vector(q, cache)
                    else:
                        dvec[fi, gi] = geom.distance_vector(q)
                except DegenerateGradient as exc:
                    raise DegenerateGradient(
                        f"face {fi} (owner leaf {int(faces.owner[fi])}, "
                        f"gauss point {gi}): {exc}") from exc
    faces.dvec = dvec
    landed = (faces.gauss + dvec).reshape(-1, dim)
    tol = 0.25 * oc.leaf_size(faces.owner)
    f_land = np.abs(geom.signed_distance_batch_clipped(
        landed, 1.001 * float(tol.max()))).reshape(n_face, n_gp)
    faces.flagged = (f_land > tol[:, None]).any(axis=1)
    return faces
