"""Incomplete, 2:1-balanced quadtree/octree over an implicit geometry.

Leaves are keyed by (level, integer anchor) on the 2^boundary_level index
grid.  Balancing is enforced across faces, edges and corners (stronger
than the face-only requirement), which keeps hanging-node constraints to
simple midpoint/face-center averages.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import EmptyDomain

MAX_LEVEL_2D = 21
MAX_LEVEL_3D = 14

_GAUSS1D = np.array([-1.0, 1.0]) / np.sqrt(3.0)  # 2-pt rule on [-1, 1]


@dataclass
class MeshConfig:
    base_level: int
    boundary_level: int
    dim: int = 3
    lambda_criteria: float = 1.0
    gauss_order: int = 2
    domain: tuple = (-1.0, 1.0)

    def __post_init__(self):
        cap = MAX_LEVEL_2D if self.dim == 2 else MAX_LEVEL_3D
        if not (1 <= self.base_level <= self.boundary_level <= cap):
            raise ValueError(
                f"need 1 <= base {self.base_level} <= boundary "
                f"{self.boundary_level} <= {cap}")
        if not 0.0 < self.lambda_criteria <= 1.0:
            raise ValueError("lambda_criteria must lie in (0, 1]")
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")


def corner_offsets(dim):
    """Unit-cube corner offsets, x fastest: index bit k is axis k."""
    n = 1 << dim
    return np.array([[(i >> k) & 1 for k in range(dim)] for i in range(n)],
                    dtype=np.int64)


def _morton(anchors, max_level):
    key = np.zeros(len(anchors), dtype=np.uint64)
    a = anchors.astype(np.uint64)
    d = anchors.shape[1]
    for bit in range(max_level):
        for ax in range(d):
            key |= ((a[:, ax] >> np.uint64(bit)) & np.uint64(1)) << np.uint64(
                bit * d + ax)
    return key


def balance_2to1(levels, anchors, max_level, base_level):
    """Minimal superset refinement so adjacent leaves differ by <= 1 level.

    Adjacency includes edge/corner contact.  Idempotent.
    """
    dim = anchors.shape[1]
    extent = 1 << max_level
    leafset = {}
    for lvl, a in zip(levels.tolist(), map(tuple, anchors.tolist())):
        leafset[(lvl, a)] = True

    def find(p):
        # containing leaf of integer point p, or None
        for lvl in range(max_level, base_level - 1, -1):
            shift = max_level - lvl
            a = tuple((c >> shift) << shift for c in p)
            if (lvl, a) in leafset:
                return lvl, a
        return None

    offs = corner_offsets(dim)
    dirs = [tuple(v) for v in np.stack(np.meshgrid(
        *[[-1, 0, 1]] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
        if any(v)]

    queue = list(leafset.keys())
    while queue:
        lvl, a = queue.pop()
        if (lvl, a) not in leafset:
            continue
        size = 1 << (max_level - lvl)
        for dvec in dirs:
            p = []
            bad = False
            for k, s in enumerate(dvec):
                if s < 0:
                    c = a[k] - 1
                elif s > 0:
                    c = a[k] + size
                else:
                    c = a[k]
                if c < 0 or c >= extent:
                    bad = True
                    break
                p.append(c)
            if bad:
                continue
            nb = find(tuple(p))
            if nb is None or nb[0] >= lvl - 1:
                continue
            # neighbor too coarse: split it
            nlvl, na = nb
            del leafset[nb]
            csize = 1 << (max_level - nlvl - 1)
            for off in offs:
                child = (nlvl + 1, tuple(na[k] + off[k] * csize
                                         for k in range(dim)))
                leafset[child] = True
                queue.append(child)
            queue.append((lvl, a))  # re-check this leaf against new children
    out_levels = np.array([k[0] for k in leafset], dtype=np.int64)
    out_anchors = np.array([k[1] for k in leafset], dtype=np.int64)
    order = np.lexsort((out_levels, _morton(out_anchors, max_level)))
    return out_levels[order], out_anchors[order]


class IncompleteOctree:
    """Leaf set plus deduplicated node table and hanging-node constraints."""

    def __init__(self, levels, anchors, cfg):
        self.cfg = cfg
        self.dim = cfg.dim
        self.max_level = cfg.boundary_level
        order = np.lexsort((levels, _morton(anchors, self.max_level)))
        self.levels = np.asarray(levels, dtype=np.int64)[order]
        self.anchors = np.asarray(anchors, dtype=np.int64)[order]
        self.lo = float(cfg.domain[0])
        self.hi = float(cfg.domain[1])
        self.h_min = (self.hi - self.lo) / (1 << self.max_level)
        self._index = {(int(l), tuple(a)): i for i, (l, a) in
                       enumerate(zip(self.levels, self.anchors.tolist()))}
        self._build_nodes()

    # ---------------- basic queries ----------------

    def __len__(self):
        return len(self.levels)

    def leaf_size_int(self, i=None):
        lv = self.levels if i is None else self.levels[i]
        return (np.int64(1) << (self.max_level - lv))

    def leaf_size(self, i=None):
        return self.leaf_size_int(i) * self.h_min

    def leaf_origin(self, i=None):
        a = self.anchors if i is None else self.anchors[i]
        return self.lo + a * self.h_min

    def find_leaf(self, p_int):
        """Index of the leaf containing integer grid point, or -1."""
        extent = 1 << self.max_level
        if any(c < 0 or c >= extent for c in p_int):
            return -1
        for lvl in range(self.max_level, self.cfg.base_level - 1, -1):
            shift = self.max_level - lvl
            a = tuple((int(c) >> shift) << shift for c in p_int)
            idx = self._index.get((lvl, a))
            if idx is not None:
                return idx
        return -1

    def locate_point(self, x):
        """Leaf containing physical point x (ties to the lower cell), or -1."""
        extent = 1 << self.max_level
        p = np.floor((np.asarray(x, dtype=float) - self.lo) / self.h_min)
        p = np.clip(p, 0, extent - 1).astype(np.int64)
        return self.find_leaf(tuple(p.tolist()))

    def neighbor(self, i, axis, side):
        """Leaf just across face (axis, side) near the low corner, or -1."""
        a = self.anchors[i].copy()
        s = int(self.leaf_size_int(i))
        if side > 0:
            a[axis] += s
        else:
            a[axis] -= 1
        return self.find_leaf(tuple(a.tolist()))

    # ---------------- nodes + hanging constraints ----------------

    def _build_nodes(self):
        dim = self.dim
        offs = corner_offsets(dim)
        sizes = self.leaf_size_int()[:, None, None]
        corners = self.anchors[:, None, :] + offs[None] * sizes
        flat = corners.reshape(-1, dim)
        nodes, inv = np.unique(flat, axis=0, return_inverse=True)
        self.nodes = nodes                      # (n_nodes, dim) int coords
        self.conn = inv.reshape(len(self), 1 << dim)
        self.node_coords = self.lo + nodes * self.h_min
        self._find_hanging()

    def _find_hanging(self):
        """Constrain each hanging node by multilinear interpolation in the
        coarser neighbor it hangs on."""
        dim = self.dim
        node_id = {tuple(n): i for i, n in enumerate(self.nodes.tolist())}
        constraints = {}
        dirs = [tuple(v) for v in np.stack(np.meshgrid(
            *[[-1, 0, 1]] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
            if any(v)]
        extent = 1 << self.max_level
        for i in range(len(self)):
            lvl = int(self.levels[i])
            a = self.anchors[i]
            s = int(self.leaf_size_int(i))
            for dvec in dirs:
                p = []
                ok = True
                for k, sv in enumerate(dvec):
                    c = int(a[k]) - 1 if sv < 0 else (
                        int(a[k]) + s if sv > 0 else int(a[k]))
                    if c < 0 or c >= extent:
                        ok = False
                        break
                    p.append(c)
                if not ok:
                    continue
                j = self.find_leaf(tuple(p))
                if j < 0 or self.levels[j] != lvl - 1:
                    continue
                # corners of leaf i lying on the closure of leaf j
                na = self.anchors[j]
                ns = int(self.leaf_size_int(j))
                for ci in self.conn[i]:
                    v = self.nodes[ci]
                    t = (v - na) / ns
                    if np.any(t < 0) or np.any(t > 1):
                        continue
                    if np.all((t == 0) | (t == 1)):
                        continue  # genuine corner of the coarse leaf
                    if ci in constraints:
                        continue
                    masters = []
                    for off in corner_offsets(dim):
                        w = 1.0
                        for k in range(dim):
                            w *= t[k] if off[k] else (1.0 - t[k])
                        if w > 0:
                            mk = tuple((na + off * ns).tolist())
                            masters.append((node_id[mk], w))
                    constraints[int(ci)] = masters
        # resolve chains: masters must themselves be unconstrained
        changed = True
        while changed:
            changed = False
            for slave, masters in list(constraints.items()):
                if any(m in constraints for m, _ in masters):
                    new = {}
                    for m, w in masters:
                        if m in constraints:
                            for mm, ww in constraints[m]:
                                new[mm] = new.get(mm, 0.0) + w * ww
                        else:
                            new[m] = new.get(m, 0.0) + w
                    constraints[slave] = list(new.items())
                    changed = True
        self.hanging = constraints

    def prolongation(self):
        """Sparse map from free (non-hanging) nodes to all nodes."""
        n = len(self.nodes)
        free = np.array(sorted(set(range(n)) - set(self.hanging)), dtype=np.int64)
        col_of = {int(f): c for c, f in enumerate(free)}
        rows, cols, vals = [], [], []
        for f in free:
            rows.append(int(f))
            cols.append(col_of[int(f)])
            vals.append(1.0)
        for slave, masters in self.hanging.items():
            for m, w in masters:
                rows.append(slave)
                cols.append(col_of[int(m)])
                vals.append(w)
        T = sparse.csr_matrix((vals, (rows, cols)), shape=(n, len(free)))
        return T, free

    # ---------------- sampling helpers ----------------

    def leaf_gauss_points(self, order=2):
        """Tensor Gauss points per leaf: (n_leaf, n_gp, dim) plus weights."""
        return _tensor_gauss(self.leaf_origin(), self.leaf_size(), self.dim, order)

    def dump(self, markers=None):
        """Debug dump, one Morton-sorted line per leaf:
        'level anchor_x anchor_y [anchor_z] marker'."""
        if markers is not None:
            from .classify import Marker
        lines = []
        for i, (lvl, a) in enumerate(zip(self.levels, self.anchors)):
            cols = [str(int(lvl))] + [str(int(c)) for c in a]
            if markers is not None:
                cols.append(Marker(int(markers[i])).name)
            lines.append(" ".join(cols))
        return "\n".join(lines) + "\n"


def gauss_points_1d(order):
    pts, wts = np.polynomial.legendre.leggauss(order)
    return pts, wts


def _tensor_gauss(origins, sizes, dim, order):
    pts1, wts1 = gauss_points_1d(order)
    ref = np.stack(np.meshgrid(*[pts1] * dim, indexing="ij"),
                   axis=-1).reshape(-1, dim)
    wref = np.prod(np.stack(np.meshgrid(*[wts1] * dim, indexing="ij"),
                            axis=-1).reshape(-1, dim), axis=1)
    # map [-1,1]^d to each leaf cube
    loc = 0.5 * (ref + 1.0)                       # [0,1]^d
    sizes = np.asarray(sizes, dtype=float).reshape(-1, 1, 1)
    pts = origins[:, None, :] + loc[None] * sizes
    wts = wref[None] * (sizes[:, :, 0] / 2.0) ** dim
    return pts, wts


def build_octree(geom, cfg):
    """Adaptively refined leaf set covering the geometry.

    A leaf refines (until boundary_level) when its corner/Gauss samples
    change sign or come within one leaf diagonal of the surface; leaves
    whose samples are all outside and far are pruned.  Retention requires
    at least one strictly-inside sample.
    """
    dim = cfg.dim
    lo, hi = cfg.domain
    maxl = cfg.boundary_level
    h_min = (hi - lo) / (1 << maxl)
    sqrt_d = np.sqrt(dim)
    offs = corner_offsets(dim).astype(float)
    g1 = 0.5 + 0.5 * _GAUSS1D
    goffs = np.stack(np.meshgrid(*[g1] * dim, indexing="ij"),
                     axis=-1).reshape(-1, dim)
    sample_offs = np.vstack([offs, goffs])       # fractions of leaf size

    n0 = 1 << cfg.base_level
    grid = np.stack(np.meshgrid(*[np.arange(n0)] * dim, indexing="ij"),
                    axis=-1).reshape(-1, dim)
    anchors = grid * (1 << (maxl - cfg.base_level))

    keep_levels = []
    keep_anchors = []
    child_offs = corner_offsets(dim)
    for lvl in range(cfg.base_level, maxl + 1):
        if len(anchors) == 0:
            break
        size_int = 1 << (maxl - lvl)
        h = size_int * h_min
        diag = h * sqrt_d
        pts = (lo + anchors * h_min)[:, None, :] + sample_offs[None] * h
        # the refine/retain decisions only compare against 0 and diag, so a
        # distance field exact within slightly more than diag suffices
        f = geom.signed_distance_batch_clipped(
            pts.reshape(-1, dim), 1.001 * diag).reshape(len(anchors), -1)
        fmin = f.min(axis=1)
        fmax = f.max(axis=1)
        absmin = np.abs(f).min(axis=1)
        has_inside = fmin < 0
        sign_change = (fmin < 0) & (fmax >= 0)
        near = absmin < diag
        if lvl < maxl:
            refine = sign_change | near
            retain = has_inside & ~refine
        else:
            refine = np.zeros(len(anchors), dtype=bool)
            retain = has_inside
        if retain.any():
            keep_levels.append(np.full(int(retain.sum()), lvl, dtype=np.int64))
            keep_anchors.append(anchors[retain])
        if refine.any():
            half = size_int >> 1
            parents = anchors[refine]
            anchors = (parents[:, None, :] + child_offs[None] * half).reshape(
                -1, dim)
        else:
            anchors = np.zeros((0, dim), dtype=np.int64)

    if not keep_levels:
        raise EmptyDomain("no leaf intersects the geometry")
    levels = np.concatenate(keep_levels)
    anchors = np.vstack(keep_anchors)
    levels, anchors = balance_2to1(levels, anchors, maxl, cfg.base_level)
    return IncompleteOctree(levels, anchors, cfg)
