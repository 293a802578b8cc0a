"""Triangle-soup geometry: exact closest-point distance, ray-parity sign, BVH.

The soup acts both as an ImplicitGeometry provider (for meshing/assembly)
and as the ground-truth oracle for the accuracy metrics.
"""

import numpy as np

from .base import ImplicitGeometry, DomainTransform
from ..errors import AmbiguousSign, DegenerateBounds, EmptySoup

_DEGEN_AREA = 1e-14

# Fixed parity-ray direction: deliberately irrational-looking so axis-aligned
# faces are never hit edge-on first try.
_RAY_DIR = np.array([1.0, 0.5 ** 3, 0.25 ** 3])
_RAY_DIR = _RAY_DIR / np.linalg.norm(_RAY_DIR)
_MAX_RAY_RETRIES = 8

# deterministic perturbation directions for retries
_RETRY_DIRS = np.random.default_rng(20240917).normal(size=(_MAX_RAY_RETRIES, 3))
_RETRY_DIRS /= np.linalg.norm(_RETRY_DIRS, axis=1, keepdims=True)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def closest_point_on_triangles(p, a, b, c):
    """Closest point to p on each triangle (a, b, c); shapes broadcast.

    Vectorized form of the classic Ericson region test.  Returns an array
    with the broadcast shape of the inputs.
    """
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = _dot(ab, ap)
    d2 = _dot(ac, ap)
    bp = p - b
    d3 = _dot(ab, bp)
    d4 = _dot(ac, bp)
    cp = p - c
    d5 = _dot(ab, cp)
    d6 = _dot(ac, cp)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        t_ab = d1 / (d1 - d3)
        t_ac = d2 / (d2 - d6)
        t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        denom = va + vb + vc
        v_f = vb / denom
        w_f = vc / denom
    t_ab = np.nan_to_num(np.clip(t_ab, 0.0, 1.0))
    t_ac = np.nan_to_num(np.clip(t_ac, 0.0, 1.0))
    t_bc = np.nan_to_num(np.clip(t_bc, 0.0, 1.0))
    v_f = np.nan_to_num(v_f)
    w_f = np.nan_to_num(w_f)

    res = a + ab * v_f[..., None] + ac * w_f[..., None]
    done = np.zeros(res.shape[:-1], dtype=bool)

    cases = [
        ((d1 <= 0) & (d2 <= 0), a + 0.0 * ab),
        ((d3 >= 0) & (d4 <= d3), b + 0.0 * ab),
        ((vc <= 0) & (d1 >= 0) & (d3 <= 0), a + t_ab[..., None] * ab),
        ((d6 >= 0) & (d5 <= d6), c + 0.0 * ab),
        ((vb <= 0) & (d2 >= 0) & (d6 <= 0), a + t_ac[..., None] * ac),
        ((va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0),
         b + t_bc[..., None] * (c - b)),
    ]
    for mask, val in cases:
        use = mask & ~done
        res = np.where(use[..., None], np.broadcast_to(val, res.shape), res)
        done |= mask
    return res


class _Bvh:
    """Flat-array median-split BVH over triangle AABBs."""

    __slots__ = ("lo", "hi", "left", "right", "start", "count", "order",
                 "_n_nodes")

    def __init__(self, tri_lo, tri_hi, leaf_size=8):
        n = tri_lo.shape[0]
        self.order = np.arange(n)
        # generous upper bound on node count
        cap = max(1, 4 * n)
        self.lo = np.empty((cap, 3))
        self.hi = np.empty((cap, 3))
        self.left = np.full(cap, -1, dtype=np.int64)
        self.right = np.full(cap, -1, dtype=np.int64)
        self.start = np.full(cap, -1, dtype=np.int64)
        self.count = np.zeros(cap, dtype=np.int64)
        cent = 0.5 * (tri_lo + tri_hi)
        self._n_nodes = 0
        stack = [(0, n, self._alloc())]
        while stack:
            s, e, node = stack.pop()
            idx = self.order[s:e]
            self.lo[node] = tri_lo[idx].min(axis=0)
            self.hi[node] = tri_hi[idx].max(axis=0)
            if e - s <= leaf_size:
                self.start[node] = s
                self.count[node] = e - s
                continue
            axis = int(np.argmax(self.hi[node] - self.lo[node]))
            key = cent[idx, axis]
            mid = (e - s) // 2
            part = np.argpartition(key, mid)
            self.order[s:e] = idx[part]
            l, r = self._alloc(), self._alloc()
            self.left[node] = l
            self.right[node] = r
            stack.append((s, s + mid, l))
            stack.append((s + mid, e, r))

    def _alloc(self):
        i = self._n_nodes
        self._n_nodes += 1
        return i

    def box_dist2(self, node, p):
        d = np.maximum(np.maximum(self.lo[node] - p, p - self.hi[node]), 0.0)
        return float(d @ d)


class TriangleSoup(ImplicitGeometry):
    """Closest-point distance oracle over a set of 3D triangles.

    Degenerate (zero-area) triangles are kept for bookkeeping but excluded
    from closest-point candidates and from the parity test.
    """

    dim = 3
    exact = True

    def __init__(self, vertices, triangles):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if self.triangles.shape[0] == 0:
            raise EmptySoup("no triangles")
        if self.triangles.max(initial=-1) >= len(self.vertices):
            raise IndexError("triangle index out of range")
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("non-finite vertex coordinates")

        tri = self.vertices[self.triangles]
        self._a, self._b, self._c = tri[:, 0], tri[:, 1], tri[:, 2]
        cross = np.cross(self._b - self._a, self._c - self._a)
        self._area2 = np.linalg.norm(cross, axis=1)
        self._valid = self._area2 > _DEGEN_AREA
        if not self._valid.any():
            raise EmptySoup("all triangles degenerate")
        with np.errstate(invalid="ignore", divide="ignore"):
            self._fnormal = cross / self._area2[:, None]
        self._fnormal[~self._valid] = 0.0

        lo = tri.min(axis=1)
        hi = tri.max(axis=1)
        vi = np.where(self._valid)[0]
        self._bvh_map = vi
        self._bvh = _Bvh(lo[vi], hi[vi])

        # bench counter: triangles examined by distance queries
        self.triangle_visits = 0
        self._vnormal = None

    # ---------------- closest point ----------------

    def closest_point_brute(self, x):
        """All-triangles scan; the independent oracle for the BVH path."""
        x = np.asarray(x, dtype=float)
        vi = self._valid
        pts = closest_point_on_triangles(x, self._a[vi], self._b[vi], self._c[vi])
        self.triangle_visits += int(vi.sum())
        d2 = np.sum((pts - x) ** 2, axis=1)
        k = int(np.argmin(d2))
        return float(np.sqrt(d2[k])), pts[k], int(np.where(vi)[0][k])

    def closest_point(self, x):
        """BVH-accelerated closest point; returns (distance, point, triangle)."""
        x = np.asarray(x, dtype=float)
        bvh = self._bvh
        best_d2 = np.inf
        best_pt = None
        best_tri = -1
        stack = [0]
        while stack:
            node = stack.pop()
            if bvh.box_dist2(node, x) >= best_d2:
                continue
            if bvh.start[node] >= 0:
                idx = bvh.order[bvh.start[node]:bvh.start[node] + bvh.count[node]]
                gi = self._bvh_map[idx]
                pts = closest_point_on_triangles(x, self._a[gi], self._b[gi], self._c[gi])
                self.triangle_visits += len(gi)
                d2 = np.sum((pts - x) ** 2, axis=1)
                k = int(np.argmin(d2))
                if d2[k] < best_d2:
                    best_d2 = float(d2[k])
                    best_pt = pts[k]
                    best_tri = int(gi[k])
            else:
                l, r = bvh.left[node], bvh.right[node]
                dl = bvh.box_dist2(l, x)
                dr = bvh.box_dist2(r, x)
                # visit nearer child last (popped first)
                if dl < dr:
                    stack.append(r)
                    stack.append(l)
                else:
                    stack.append(l)
                    stack.append(r)
        return float(np.sqrt(best_d2)), best_pt, best_tri

    def closest_point_batch_brute(self, pts, chunk=262144):
        """Vectorized all-triangles closest points; oracle for the fast path."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        n = len(pts)
        out_d = np.empty(n)
        out_p = np.empty((n, 3))
        out_t = np.empty(n, dtype=np.int64)
        vi = np.where(self._valid)[0]
        m = len(vi)
        a, b, c = self._a[vi], self._b[vi], self._c[vi]
        rows = max(1, chunk // max(m, 1))
        for s in range(0, n, rows):
            p = pts[s:s + rows, None, :]
            cand = closest_point_on_triangles(p, a[None], b[None], c[None])
            d2 = np.sum((cand - p) ** 2, axis=2)
            k = np.argmin(d2, axis=1)
            r = np.arange(len(k))
            out_d[s:s + rows] = np.sqrt(d2[r, k])
            out_p[s:s + rows] = cand[r, k]
            out_t[s:s + rows] = vi[k]
            self.triangle_visits += m * len(k)
        return out_d, out_p, out_t

    def _centroid_tree(self):
        if getattr(self, "_kd", None) is None:
            from scipy.spatial import cKDTree
            vi = np.where(self._valid)[0]
            tri = np.stack([self._a[vi], self._b[vi], self._c[vi]], axis=1)
            cent = tri.mean(axis=1)
            self._kd_map = vi
            self._kd_rad = np.linalg.norm(tri - cent[:, None, :],
                                          axis=2).max(axis=1)
            self._kd = cKDTree(cent)
        return self._kd

    def closest_point_batch(self, pts, chunk=262144):
        """Closest points for many queries via a centroid KD-tree prefilter.

        A triangle can beat the best candidate only if its centroid lies
        within (distance to nearest centroid) + 2 * max triangle radius, so
        querying that ball is exact, not approximate.
        """
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        n = len(pts)
        if n == 0:
            return np.zeros(0), np.zeros((0, 3)), np.zeros(0, dtype=np.int64)
        kd = self._centroid_tree()
        max_rad = float(self._kd_rad.max())
        d_cent, _ = kd.query(pts)
        groups = kd.query_ball_point(pts, d_cent + 2.0 * max_rad + 1e-12)

        counts = np.array([len(g) for g in groups], dtype=np.int64)
        pt_idx = np.repeat(np.arange(n), counts)
        cand = np.concatenate([np.asarray(g, dtype=np.int64)
                               for g in groups]) if counts.sum() else \
            np.zeros(0, dtype=np.int64)
        self.triangle_visits += int(counts.sum())

        gi = self._kd_map[cand]
        best_d2 = np.full(n, np.inf)
        pair_d2 = np.empty(len(cand))
        pair_cp = np.empty((len(cand), 3))
        for s in range(0, len(cand), chunk):
            sl = slice(s, s + chunk)
            q = pts[pt_idx[sl]]
            cp = closest_point_on_triangles(q, self._a[gi[sl]],
                                            self._b[gi[sl]], self._c[gi[sl]])
            pair_cp[sl] = cp
            pair_d2[sl] = np.sum((cp - q) ** 2, axis=1)
        np.minimum.at(best_d2, pt_idx, pair_d2)
        win = pair_d2 <= best_d2[pt_idx]
        first = np.full(n, -1, dtype=np.int64)
        w = np.where(win)[0][::-1]
        first[pt_idx[w]] = w          # reversed, so lowest pair index wins
        return (np.sqrt(best_d2), pair_cp[first], gi[first])

    # ---------------- inside/outside ----------------

    def _parity_grid(self, d):
        """Uniform 2D bucket grid over triangle projections normal to d.

        Returns (basis eu/ev, grid geometry, CSR-style cell -> triangle
        lists).  Candidate lookup per point is then O(bucket size).
        """
        vi = np.where(self._valid)[0]
        m = len(vi)
        ref = np.array([0.0, 0.0, 1.0]) if abs(d[2]) < 0.9 else \
            np.array([1.0, 0.0, 0.0])
        eu = np.cross(d, ref)
        eu /= np.linalg.norm(eu)
        ev = np.cross(d, eu)

        U = np.stack([self._a[vi] @ eu, self._b[vi] @ eu, self._c[vi] @ eu],
                     axis=1)
        V = np.stack([self._a[vi] @ ev, self._b[vi] @ ev, self._c[vi] @ ev],
                     axis=1)
        pad = 1e-8
        u0, u1 = U.min(axis=1) - pad, U.max(axis=1) + pad
        v0, v1 = V.min(axis=1) - pad, V.max(axis=1) + pad
        glo = np.array([u0.min(), v0.min()])
        ghi = np.array([u1.max(), v1.max()])
        nc = max(1, int(np.sqrt(m / 2.0)))
        cell = np.maximum((ghi - glo) / nc, 1e-30)

        iu0 = np.clip(((u0 - glo[0]) / cell[0]).astype(np.int64), 0, nc - 1)
        iu1 = np.clip(((u1 - glo[0]) / cell[0]).astype(np.int64), 0, nc - 1)
        iv0 = np.clip(((v0 - glo[1]) / cell[1]).astype(np.int64), 0, nc - 1)
        iv1 = np.clip(((v1 - glo[1]) / cell[1]).astype(np.int64), 0, nc - 1)
        su = iu1 - iu0 + 1
        sv = iv1 - iv0 + 1
        total = su * sv
        tri_rep = np.repeat(np.arange(m), total)
        # local offset within each triangle's cell range
        offs = np.arange(int(total.sum())) - np.repeat(
            np.concatenate([[0], np.cumsum(total)[:-1]]), total)
        cu = iu0[tri_rep] + offs % su[tri_rep]
        cv = iv0[tri_rep] + offs // su[tri_rep]
        cid = cu * nc + cv
        order = np.argsort(cid, kind="stable")
        cid_sorted = cid[order]
        tri_sorted = tri_rep[order]
        starts = np.searchsorted(cid_sorted, np.arange(nc * nc + 1))
        return eu, ev, glo, cell, nc, starts, tri_sorted, vi

    def _ray_parity(self, pts, on_ambiguous="raise"):
        """Parity of crossings along a fixed ray per point -> inside flags."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        n = len(pts)
        inside = np.zeros(n, dtype=bool)
        pending = np.arange(n)
        eps = 1e-10
        margin = 1e-9
        for attempt in range(_MAX_RAY_RETRIES + 1):
            if len(pending) == 0:
                return inside
            if attempt == 0:
                d = _RAY_DIR
            else:
                d = _RAY_DIR + 0.1 * attempt * _RETRY_DIRS[attempt - 1]
                d = d / np.linalg.norm(d)
            eu, ev, glo, cell, nc, starts, tri_sorted, vi = self._parity_grid(d)
            a = self._a[vi]
            e1 = self._b[vi] - a
            e2 = self._c[vi] - a
            pvec = np.cross(d, e2)
            det = np.sum(e1 * pvec, axis=1)
            ok = np.abs(det) > eps
            inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
            plane_n = np.cross(e1, e2)

            q = pts[pending]
            pu = np.clip(((q @ eu - glo[0]) / cell[0]).astype(np.int64),
                         0, nc - 1)
            pv = np.clip(((q @ ev - glo[1]) / cell[1]).astype(np.int64),
                         0, nc - 1)
            cid = pu * nc + pv
            counts = starts[cid + 1] - starts[cid]
            pt_idx = np.repeat(np.arange(len(pending)), counts)
            # gather each point's bucket of candidate triangles
            gather = (np.arange(int(counts.sum()))
                      - np.repeat(np.concatenate(
                          [[0], np.cumsum(counts)[:-1]]), counts)
                      + starts[cid][pt_idx])
            tri = tri_sorted[gather]

            qq = q[pt_idx]
            tv = qq - a[tri]
            u = np.sum(tv * pvec[tri], axis=1) * inv[tri]
            qv = np.cross(tv, e1[tri])
            v = (qv @ d) * inv[tri]
            t = np.sum(qv * e2[tri], axis=1) * inv[tri]
            okp = ok[tri]
            hit = okp & (u > eps) & (v > eps) & (u + v < 1 - eps) & (t > eps)
            grazing = okp & (t > eps) & (
                (np.abs(u) <= margin) | (np.abs(v) <= margin)
                | (np.abs(1 - u - v) <= margin))
            too_close = (np.abs(t) <= margin) & okp & (u > -margin) & (
                v > -margin) & (u + v < 1 + margin)
            # near-parallel triangle whose plane passes close to the point
            parallel_bad = ~okp & (np.abs(np.sum(tv * plane_n[tri],
                                                 axis=1)) < 1e-12)

            bad_pair = grazing | too_close | parallel_bad
            hits = np.zeros(len(pending), dtype=np.int64)
            np.add.at(hits, pt_idx, hit.astype(np.int64))
            bad = np.zeros(len(pending), dtype=bool)
            np.logical_or.at(bad, pt_idx, bad_pair)

            good = ~bad
            inside[pending[good]] = (hits[good] % 2).astype(bool)
            pending = pending[bad]
        if len(pending):
            # points sitting on the surface itself can never escape the
            # too-close test; their sign is irrelevant (|s| ~ 0) and the
            # convention maps s = 0 to outside
            dist, _, _ = self.closest_point_batch(pts[pending])
            on_surface = dist <= 1e-8
            inside[pending[on_surface]] = False
            pending = pending[~on_surface]
        if len(pending):
            if on_ambiguous == "pseudonormal":
                for i in pending:
                    dist, cp, tri = self.closest_point(pts[i])
                    nrm = self._pseudonormal_at(cp, tri)
                    inside[i] = float(np.dot(pts[i] - cp, nrm)) < 0
                return inside
            raise AmbiguousSign(
                f"{len(pending)} points undecidable after {_MAX_RAY_RETRIES} retries"
            )
        return inside

    def _vertex_normals(self):
        """Angle-weighted vertex pseudo-normals (lazy)."""
        if self._vnormal is None:
            vn = np.zeros_like(self.vertices)
            for k, gi in enumerate(np.where(self._valid)[0]):
                ia, ib, ic = self.triangles[gi]
                pa, pb, pc = self._a[gi], self._b[gi], self._c[gi]
                fn = self._fnormal[gi]
                for iv, p0, p1, p2 in ((ia, pa, pb, pc), (ib, pb, pc, pa),
                                       (ic, pc, pa, pb)):
                    u = p1 - p0
                    v = p2 - p0
                    cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
                    ang = np.arccos(np.clip(cosang, -1.0, 1.0))
                    vn[iv] += ang * fn
            norms = np.linalg.norm(vn, axis=1, keepdims=True)
            self._vnormal = vn / np.maximum(norms, 1e-30)
        return self._vnormal

    def _pseudonormal_at(self, point, tri):
        """Outward pseudo-normal at a closest point on a given triangle."""
        ia, ib, ic = self.triangles[tri]
        pa, pb, pc = self._a[tri], self._b[tri], self._c[tri]
        # barycentric coordinates of the point
        m = np.stack([pb - pa, pc - pa], axis=1)
        g = m.T @ m
        rhs = m.T @ (point - pa)
        try:
            uv = np.linalg.solve(g, rhs)
        except np.linalg.LinAlgError:
            return self._fnormal[tri]
        u, v = float(uv[0]), float(uv[1])
        w = 1.0 - u - v
        tol = 1e-9
        vn = self._vertex_normals()
        near = [(w, ia), (u, ib), (v, ic)]
        zero = [idx for bc, idx in near if bc <= tol]
        if len(zero) == 2:  # at a vertex
            return vn[[idx for bc, idx in near if bc > tol][0]]
        if len(zero) == 1:  # on an edge: average of the two endpoint normals
            ends = [idx for bc, idx in near if bc > tol]
            n = vn[ends[0]] + vn[ends[1]]
            nn = np.linalg.norm(n)
            return n / nn if nn > 0 else self._fnormal[tri]
        return self._fnormal[tri]

    # ---------------- ImplicitGeometry contract ----------------

    def signed_distance_with_point(self, x, on_ambiguous="raise"):
        """Signed distance and the closest surface point."""
        dist, cp, _ = self.closest_point(x)
        try:
            ins = bool(self._ray_parity(np.asarray(x, dtype=float)[None])[0])
        except AmbiguousSign:
            if on_ambiguous != "pseudonormal":
                raise
            ins = bool(self._ray_parity(np.asarray(x, dtype=float)[None],
                                        on_ambiguous="pseudonormal")[0])
        return (-dist if ins else dist), cp

    def signed_distance(self, x):
        return self.signed_distance_with_point(x)[0]

    def signed_distance_batch(self, pts, on_ambiguous="raise"):
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        if len(pts) == 0:
            return np.zeros(0)
        dist, _, _ = self.closest_point_batch(pts)
        inside = self._ray_parity(pts, on_ambiguous=on_ambiguous)
        return np.where(inside, -dist, dist)

    def signed_distance_with_point_batch(self, pts, on_ambiguous="raise"):
        """(signed distances, closest surface points) for many queries."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        if len(pts) == 0:
            return np.zeros(0), np.zeros((0, 3))
        dist, cp, _ = self.closest_point_batch(pts)
        inside = self._ray_parity(pts, on_ambiguous=on_ambiguous)
        return np.where(inside, -dist, dist), cp

    def inside_batch(self, pts):
        """Parity-only inside test; much cheaper than the full signed
        distance because no closest-point search is needed."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        if len(pts) == 0:
            return np.zeros(0, dtype=bool)
        return self._ray_parity(pts)

    def signed_distance_batch_clipped(self, pts, clip, on_ambiguous="raise"):
        """Signed distance, exact only within |f| <= clip.

        The centroid KD-tree gives a cheap lower bound on the unsigned
        distance (nearest centroid minus the largest triangle radius);
        points provably farther than clip skip the exact closest-point
        search and return that bound with the parity sign.
        """
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        n = len(pts)
        if n == 0:
            return np.zeros(0)
        kd = self._centroid_tree()
        max_rad = float(self._kd_rad.max())
        d_cent, _ = kd.query(pts)
        lb = d_cent - max_rad
        near = lb <= clip
        dist = np.maximum(lb, clip)
        if near.any():
            dist[near], _, _ = self.closest_point_batch(pts[near])
        inside = self._ray_parity(pts, on_ambiguous=on_ambiguous)
        return np.where(inside, -dist, dist)

    def distance_vector(self, x):
        """Exact vector from x to its closest surface point."""
        x = np.asarray(x, dtype=float)
        _, cp, _ = self.closest_point(x)
        return cp - x

    def distance_vector_batch(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        _, cp, _ = self.closest_point_batch(pts)
        return cp - pts

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def rescale_soup(soup, margin=0.15):
    """Center the soup in the canonical cube with the given wall margin.

    Returns the rescaled soup and the DomainTransform mapping raw
    coordinates into canonical ones.
    """
    if not 0.0 < margin < 0.5:
        raise ValueError("margin must lie in (0, 0.5)")
    lo, hi = soup.bounds()
    ext = hi - lo
    if np.any(ext <= 0):
        raise DegenerateBounds(f"zero extent along axis: {ext.tolist()}")
    center = 0.5 * (lo + hi)
    scale = (1.0 - margin) / float(np.max(ext) / 2.0)
    tf = DomainTransform(center, scale)
    return TriangleSoup(tf.to_canonical(soup.vertices), soup.triangles), tf


def icosphere(subdivisions=2, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Icosphere triangle soup by repeated midpoint subdivision."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    verts = list(verts)
    for _ in range(subdivisions):
        cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                m /= np.linalg.norm(m)
                verts.append(m)
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for i, j, k in faces:
            a = midpoint(i, j)
            b = midpoint(j, k)
            c = midpoint(k, i)
            new_faces += [[i, a, c], [j, b, a], [k, c, b], [a, b, c]]
        faces = np.array(new_faces, dtype=np.int64)
    v = np.array(verts) * radius + np.asarray(center, dtype=float)
    return TriangleSoup(v, faces)


def cube_soup(lo=-0.5, hi=0.5):
    """12-triangle soup of an axis-aligned cube, outward-oriented."""
    l, h = float(lo), float(hi)
    v = np.array([[x, y, z] for z in (l, h) for y in (l, h) for x in (l, h)])
    # index layout: x fastest, then y, then z
    f = np.array([
        [0, 2, 1], [1, 2, 3],      # z = lo
        [4, 5, 6], [5, 7, 6],      # z = hi
        [0, 1, 4], [1, 5, 4],      # y = lo
        [2, 6, 3], [3, 6, 7],      # y = hi
        [0, 4, 2], [2, 4, 6],      # x = lo
        [1, 3, 5], [3, 7, 5],      # x = hi
    ], dtype=np.int64)
    return TriangleSoup(v, f)
