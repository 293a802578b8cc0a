"""Triangle soups: file I/O, canonical rescaling, and a signed
closest-point oracle with angle-weighted pseudo-normals.

The sign of the distance is decided by the pseudo-normal at the closest
feature (face interior, edge, or vertex), which gives a consistent
inside/outside answer for watertight meshes even when the query lands
exactly on an edge or vertex.
"""

import struct

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptySoup, FormatError

_BARY_TOL = 1e-12


class DomainTransform:
    """Affine map raw -> canonical: x_c = (x_raw - center) * scale."""

    def __init__(self, center, scale):
        self.center = np.asarray(center, dtype=float)
        self.scale = float(scale)

    def to_canonical(self, x):
        return (np.asarray(x, dtype=float) - self.center) * self.scale


class TriangleSoup:
    """Vertex/triangle arrays plus lazily built query structures."""

    def __init__(self, vertices, triangles):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if len(self.triangles) == 0:
            raise EmptySoup("soup has no triangles")
        if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
            raise FormatError("triangle index out of range")
        self._acc = None

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_areas(self):
        tri = self.vertices[self.triangles]
        return 0.5 * np.linalg.norm(
            np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)

    def _accel(self):
        if self._acc is None:
            self._acc = _SoupAccel(self)
        return self._acc

    def closest_point(self, pts):
        """Closest surface points, distances and feature pseudo-normals.

        Returns (cp, dist, normal) with shapes (n,3), (n,), (n,3).
        """
        return self._accel().closest(np.atleast_2d(np.asarray(pts, float)))

    def signed_distance(self, pts):
        cp, dist, nrm = self.closest_point(pts)
        sign = np.where(np.einsum("ij,ij->i",
                                  np.atleast_2d(pts) - cp, nrm) < 0.0,
                        -1.0, 1.0)
        return sign * dist

    def sample_surface(self, n, rng):
        """Area-weighted surface samples with their pseudo-normals."""
        areas = self.triangle_areas()
        total = areas.sum()
        if total <= 0.0:
            raise EmptySoup("soup has zero total area")
        pick = rng.choice(self.n_triangles, size=n, p=areas / total)
        r1 = np.sqrt(rng.uniform(size=n))
        r2 = rng.uniform(size=n)
        bary = np.stack([1.0 - r1, r1 * (1.0 - r2), r1 * r2], axis=1)
        tri = self.vertices[self.triangles[pick]]
        pts = np.einsum("nk,nkd->nd", bary, tri)
        normals = self._accel().face_normals[pick]
        return pts, normals


class _SoupAccel:
    """Precomputed normals, pseudo-normals and a centroid KD-tree."""

    def __init__(self, soup):
        self.soup = soup
        v = soup.vertices
        t = soup.triangles
        tri = v[t]
        raw = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        nrm = np.linalg.norm(raw, axis=1)
        keep = nrm > 0.0
        if not np.any(keep):
            raise EmptySoup("all triangles are degenerate")
        self.face_normals = np.where(keep[:, None], raw / np.where(
            keep, nrm, 1.0)[:, None], 0.0)

        # angle-weighted vertex pseudo-normals
        vert_n = np.zeros_like(v)
        for k in range(3):
            p0 = tri[:, k]
            e1 = tri[:, (k + 1) % 3] - p0
            e2 = tri[:, (k + 2) % 3] - p0
            c = np.einsum("ij,ij->i", e1, e2)
            s = np.linalg.norm(np.cross(e1, e2), axis=1)
            ang = np.arctan2(s, c)
            np.add.at(vert_n, t[:, k], ang[:, None] * self.face_normals)
        ln = np.linalg.norm(vert_n, axis=1)
        self.vertex_normals = vert_n / np.where(ln > 0.0, ln, 1.0)[:, None]

        # edge pseudo-normals: sum of adjacent face normals
        edges = {}
        for f in range(len(t)):
            for k in range(3):
                key = (min(t[f, k], t[f, (k + 1) % 3]),
                       max(t[f, k], t[f, (k + 1) % 3]))
                if key in edges:
                    edges[key] = edges[key] + self.face_normals[f]
                else:
                    edges[key] = self.face_normals[f].copy()
        self.edge_normals = {}
        for key, vec in edges.items():
            n = np.linalg.norm(vec)
            self.edge_normals[key] = vec / n if n > 0.0 else vec

        cent = tri.mean(axis=1)
        self.tree = cKDTree(cent)
        self.max_rad = np.linalg.norm(
            tri - cent[:, None, :], axis=2).max()

    def closest(self, pts):
        n = len(pts)
        k = min(48, self.soup.n_triangles)
        d_cent, cand = self.tree.query(pts, k=k)
        if k == 1:
            d_cent = d_cent[:, None]
            cand = cand[:, None]
        cp, bary, d2 = _closest_on_triangles(
            pts, self.soup.vertices[self.soup.triangles[cand]])
        best = np.argmin(d2, axis=1)
        rows = np.arange(n)
        dist = np.sqrt(d2[rows, best])
        # the candidate list is exact when the best distance cannot be
        # beaten by any triangle outside the queried centroid radius
        if k < self.soup.n_triangles:
            unsafe = dist > d_cent[:, -1] - self.max_rad
            if np.any(unsafe):
                idx = np.where(unsafe)[0]
                tri_all = self.soup.vertices[self.soup.triangles]
                for chunk in np.array_split(idx, max(1, len(idx) // 256)):
                    cpa, ba, da = _closest_on_triangles(
                        pts[chunk], tri_all[None, :, :, :].repeat(
                            len(chunk), axis=0))
                    b = np.argmin(da, axis=1)
                    r = np.arange(len(chunk))
                    cp[chunk, best[chunk]] = cpa[r, b]
                    bary[chunk, best[chunk]] = ba[r, b]
                    cand[chunk, best[chunk]] = b
                    dist[chunk] = np.sqrt(da[r, b])
        cp_best = cp[rows, best]
        bary_best = bary[rows, best]
        tri_best = cand[rows, best]
        normal = self._feature_normals(tri_best, bary_best)
        return cp_best, dist, normal

    def _feature_normals(self, tri_idx, bary):
        t = self.soup.triangles
        near_zero = bary < _BARY_TOL
        n_zero = near_zero.sum(axis=1)
        out = self.face_normals[tri_idx].copy()
        for i in np.where(n_zero == 1)[0]:
            k = int(np.where(near_zero[i])[0][0])
            a = t[tri_idx[i], (k + 1) % 3]
            b = t[tri_idx[i], (k + 2) % 3]
            out[i] = self.edge_normals[(min(a, b), max(a, b))]
        for i in np.where(n_zero >= 2)[0]:
            k = int(np.argmax(bary[i]))
            out[i] = self.vertex_normals[t[tri_idx[i], k]]
        return out


def _closest_on_triangles(pts, tri):
    """Closest point on each candidate triangle for each query point.

    pts: (n,3); tri: (n,k,3,3).  Returns cp (n,k,3), barycentric
    coordinates (n,k,3) and squared distances (n,k).
    """
    p = pts[:, None, :]
    a, b, c = tri[:, :, 0], tri[:, :, 1], tri[:, :, 2]
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("nkd,nkd->nk", ab, ap)
    d2 = np.einsum("nkd,nkd->nk", ac, ap)
    bp = p - b
    d3 = np.einsum("nkd,nkd->nk", ab, bp)
    d4 = np.einsum("nkd,nkd->nk", ac, bp)
    cp_ = p - c
    d5 = np.einsum("nkd,nkd->nk", ab, cp_)
    d6 = np.einsum("nkd,nkd->nk", ac, cp_)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    denom = va + vb + vc
    denom = np.where(np.abs(denom) > 0.0, denom, 1.0)
    v = vb / denom
    w = vc / denom

    # interior projection, then clamp to the closest edge/vertex region
    u_b = np.clip(np.where(d1 - d3 != 0.0, d1 / np.where(
        d1 - d3 != 0.0, d1 - d3, 1.0), 0.0), 0.0, 1.0)      # edge AB
    u_c = np.clip(np.where(d2 - d6 != 0.0, d2 / np.where(
        d2 - d6 != 0.0, d2 - d6, 1.0), 0.0), 0.0, 1.0)      # edge AC
    u_bc = np.clip(np.where((d4 - d3) + (d5 - d6) != 0.0,
                            (d4 - d3) / np.where(
                                (d4 - d3) + (d5 - d6) != 0.0,
                                (d4 - d3) + (d5 - d6), 1.0), 0.0),
                   0.0, 1.0)                                 # edge BC

    bary = np.empty(tri.shape[:2] + (3,))
    # default: interior
    bary[..., 0] = 1.0 - v - w
    bary[..., 1] = v
    bary[..., 2] = w

    reg_ab = (vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0)
    reg_ac = (vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0)
    reg_bc = (va <= 0.0) & (d4 - d3 >= 0.0) & (d5 - d6 >= 0.0)
    reg_a = (d1 <= 0.0) & (d2 <= 0.0)
    reg_b = (d3 >= 0.0) & (d4 <= d3)
    reg_c = (d6 >= 0.0) & (d5 <= d6)

    def _set(mask, ba, bb, bc):
        bary[..., 0] = np.where(mask, ba, bary[..., 0])
        bary[..., 1] = np.where(mask, bb, bary[..., 1])
        bary[..., 2] = np.where(mask, bc, bary[..., 2])

    _set(reg_bc, 0.0, 1.0 - u_bc, u_bc)
    _set(reg_ac, 1.0 - u_c, 0.0, u_c)
    _set(reg_ab, 1.0 - u_b, u_b, 0.0)
    _set(reg_c, 0.0, 0.0, 1.0)
    _set(reg_b, 0.0, 1.0, 0.0)
    _set(reg_a, 1.0, 0.0, 0.0)

    cp = (bary[..., 0:1] * a + bary[..., 1:2] * b + bary[..., 2:3] * c)
    d2_out = np.einsum("nkd,nkd->nk", p - cp, p - cp)
    return cp, bary, d2_out


def load_obj(path):
    """Wavefront OBJ reader: v/f records, fan triangulation, negative
    indices resolved relative to the vertices read so far."""
    verts = []
    faces = []
    try:
        with open(path, "r") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "v":
                    if len(parts) < 4:
                        raise FormatError(f"short vertex record: {line!r}")
                    verts.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    idx = []
                    for tok in parts[1:]:
                        i = int(tok.split("/")[0])
                        idx.append(i - 1 if i > 0 else len(verts) + i)
                    for k in range(1, len(idx) - 1):
                        faces.append([idx[0], idx[k], idx[k + 1]])
    except (OSError, ValueError) as exc:
        raise FormatError(f"cannot parse {path}: {exc}") from exc
    if not faces:
        raise FormatError(f"{path}: no faces")
    return TriangleSoup(np.array(verts), np.array(faces))


def load_stl(path):
    """STL reader, binary or ASCII, with exact vertex deduplication."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) >= 84:
        (ntri,) = struct.unpack("<I", data[80:84])
        if len(data) == 84 + 50 * ntri:
            raw = np.frombuffer(data, dtype=np.uint8, offset=84)
            rec = raw.reshape(ntri, 50)[:, 12:48].copy()
            tri = rec.view("<f4").reshape(ntri, 3, 3).astype(float)
            return _soup_from_tri(tri)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not binary STL and not ASCII") from exc
    coords = []
    for line in text.splitlines():
        parts = line.split()
        if parts and parts[0] == "vertex":
            coords.append([float(x) for x in parts[1:4]])
    if not coords or len(coords) % 3 != 0:
        raise FormatError(f"{path}: malformed ASCII STL")
    tri = np.array(coords).reshape(-1, 3, 3)
    return _soup_from_tri(tri)


def _soup_from_tri(tri):
    flat = tri.reshape(-1, 3)
    verts, inv = np.unique(flat, axis=0, return_inverse=True)
    return TriangleSoup(verts, inv.reshape(-1, 3))


def save_obj(soup, path):
    with open(path, "w") as fh:
        for v in soup.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in soup.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def rescale_soup(soup, margin=0.15):
    """Center and scale into the canonical cube with a boundary margin.

    Returns (rescaled soup, transform raw -> canonical).
    """
    lo = soup.vertices.min(axis=0)
    hi = soup.vertices.max(axis=0)
    center = 0.5 * (lo + hi)
    ext = hi - lo
    scale = (1.0 - margin) / float(np.max(ext) / 2.0)
    tf = DomainTransform(center, scale)
    return TriangleSoup(tf.to_canonical(soup.vertices),
                        soup.triangles.copy()), tf


def icosphere(subdivisions=2, radius=0.5):
    """Subdivided icosahedron projected onto a sphere at the origin."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    for _ in range(subdivisions):
        cache = {}
        new_faces = []
        vlist = list(verts)

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = vlist[i] + vlist[j]
                m /= np.linalg.norm(m)
                cache[key] = len(vlist)
                vlist.append(m)
            return cache[key]

        for a, b, c in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc],
                          [ab, bc, ca]]
        verts = np.array(vlist)
        faces = np.array(new_faces, dtype=np.int64)
    return TriangleSoup(verts * radius, faces)
