"""Independent brute-force reference implementations used by the tests.

These deliberately avoid the package's octree/classification code paths:
they enumerate complete dense grids and dictionaries instead of adaptive
refinement, so agreement is meaningful.
"""

import numpy as np

_G1 = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])


def dense_grid_mesh_2d(geom, level, domain=(-1.0, 1.0)):
    """All level-`level` cells of the square that the solver would retain.

    Returns (anchors set, markers dict anchor -> name, faces set).  A cell
    is retained when any of its 4 corners or 4 tensor Gauss points has a
    strictly negative signed distance.  Markers follow the interior count
    of the 2x2 Gauss points.  Faces separate surrogate cells (marker not
    Exterior) from exterior/absent regions; each face is keyed by
    (owner anchor, axis, side).
    """
    n = 1 << level
    lo, hi = domain
    h = (hi - lo) / n

    corners = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float)
    gauss = np.stack(np.meshgrid(_G1, _G1, indexing="ij"),
                     axis=-1).reshape(-1, 2)

    retained = set()
    markers = {}
    for ix in range(n):
        for iy in range(n):
            origin = np.array([lo + ix * h, lo + iy * h])
            samp = np.vstack([origin + corners * h, origin + gauss * h])
            f = geom.signed_distance_batch(samp)
            if not (f < 0).any():
                continue
            retained.add((ix, iy))
            n_in = int((f[4:] < 0).sum())
            if n_in == 4:
                markers[(ix, iy)] = "Interior"
            elif n_in == 0:
                markers[(ix, iy)] = "Exterior"
            else:
                markers[(ix, iy)] = "TrueIntercepted"

    surrogate = {a for a in retained if markers[a] != "Exterior"}
    faces = set()
    for (ix, iy) in surrogate:
        for axis, side in ((0, -1), (0, 1), (1, -1), (1, 1)):
            nb = (ix + (side if axis == 0 else 0),
                  iy + (side if axis == 1 else 0))
            if nb in surrogate:
                continue
            faces.add(((ix, iy), axis, side))
    return retained, markers, faces


def fd_divergence_of_stress(displacement_fn, lam, mu, x, h=1e-5):
    """-div(sigma(u)) at points x by nested central differences; oracle for
    the symbolically generated body forces."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n, d = x.shape

    def stress(pts):
        grad = np.empty((len(pts), d, d))
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            grad[:, :, j] = (displacement_fn(pts + e)
                             - displacement_fn(pts - e)) / (2 * h)
        eps = 0.5 * (grad + np.swapaxes(grad, 1, 2))
        tr = np.trace(eps, axis1=1, axis2=2)
        return (lam * tr[:, None, None] * np.eye(d)
                + 2.0 * mu * eps)

    out = np.zeros((n, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        ds = (stress(x + e) - stress(x - e)) / (2 * h)
        out -= ds[:, :, j]
    return out
