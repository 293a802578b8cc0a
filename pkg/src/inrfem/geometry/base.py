"""Implicit geometry query contract.

Every geometry provider answers signed-distance queries under the single
global sign convention: f < 0 inside, f > 0 outside, f = 0 on the surface.
All query methods are read-only after construction and safe to call from
concurrent workers.
"""

import numpy as np

from ..errors import DegenerateGradient

# Central-difference step for providers without analytic gradients, in
# canonical domain units.  Balances truncation against float64 round-off.
DEFAULT_FD_STEP = 5e-4

GRAD_NORM_MIN = 1e-8
GRAD_NORM_RANGE = (0.5, 2.0)


class ImplicitGeometry:
    """Abstract signed-distance geometry (negative inside).

    Subclasses must implement ``signed_distance``; the batch method,
    gradient and distance vector have generic fallbacks.
    """

    #: spatial dimension, set by subclasses
    dim = 3
    #: whether |f| is the exact Euclidean distance to the surface
    exact = True

    fd_step = DEFAULT_FD_STEP

    def signed_distance(self, x):
        raise NotImplementedError

    def signed_distance_batch(self, pts):
        """Vectorized signed distance; default loops over rows."""
        pts = np.asarray(pts, dtype=float)
        if pts.size == 0:
            return np.zeros(0)
        return np.array([self.signed_distance(p) for p in pts])

    def inside(self, x):
        """True iff strictly inside; points exactly on the surface count as outside."""
        return self.signed_distance(x) < 0.0

    def inside_batch(self, pts):
        return self.signed_distance_batch(pts) < 0.0

    def signed_distance_batch_clipped(self, pts, clip):
        """Signed distance exact within |f| <= clip.

        Farther points may report any same-signed value of magnitude
        >= clip; providers with expensive far-field queries override this.
        Every comparison against thresholds <= clip gives the same answer
        as the exact field.
        """
        return self.signed_distance_batch(pts)

    def gradient(self, x):
        """Gradient of f at x, by central differences unless overridden."""
        return self._fd_gradient(x)

    def _fd_gradient(self, x):
        x = np.asarray(x, dtype=float)
        h = self.fd_step
        g = np.empty(self.dim)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            g[k] = (self.signed_distance(x + e) - self.signed_distance(x - e)) / (2.0 * h)
        return _checked_gradient(g)

    def distance_vector(self, x):
        """Vector from x to its closest surface point: -f * grad/|grad|."""
        g = self.gradient(x)
        f = self.signed_distance(x)
        return -f * g / np.linalg.norm(g)


def _checked_gradient(g):
    n = np.linalg.norm(g)
    if n < GRAD_NORM_MIN:
        raise DegenerateGradient(f"gradient norm {n:.3e} below {GRAD_NORM_MIN}")
    if not (GRAD_NORM_RANGE[0] <= n <= GRAD_NORM_RANGE[1]):
        raise DegenerateGradient(
            f"gradient norm {n:.3e} outside sane range {GRAD_NORM_RANGE}"
        )
    return g


class DomainTransform:
    """Uniform scale + translation between raw and canonical coordinates.

    canonical = (raw - center) * scale;  raw = canonical / scale + center.
    """

    def __init__(self, center, scale):
        self.center = np.asarray(center, dtype=float)
        self.scale = float(scale)
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def to_canonical(self, x):
        return (np.asarray(x, dtype=float) - self.center) * self.scale

    def to_raw(self, x):
        return np.asarray(x, dtype=float) / self.scale + self.center

    @classmethod
    def identity(cls, dim):
        return cls(np.zeros(dim), 1.0)

    def is_identity(self, tol=0.0):
        return abs(self.scale - 1.0) <= tol and np.all(np.abs(self.center) <= tol)

    def __repr__(self):
        return f"DomainTransform(center={self.center.tolist()}, scale={self.scale})"
