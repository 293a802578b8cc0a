"""Analytic signed-distance shapes: sphere, 2D annulus, box, gyroid."""

import numpy as np

from .base import ImplicitGeometry, _checked_gradient
from ..errors import DegenerateGradient


class Sphere(ImplicitGeometry):
    """Exact SDF of a sphere (3D) or disk (2D): f = |x - c| - r."""

    def __init__(self, center=(0.0, 0.0, 0.0), radius=1.0):
        self.center = np.asarray(center, dtype=float)
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = self.center.size

    def signed_distance(self, x):
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.center) - self.radius)

    def signed_distance_batch(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        return np.linalg.norm(pts - self.center, axis=1) - self.radius

    def gradient(self, x):
        v = np.asarray(x, dtype=float) - self.center
        n = np.linalg.norm(v)
        if n < 1e-12:
            raise DegenerateGradient("query at sphere center")
        return v / n


class Annulus2D(ImplicitGeometry):
    """Exact SDF of the 2D region r_inner <= |x - c| <= r_outer."""

    dim = 2

    def __init__(self, center=(0.0, 0.0), r_inner=0.25, r_outer=1.0):
        if not 0 < r_inner < r_outer:
            raise ValueError("need 0 < r_inner < r_outer")
        self.center = np.asarray(center, dtype=float)
        self.r_inner = float(r_inner)
        self.r_outer = float(r_outer)

    def signed_distance(self, x):
        r = np.linalg.norm(np.asarray(x, dtype=float) - self.center)
        return float(max(self.r_inner - r, r - self.r_outer))

    def signed_distance_batch(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        r = np.linalg.norm(pts - self.center, axis=1)
        return np.maximum(self.r_inner - r, r - self.r_outer)

    def gradient(self, x):
        v = np.asarray(x, dtype=float) - self.center
        r = np.linalg.norm(v)
        if r < 1e-12:
            # inside the hole, pointing anywhere radial is fine but ill-defined
            raise DegenerateGradient("query at annulus center")
        rhat = v / r
        # active branch of the max(): nearer circle wins
        if self.r_inner - r > r - self.r_outer:
            return -rhat
        return rhat


class Box(ImplicitGeometry):
    """Exact SDF of an axis-aligned box given by min/max corners."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.hi <= self.lo):
            raise ValueError("need lo < hi componentwise")
        self.dim = self.lo.size
        self._c = 0.5 * (self.lo + self.hi)
        self._half = 0.5 * (self.hi - self.lo)

    def signed_distance(self, x):
        return float(self.signed_distance_batch(np.asarray(x, dtype=float)[None])[0])

    def signed_distance_batch(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, self.dim)
        q = np.abs(pts - self._c) - self._half
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(np.max(q, axis=1), 0.0)
        return outside + inside

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        q = np.abs(x - self._c) - self._half
        s = np.sign(x - self._c)
        s[s == 0] = 1.0
        if np.all(q < 0):
            # inside: gradient points along the axis of the nearest face
            k = int(np.argmax(q))
            g = np.zeros(self.dim)
            g[k] = s[k]
            return g
        qp = np.maximum(q, 0.0)
        g = s * qp / np.linalg.norm(qp)
        return _checked_gradient(g)


class Gyroid(ImplicitGeometry):
    """Approximate SDF of a gyroid level set clipped to a box.

    The raw level-set value sin*cos form is rescaled by its local gradient
    norm, which gives distance-like behaviour near the surface but is not an
    exact SDF; downstream consumers normalize the gradient accordingly.
    """

    dim = 3
    exact = False

    def __init__(self, period=1.0, iso=0.0, clip_lo=(-0.8, -0.8, -0.8),
                 clip_hi=(0.8, 0.8, 0.8)):
        if not period > 0:
            raise ValueError("period must be positive")
        self.period = float(period)
        self.iso = float(iso)
        self.clip = Box(clip_lo, clip_hi)

    def _raw(self, pts):
        w = 2.0 * np.pi / self.period
        x, y, z = pts[:, 0] * w, pts[:, 1] * w, pts[:, 2] * w
        val = (np.sin(x) * np.cos(y) + np.sin(y) * np.cos(z)
               + np.sin(z) * np.cos(x)) - self.iso
        # gradient of the sin*cos form, for first-order rescaling
        gx = np.cos(x) * np.cos(y) - np.sin(z) * np.sin(x)
        gy = -np.sin(x) * np.sin(y) + np.cos(y) * np.cos(z)
        gz = -np.sin(y) * np.sin(z) + np.cos(z) * np.cos(x)
        gnorm = w * np.sqrt(gx * gx + gy * gy + gz * gz)
        return val, np.maximum(gnorm, 1e-3)

    def signed_distance(self, x):
        return float(self.signed_distance_batch(np.asarray(x, dtype=float)[None])[0])

    def signed_distance_batch(self, pts):
        pts = np.asarray(pts, dtype=float).reshape(-1, 3)
        val, gnorm = self._raw(pts)
        approx = val / gnorm
        return np.maximum(approx, self.clip.signed_distance_batch(pts))
