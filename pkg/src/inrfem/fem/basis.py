"""Multilinear nodal basis on the unit cube and tensor Gauss quadrature."""

import numpy as np

from ..octree.tree import corner_offsets, gauss_points_1d


def shape_values(xi):
    """Multilinear shape functions at local coords xi in [0,1]^d.

    xi: (..., d) -> values (..., 2^d), node order matching corner_offsets.
    """
    xi = np.asarray(xi, dtype=float)
    d = xi.shape[-1]
    offs = corner_offsets(d)
    vals = np.ones(xi.shape[:-1] + (len(offs),))
    for a, off in enumerate(offs):
        for k in range(d):
            vals[..., a] *= xi[..., k] if off[k] else (1.0 - xi[..., k])
    return vals


def shape_gradients(xi):
    """Reference gradients dN/dxi: (..., d, 2^d)."""
    xi = np.asarray(xi, dtype=float)
    d = xi.shape[-1]
    offs = corner_offsets(d)
    grads = np.ones(xi.shape[:-1] + (d, len(offs)))
    for a, off in enumerate(offs):
        for k in range(d):
            for j in range(d):
                if j == k:
                    grads[..., k, a] *= 1.0 if off[j] else -1.0
                else:
                    grads[..., k, a] *= xi[..., j] if off[j] else (1.0 - xi[..., j])
    return grads


def gauss_rule(order, dim, size=1.0, origin=None):
    """Tensor-product Gauss-Legendre rule on a cube of the given size.

    Returns (points, weights) with points in physical coordinates when an
    origin is given, else local [0, size]^dim coordinates.  Weight sum
    equals size^dim.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    p1, w1 = gauss_points_1d(order)
    loc = 0.5 * (p1 + 1.0)
    pts = np.stack(np.meshgrid(*[loc] * dim, indexing="ij"),
                   axis=-1).reshape(-1, dim) * size
    wts = np.prod(np.stack(np.meshgrid(*[w1] * dim, indexing="ij"),
                           axis=-1).reshape(-1, dim), axis=1) * (size / 2.0) ** dim
    if origin is not None:
        pts = pts + np.asarray(origin, dtype=float)
    return pts, wts
