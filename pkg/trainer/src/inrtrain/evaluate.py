"""Model quality metrics against the triangle-soup oracle."""

import numpy as np

from .errors import NoPointsInBand

# canonical cube side length; the NMSE normalizer
CHARACTERISTIC_DIM = 2.0


def canonical_grid(resolution):
    axis = np.linspace(-1.0, 1.0, resolution)
    mesh = np.meshgrid(axis, axis, axis, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def nmse_delta(model_fn, soup, delta, grid_resolution, chunk=200_000):
    """Mean squared signed-distance error over grid points within
    |s_oracle| < delta, normalized by the characteristic dimension.

    model_fn maps an (n, 3) array to (n,) predicted signed distances.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    pts = canonical_grid(grid_resolution)
    total = 0.0
    count = 0
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        s = soup.signed_distance(block)
        band = np.abs(s) < delta
        if not band.any():
            continue
        f = np.asarray(model_fn(block[band]), dtype=float)
        total += float(np.sum((s[band] - f) ** 2))
        count += int(band.sum())
    if count == 0:
        raise NoPointsInBand(
            f"no grid points with |s| < {delta} at resolution "
            f"{grid_resolution}")
    return total / count / CHARACTERISTIC_DIM
