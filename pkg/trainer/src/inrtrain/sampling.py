"""Hybrid training-point sampling: surface, narrow band, and uniform."""

import numpy as np

from .errors import EmptySoup


class SamplingConfig:
    """Counts for the three sample populations plus the band width."""

    def __init__(self, n_surface=90_000, n_narrowband=28_000,
                 n_uniform=32_000, delta_nb=0.001):
        if min(n_surface, n_narrowband, n_uniform) < 0:
            raise ValueError("sample counts must be non-negative")
        if n_surface + n_narrowband + n_uniform == 0:
            raise ValueError("total sample count must be positive")
        if delta_nb <= 0.0:
            raise ValueError("narrow-band width must be positive")
        self.n_surface = int(n_surface)
        self.n_narrowband = int(n_narrowband)
        self.n_uniform = int(n_uniform)
        self.delta_nb = float(delta_nb)


class TrainSamples:
    """Aligned arrays: points, target signed distances, target normals.

    The normal target is taken from the closest-feature pseudo-normal of
    the oracle; the loss decides where it is trusted (|s| < omega).
    """

    def __init__(self, x, s, normal):
        self.x = x
        self.s = s
        self.normal = normal

    def __len__(self):
        return len(self.x)


def sample_hybrid(soup, cfg, seed=0):
    """Draw the three populations and attach oracle targets.

    Surface points get s = 0 exactly (they lie on the mesh); narrow-band
    points are surface points pushed by isotropic Gaussian offsets
    clipped to radius delta_nb; uniform points fill the canonical cube.
    Deterministic for a fixed seed.
    """
    if soup.n_triangles == 0:
        raise EmptySoup("cannot sample an empty soup")
    rng = np.random.default_rng(seed)

    xs, ns = soup.sample_surface(cfg.n_surface + cfg.n_narrowband, rng)
    surf_x = xs[:cfg.n_surface]
    surf_n = ns[:cfg.n_surface]
    surf_s = np.zeros(cfg.n_surface)

    base = xs[cfg.n_surface:]
    off = rng.normal(scale=cfg.delta_nb, size=base.shape)
    r = np.linalg.norm(off, axis=1)
    over = r > cfg.delta_nb
    off[over] *= (cfg.delta_nb / r[over])[:, None]
    nb_x = base + off

    uni_x = rng.uniform(-1.0, 1.0, (cfg.n_uniform, 3))

    x = np.concatenate([surf_x, nb_x, uni_x])
    # oracle targets for the off-surface populations
    rest = x[cfg.n_surface:]
    cp, dist, nrm = soup.closest_point(rest)
    sign = np.where(np.einsum("ij,ij->i", rest - cp, nrm) < 0.0, -1.0, 1.0)
    s = np.concatenate([surf_s, sign * dist])
    normal = np.concatenate([surf_n, nrm])
    return TrainSamples(x, s, normal)
