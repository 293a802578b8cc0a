"""Isotropic linear-elastic material."""

from dataclasses import dataclass

from ..errors import InvalidMaterial


def lame_from_material(E, nu, mode="full_3d"):
    """Lamé parameters; plane strain in 2D uses the same formulas as 3D."""
    if not E > 0:
        raise InvalidMaterial(f"Young's modulus must be positive, got {E}")
    if not -1.0 < nu < 0.5:
        raise InvalidMaterial(f"Poisson ratio must lie in (-1, 0.5), got {nu}")
    if mode not in ("plane_strain", "full_3d"):
        raise InvalidMaterial(f"unknown mode {mode!r}")
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    mu = E / (2.0 * (1.0 + nu))
    return lam, mu


@dataclass(frozen=True)
class Material:
    youngs_modulus: float
    poisson_ratio: float
    mode: str = "full_3d"

    @property
    def lame(self):
        return lame_from_material(self.youngs_modulus, self.poisson_ratio,
                                  self.mode)

    @classmethod
    def from_lame(cls, lam, mu, mode="full_3d"):
        """Recover (E, nu) from Lamé parameters."""
        E = mu * (3.0 * lam + 2.0 * mu) / (lam + mu)
        nu = lam / (2.0 * (lam + mu))
        return cls(E, nu, mode)
