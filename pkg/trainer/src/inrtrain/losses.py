"""Loss variants for signed-distance training.

All variants share the clamped data misfit; the igr variant adds the
eikonal and normal-alignment terms on samples near the surface.
"""

import torch

_VARIANTS = ("igr", "l1_clamped", "l2_clamped", "l2_smooth")


class LossConfig:
    def __init__(self, variant="igr", delta=0.1, lambda_g=0.1, tau=1.0,
                 omega=0.1, alpha=2.0, use_eikonal=True, use_normal=True):
        if variant not in _VARIANTS:
            raise ValueError(f"unknown loss variant {variant!r}")
        if delta <= 0.0 or omega <= 0.0:
            raise ValueError("clamp delta and band omega must be positive")
        if lambda_g < 0.0 or tau < 0.0:
            raise ValueError("term weights must be non-negative")
        self.variant = variant
        self.delta = float(delta)
        self.lambda_g = float(lambda_g)
        self.tau = float(tau)
        self.omega = float(omega)
        self.alpha = float(alpha)
        self.use_eikonal = bool(use_eikonal)
        self.use_normal = bool(use_normal)


def loss_terms(f, grad, s, normal, cfg):
    """Return (total, sdf_term, eikonal_term, normal_term) tensors.

    f: predictions (n,); grad: d f / d x (n,3); s: target signed
    distances (n,); normal: target unit normals (n,3).
    """
    d = cfg.delta
    if cfg.variant == "l1_clamped":
        sdf = torch.mean(torch.abs(torch.clamp(s, -d, d)
                                   - torch.clamp(f, -d, d)))
    elif cfg.variant == "l2_smooth":
        sdf = torch.mean((1.0 + cfg.alpha ** torch.abs(s)) * (s - f) ** 2)
    else:  # igr and l2_clamped share the squared clamped misfit
        sdf = torch.mean((torch.clamp(s, -d, d)
                          - torch.clamp(f, -d, d)) ** 2)

    zero = f.new_zeros(())
    eik = zero
    nrm_term = zero
    if cfg.variant == "igr":
        band = torch.abs(s) < cfg.omega
        if band.any():
            g = grad[band]
            gn = g.norm(dim=1)
            if cfg.use_eikonal:
                eik = torch.mean((gn - 1.0) ** 2)
            if cfg.use_normal:
                # points with a vanishing gradient have no direction to
                # align; they are penalized by the eikonal term instead
                ok = gn > 0.0
                if ok.any():
                    unit = g[ok] / gn[ok, None]
                    nrm_term = torch.mean(
                        ((unit * normal[band][ok]).sum(dim=1) - 1.0) ** 2)
    total = sdf + cfg.lambda_g * eik + cfg.tau * nrm_term
    return total, sdf, eik, nrm_term
