"""Signed-distance MLP with a single skip-in layer."""

import torch


class NetworkConfig:
    """Architecture of the signed-distance network.

    hidden: number of hidden layers; width: neurons per hidden layer;
    skip_layer: index of the hidden layer whose input is concatenated
    with the raw coordinates; beta: softplus sharpness.
    """

    def __init__(self, hidden=8, width=512, skip_layer=4, beta=100.0):
        if hidden < 1 or width < 1:
            raise ValueError("need at least one hidden layer and one neuron")
        if not 0 <= skip_layer < hidden:
            raise ValueError(
                f"skip layer {skip_layer} outside hidden range [0, {hidden})")
        if beta <= 0.0:
            raise ValueError("softplus beta must be positive")
        self.hidden = int(hidden)
        self.width = int(width)
        self.skip_layer = int(skip_layer)
        self.beta = float(beta)


def desk_preset():
    """Small architecture for laptop-scale runs: 4 layers of 128."""
    return NetworkConfig(hidden=4, width=128, skip_layer=2)


class SdfNet(torch.nn.Module):
    """MLP f(x) -> signed distance, negative inside."""

    def __init__(self, cfg):
        super().__init__()
        self.cfg = cfg
        dims = []
        for k in range(cfg.hidden):
            n_in = 3 if k == 0 else cfg.width
            if k == cfg.skip_layer and k > 0:
                n_in += 3
            dims.append((n_in, cfg.width))
        dims.append((cfg.width, 1))
        self.linears = torch.nn.ModuleList(
            [torch.nn.Linear(a, b) for a, b in dims])
        self.act = torch.nn.Softplus(beta=cfg.beta)

    def forward(self, x):
        h = x
        for k in range(self.cfg.hidden):
            if k == self.cfg.skip_layer and k > 0:
                h = torch.cat([h, x], dim=1)
            h = self.act(self.linears[k](h))
        return self.linears[-1](h)[:, 0]
