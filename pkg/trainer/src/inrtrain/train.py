"""Training loop: Adam with cosine-decayed learning rate, CSV log."""

import csv
import math

import numpy as np
import torch

from .errors import NonFiniteLoss
from .losses import loss_terms
from .network import SdfNet


class TrainConfig:
    def __init__(self, steps=2000, lr=1e-4, batch=8192, seed=0,
                 log_every=50):
        if steps < 0 or batch < 1 or lr <= 0.0:
            raise ValueError("need steps >= 0, batch >= 1, lr > 0")
        self.steps = int(steps)
        self.lr = float(lr)
        self.batch = int(batch)
        self.seed = int(seed)
        self.log_every = int(log_every)


def train(samples, net_cfg, loss_cfg, train_cfg, log_path=None):
    """Fit a signed-distance network to pre-drawn samples.

    Returns (net, log_rows) where log_rows holds tuples of
    (step, total, sdf, eikonal, normal).  Gradients of the network with
    respect to the input point come from automatic differentiation.
    """
    torch.manual_seed(train_cfg.seed)
    net = SdfNet(net_cfg)
    x = torch.tensor(np.asarray(samples.x), dtype=torch.float32)
    s = torch.tensor(np.asarray(samples.s), dtype=torch.float32)
    nrm = torch.tensor(np.asarray(samples.normal), dtype=torch.float32)

    opt = torch.optim.Adam(net.parameters(), lr=train_cfg.lr)
    gen = torch.Generator().manual_seed(train_cfg.seed)
    n = len(x)
    rows = []
    for step in range(train_cfg.steps):
        # cosine decay of the learning rate over the full schedule
        frac = step / max(1, train_cfg.steps)
        for group in opt.param_groups:
            group["lr"] = train_cfg.lr * 0.5 * (1.0 + math.cos(
                math.pi * frac))
        idx = torch.randint(0, n, (min(train_cfg.batch, n),), generator=gen)
        xb = x[idx].clone().requires_grad_(True)
        f = net(xb)
        grad = torch.autograd.grad(f.sum(), xb, create_graph=True)[0]
        total, sdf, eik, nrm_t = loss_terms(f, grad, s[idx], nrm[idx],
                                            loss_cfg)
        terms = {"total": float(total.detach()), "sdf": float(sdf.detach()),
                 "eikonal": float(eik.detach()),
                 "normal": float(nrm_t.detach())}
        if not np.isfinite(terms["total"]):
            raise NonFiniteLoss(step, terms)
        opt.zero_grad()
        total.backward()
        opt.step()
        if step % train_cfg.log_every == 0 or step == train_cfg.steps - 1:
            rows.append((step, terms["total"], terms["sdf"],
                         terms["eikonal"], terms["normal"]))
    if log_path is not None:
        with open(log_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "total", "sdf", "eikonal", "normal"])
            writer.writerows(rows)
    net.eval()
    return net, rows
