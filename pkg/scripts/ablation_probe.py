"""Calibration probe for the sampling/loss ablation directionality."""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "trainer/src"))

import inrtrain as it
from inrtrain.inrw import export_inrw, load_inrw_numpy
from inrtrain.network import NetworkConfig

SEEDS = (0, 1, 2)
STEPS = 300
NET = dict(hidden=3, width=64, skip_layer=1)


def run(soup, sampling, loss_variant, seed):
    samples = it.sample_hybrid(soup, sampling, seed=seed)
    net, _ = it.train(samples, NetworkConfig(**NET),
                      it.LossConfig(loss_variant),
                      it.TrainConfig(steps=STEPS, lr=1e-3, batch=4096,
                                     seed=seed))
    import torch
    with torch.no_grad():
        fn = lambda p: net(torch.tensor(p, dtype=torch.float32)).numpy()
        return it.nmse_delta(fn, soup, 2.0 ** -7, 48)


def main():
    soup = it.icosphere(3, 0.5)
    hybrid = it.SamplingConfig(3600, 2200, 2200, 0.001)
    uniform = it.SamplingConfig(0, 0, 8000, 0.001)
    for label, sampling, variant in (
            ("igr-hybrid", hybrid, "igr"),
            ("l1-hybrid", hybrid, "l1_clamped"),
            ("igr-uniform", uniform, "igr")):
        vals = []
        for seed in SEEDS:
            t0 = time.time()
            v = run(soup, sampling, variant, seed)
            vals.append(v)
            print(f"{label} seed {seed}: NMSE {v:.3e} "
                  f"({time.time() - t0:.0f}s)", flush=True)
        print(f"{label} median {np.median(vals):.3e}", flush=True)


if __name__ == "__main__":
    main()
