"""Calibration probe for the desk-scale trainer acceptance thresholds."""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "trainer/src"))

import inrtrain as it
from inrtrain.inrw import export_inrw, load_inrw_numpy


def main():
    soup = it.icosphere(3, 0.5)
    cfg = it.SamplingConfig(9000, 5000, 6000, 0.001)
    samples = it.sample_hybrid(soup, cfg, seed=42)
    t0 = time.time()
    net, rows = it.train(samples, it.desk_preset(), it.LossConfig("igr"),
                         it.TrainConfig(steps=2000, lr=1e-3, seed=42))
    print(f"train 2000 steps: {time.time() - t0:.0f}s, last {rows[-1]}",
          flush=True)
    export_inrw(net, "/tmp/desk_probe.inrw")
    model = load_inrw_numpy("/tmp/desk_probe.inrw")
    nmse = it.nmse_delta(model, soup, 2.0 ** -7, 64)
    print(f"NMSE_2^-7 (grid 64) = {nmse:.3e}", flush=True)

    from inrfem.inr.model import load_inrw, GradientCache
    from inrfem.octree import (MeshConfig, build_octree, classify_elements,
                               extract_surrogate_boundary,
                               attach_distance_vectors)
    from inrfem.metrics import gauss_point_direction_error
    geom = load_inrw("/tmp/desk_probe.inrw")
    tree = build_octree(geom, MeshConfig(3, 5, dim=3))
    markers, _ = classify_elements(tree, geom)
    faces = extract_surrogate_boundary(tree, markers)
    attach_distance_vectors(faces, geom, GradientCache())
    from inrfem.geometry.soup import icosphere as ico_p
    mcs, sd, fields = gauss_point_direction_error(
        faces, ico_p(subdivisions=3, radius=0.5), geom=geom)
    print(f"MCS = {mcs:.5f} sd {sd:.5f} skipped {fields['skipped']}",
          flush=True)


if __name__ == "__main__":
    main()
