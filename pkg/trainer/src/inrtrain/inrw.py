"""INRW weight files: JSON manifest with base64 float32 payloads.

The format is shared with the solver side; exported files must load
there unchanged.  A small numpy loader is included so the trainer's own
tests can verify round trips without the solver package.
"""

import base64
import json

import numpy as np

from .errors import FormatError

_MAGIC = "INRW"


def export_inrw(net, path, center=(0.0, 0.0, 0.0), scale=1.0):
    """Write a trained network's weights with the domain transform."""
    layers = []
    for k, lin in enumerate(net.linears):
        w = lin.weight.detach().cpu().numpy().astype("<f4")
        b = lin.bias.detach().cpu().numpy().astype("<f4")
        layers.append({
            "in": int(w.shape[1]),
            "out": int(w.shape[0]),
            "skip_input": bool(k == net.cfg.skip_layer and k > 0),
            "weights_b64": base64.b64encode(w.tobytes()).decode("ascii"),
            "bias_b64": base64.b64encode(b.tobytes()).decode("ascii"),
        })
    doc = {
        "magic": _MAGIC,
        "version": 1,
        "in_dim": 3,
        "activation": "softplus",
        "beta": net.cfg.beta,
        "sign_convention": "negative_inside",
        "transform": {"center": list(map(float, center)),
                      "scale": float(scale)},
        "layers": layers,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


class NumpyMlp:
    """Minimal forward pass for verifying exported files."""

    def __init__(self, weights, biases, skips, beta, center, scale):
        self.weights = weights
        self.biases = biases
        self.skips = skips
        self.beta = beta
        self.center = np.asarray(center, dtype=float)
        self.scale = float(scale)

    def __call__(self, pts):
        x = (np.atleast_2d(np.asarray(pts, float)) - self.center) * self.scale
        h = x
        last = len(self.weights) - 1
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if self.skips[k]:
                h = np.concatenate([h, x], axis=1)
            h = h @ w.T + b
            if k < last:
                z = self.beta * h
                h = np.where(z > 30.0, h,
                             np.log1p(np.exp(np.minimum(z, 30.0)))
                             / self.beta)
        return h[:, 0]


def load_inrw_numpy(path):
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot parse {path}: {exc}") from exc
    if doc.get("magic") != _MAGIC or doc.get("version") != 1:
        raise FormatError(f"{path}: bad magic/version")
    weights, biases, skips = [], [], []
    for spec in doc["layers"]:
        w = np.frombuffer(base64.b64decode(spec["weights_b64"]),
                          dtype="<f4").astype(float)
        b = np.frombuffer(base64.b64decode(spec["bias_b64"]),
                          dtype="<f4").astype(float)
        n_in, n_out = int(spec["in"]), int(spec["out"])
        if w.size != n_in * n_out or b.size != n_out:
            raise FormatError(f"{path}: payload/manifest size mismatch")
        weights.append(w.reshape(n_out, n_in))
        biases.append(b)
        skips.append(bool(spec.get("skip_input", False)))
    tf = doc["transform"]
    return NumpyMlp(weights, biases, skips, float(doc.get("beta", 100.0)),
                    tf["center"], tf["scale"])
