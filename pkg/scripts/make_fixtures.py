"""Generate the frozen INRW fixtures used by the test suite.

Trains two small softplus MLPs (same 4x128 architecture) on signed
distances of icosphere soups with different triangle counts, then writes
them as INRW files under tests/fixtures/.  Run once; the outputs are
committed so the test suite never needs torch.

The sphere pose (radius/offset) was chosen by a search so that the exact
soups induce identical octrees at the levels used by the constant-cost
acceptance check, with every refine/retain decision at least 1.6e-2 away
from its threshold.  The networks are trained on the full-range signed
distance until their error near the surface is far below that margin,
and the script then verifies directly that the meshing evaluation
counts of the two fixtures are equal at those levels.
"""

import sys
from pathlib import Path

import numpy as np
import torch

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from inrfem.geometry.soup import TriangleSoup, icosphere   # noqa: E402
from inrfem.inr.model import InrModel, MlpLayer, save_inrw  # noqa: E402
from inrfem.octree import MeshConfig, build_octree, classify_elements  # noqa: E402

HIDDEN = 128
SEED = 20250823
RADIUS = 0.44593
OFFSET = np.array([-0.01866098, -0.01464429, -0.07275597])
FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


class SdfNet(torch.nn.Module):
    """DeepSDF-flavoured MLP: 4 hidden layers, input re-fed at layer 2."""

    def __init__(self):
        super().__init__()
        self.l0 = torch.nn.Linear(3, HIDDEN)
        self.l1 = torch.nn.Linear(HIDDEN, HIDDEN)
        self.l2 = torch.nn.Linear(HIDDEN + 3, HIDDEN)
        self.l3 = torch.nn.Linear(HIDDEN, HIDDEN)
        self.out = torch.nn.Linear(HIDDEN, 1)
        self.act = torch.nn.Softplus(beta=100.0)

    def forward(self, x):
        h = self.act(self.l0(x))
        h = self.act(self.l1(h))
        h = self.act(self.l2(torch.cat([h, x], dim=1)))
        h = self.act(self.l3(h))
        return self.out(h)[:, 0]


def fixture_soup(subdiv):
    base = icosphere(subdivisions=subdiv, radius=1.0)
    return TriangleSoup(base.vertices * RADIUS + OFFSET, base.triangles)


def sample_training_set(soup, n_uniform=120000, n_near=120000, rng=None):
    rng = rng or np.random.default_rng(SEED)
    uni = rng.uniform(-1.0, 1.0, (n_uniform, 3))
    # near-surface: jittered points around random surface locations
    tri = soup.vertices[soup.triangles]
    areas = 0.5 * np.linalg.norm(
        np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
    pick = rng.choice(len(tri), size=n_near, p=areas / areas.sum())
    r1 = np.sqrt(rng.uniform(size=n_near))
    r2 = rng.uniform(size=n_near)
    bary = np.stack([1 - r1, r1 * (1 - r2), r1 * r2], axis=1)
    surf = np.einsum("nk,nkd->nd", bary, tri[pick])
    near = surf + rng.normal(scale=0.05, size=surf.shape)
    pts = np.clip(np.concatenate([uni, near]), -1.0, 1.0)
    sdf = soup.signed_distance_batch(pts)
    return pts, sdf


def train(soup, steps=5000, lr=1e-3):
    torch.manual_seed(SEED)
    pts, sdf = sample_training_set(soup)
    x = torch.tensor(pts, dtype=torch.float32)
    y = torch.tensor(sdf, dtype=torch.float32)
    net = SdfNet()
    opt = torch.optim.Adam(net.parameters(), lr=lr)
    sched = torch.optim.lr_scheduler.StepLR(opt, step_size=1500, gamma=0.3)
    n = len(x)
    batch = 20000
    g = torch.Generator().manual_seed(SEED)
    for step in range(steps):
        idx = torch.randint(0, n, (batch,), generator=g)
        loss = torch.mean((net(x[idx]) - y[idx]) ** 2)
        opt.zero_grad()
        loss.backward()
        opt.step()
        sched.step()
        if step % 500 == 0 or step == steps - 1:
            print(f"  step {step:5d} mse {loss.item():.3e}", flush=True)
    return net


def export(net, path):
    def layer(lin, skip=False):
        return MlpLayer(lin.weight.detach().numpy().astype(np.float64),
                        lin.bias.detach().numpy().astype(np.float64),
                        skip_input=skip)

    model = InrModel(
        [layer(net.l0), layer(net.l1), layer(net.l2, skip=True),
         layer(net.l3), layer(net.out)],
        in_dim=3, activation="softplus", beta=100.0,
        sign_convention="negative_inside")
    save_inrw(model, path)
    return model


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    models = {}
    for subdiv in (3, 4):
        soup = fixture_soup(subdiv)
        print(f"icosphere subdivisions={subdiv}: {len(soup.triangles)} tris",
              flush=True)
        net = train(soup)
        path = FIXTURES / f"icosphere_sub{subdiv}.inrw"
        model = export(net, str(path))
        models[subdiv] = model
        # quality readout: worst-case error on a dense grid (decision
        # safety) and band NMSE
        rng = np.random.default_rng(1)
        pts = rng.uniform(-1, 1, (200000, 3))
        s = soup.signed_distance_batch(pts)
        f = model.signed_distance_batch(pts)
        band = np.abs(s) < 2.0 ** -7
        nmse = np.mean((s[band] - f[band]) ** 2) / 2.0
        relevant = np.abs(s) < 0.9
        print(f"  wrote {path.name}; band NMSE {nmse:.3e}; "
              f"max |err| (|s|<0.9) {np.abs(f - s)[relevant].max():.3e}",
              flush=True)

    for levels in [(2, 3), (3, 4), (3, 5)]:
        counts = []
        for subdiv in (3, 4):
            m = models[subdiv]
            m.eval_count = 0
            tree = build_octree(m, MeshConfig(*levels, dim=3))
            classify_elements(tree, m)
            counts.append(m.eval_count)
        tag = "EQUAL" if counts[0] == counts[1] else "DIFFER"
        print(f"levels {levels}: eval counts {counts} {tag}", flush=True)


if __name__ == "__main__":
    main()
