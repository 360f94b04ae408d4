import numpy as np
import pytest

from laplacenet.graph import build_graph
from laplacenet.harness import SweepConfig, run_sweep
from laplacenet.manifolds import make_rng, manifold_from_spec
from laplacenet.net import build_net

TORUS_SPEC = "torus2:6.283185307179586,6.283185307179586"
LADDER = [0.25, 0.18, 0.12, 0.08]


@pytest.fixture(scope="session")
def sphere_sweep():
    """The reference sphere ladder; shared by the convergence, clustering,
    alignment, diagnostics, and determinism acceptance checks."""
    cfg = SweepConfig(manifold="sphere2:1", eps_levels=list(LADDER))
    return cfg, run_sweep(cfg)


@pytest.fixture(scope="session")
def torus_sweep():
    cfg = SweepConfig(manifold=TORUS_SPEC, eps_levels=list(LADDER))
    return cfg, run_sweep(cfg)


@pytest.fixture(scope="session")
def sphere_net_300():
    """A sphere net with N close to 300 plus its graph, for identity checks."""
    m = manifold_from_spec("sphere2:1")
    net = build_net(m, 0.17, make_rng(7, 0))
    graph = build_graph(net, m, 0.4)
    return m, net, graph
