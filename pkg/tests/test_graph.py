"""Graph weights, Laplacian identities, guards, exports."""

import math
import warnings

import numpy as np
import pytest

from laplacenet.errors import DisconnectedGraphWarning, RhoOutOfRange
from laplacenet.graph import WeightedGraph, build_graph
from laplacenet.manifolds import FlatTorus2, Sphere2, make_rng
from laplacenet.net import EpsNet, build_net

SPHERE = Sphere2(1.0)


def hand_net(m, points, mu, eps):
    pts = np.asarray(points, dtype=np.float64)
    return EpsNet(manifold=m, points=pts, eps=eps,
                  separation=0.0, covering_radius=eps,
                  mu=np.asarray(mu, dtype=np.float64), quadrature=None)


def test_weight_formula_by_hand():
    # Two nearby points on the unit sphere (n=2, nu_2 = pi), rho = 0.5:
    # w_12 = 2*(2+2)/(pi * 0.5^4) * mu_1 * mu_2.
    a = 0.3
    pts = [[1, 0, 0], [math.cos(a), math.sin(a), 0], [-1, 0, 0]]
    mu = [0.7, 1.1, 4 * math.pi - 1.8]
    net = hand_net(SPHERE, pts, mu, eps=0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DisconnectedGraphWarning)
        g = build_graph(net, SPHERE, 0.5)
    assert g.edge_count == 1
    assert (g.edge_i[0], g.edge_j[0]) == (0, 1)
    expect = 2 * 4 / (math.pi * 0.5**4) * 0.7 * 1.1
    assert g.edge_w[0] == pytest.approx(expect, rel=1e-14)
    # Vertex 2 is isolated, so the graph is disconnected and warned about
    # at build time (checked separately below).


def test_rho_out_of_range():
    net = build_net(SPHERE, 0.3, make_rng(1, 0))
    for bad in (0.3, 0.2, 0.5 * math.pi, 2.0):
        with pytest.raises(RhoOutOfRange):
            build_graph(net, SPHERE, bad)


@pytest.fixture(scope="module")
def small_graph():
    net = build_net(SPHERE, 0.3, make_rng(2, 0))
    return net, build_graph(net, SPHERE, 0.7)


def test_laplacian_identities(small_graph):
    net, g = small_graph
    rng = make_rng(3)
    u = rng.standard_normal(g.N)
    v = rng.standard_normal(g.N)
    # Rayleigh identity: <Lap u, u>_mu equals the Dirichlet energy.
    assert g.inner(g.apply_laplacian(u), u) == pytest.approx(
        g.dirichlet_energy(u), rel=1e-12)
    # Self-adjointness in the mu-inner product.
    assert g.inner(g.apply_laplacian(u), v) == pytest.approx(
        g.inner(u, g.apply_laplacian(v)), rel=1e-10)
    # Constants are in the kernel exactly.
    np.testing.assert_allclose(g.apply_laplacian(np.ones(g.N)), 0.0, atol=1e-13)
    assert g.dirichlet_energy(np.ones(g.N)) == 0.0
    # Energy is nonnegative.
    assert g.dirichlet_energy(u) >= 0.0


def test_dense_and_sparse_laplacian_agree(small_graph):
    _, g = small_graph
    L = g.laplacian_dense()
    np.testing.assert_allclose(L, L.T, atol=1e-15)
    u = make_rng(4).standard_normal(g.N)
    np.testing.assert_allclose(L @ u / g.mu, g.apply_laplacian(u), rtol=1e-12)
    # Row sums vanish (constants in kernel).
    np.testing.assert_allclose(L.sum(axis=1), 0.0, atol=1e-12)
    # Degrees match the off-diagonal weights.
    np.testing.assert_allclose(np.diag(L), g.degree_weight, rtol=1e-14)


def test_with_scaled_measure(small_graph):
    _, g = small_graph
    h = g.with_scaled_measure(2.0)
    np.testing.assert_allclose(h.mu, 2.0 * g.mu)
    np.testing.assert_allclose(h.edge_w, 4.0 * g.edge_w)
    # Lap scales by the net factor c^2 / c = c.
    u = make_rng(5).standard_normal(g.N)
    np.testing.assert_allclose(
        h.apply_laplacian(u), 2.0 * g.apply_laplacian(u), rtol=1e-12)
    with pytest.raises(ValueError):
        g.with_scaled_measure(0.0)


def test_disconnected_graph_warns():
    # Two tight pairs on the torus, far from each other.
    m = FlatTorus2(2 * math.pi, 2 * math.pi)
    pts = [[0.0, 0.0], [0.3, 0.0], [3.0, 3.0], [3.0, 3.3]]
    net = hand_net(m, pts, [1.0, 1.0, 1.0, 1.0], eps=0.35)
    with pytest.warns(DisconnectedGraphWarning):
        g = build_graph(net, m, 0.5)
    assert not g.connected
    assert g.edge_count == 2


def test_connected_flag_set(small_graph):
    _, g = small_graph
    assert g.connected


def test_export_coordinate_text():
    m = FlatTorus2(2 * math.pi, 2 * math.pi)
    net = hand_net(m, [[0.0, 0.0], [0.3, 0.0]], [1.0, 2.0], eps=0.25)
    g = build_graph(net, m, 0.5)
    w = g.edge_w[0]
    lines = g.export_coordinate_text().strip().splitlines()
    # 1-based COO triples of the symmetric weight Laplacian.
    assert lines == [
        f"1 1 {w:.17g}",
        f"1 2 {-w:.17g}",
        f"2 1 {-w:.17g}",
        f"2 2 {w:.17g}",
    ]


def test_json_dump_shape(small_graph):
    import json
    _, g = small_graph
    d = json.loads(g.to_json())
    assert d["N"] == g.N
    assert len(d["edges"]) == g.edge_count
    i, j, w = d["edges"][0]
    assert (i, j, w) == (g.edge_i[0], g.edge_j[0], g.edge_w[0])
