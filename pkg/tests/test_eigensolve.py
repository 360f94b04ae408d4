"""Eigensolver oracles: tiny closed-form problems, dense/Lanczos agreement,
projections, and clustering."""

import math

import numpy as np
import pytest

from laplacenet.eigensolve import (
    SpectrumResult,
    cluster_eigenvalues,
    smallest_k,
    spectral_projection,
)
from laplacenet.errors import IntervalNotResolved, KTooLarge
from laplacenet.graph import WeightedGraph
from laplacenet.manifolds import make_rng


def graph_from_dense(W, mu):
    """Build a WeightedGraph directly from a symmetric weight matrix."""
    W = np.asarray(W, dtype=np.float64)
    iu, ju = np.triu_indices(len(W), k=1)
    mask = W[iu, ju] != 0
    return WeightedGraph(
        N=len(W), dim=2, rho=1.0, mu=np.asarray(mu, dtype=np.float64),
        edge_i=iu[mask], edge_j=ju[mask], edge_w=W[iu, ju][mask],
        connected=True,
    )


def test_three_vertex_oracle():
    # Path graph 0-1-2 with unit weights and measures: L = [[1,-1,0],
    # [-1,2,-1],[0,-1,1]].  Characteristic polynomial lambda(lambda-1)(lambda-3),
    # worked out by hand.
    g = graph_from_dense([[0, 1, 0], [1, 0, 1], [0, 1, 0]], [1, 1, 1])
    s = smallest_k(g, 3, method="dense")
    np.testing.assert_allclose(s.eigenvalues, [0.0, 1.0, 3.0], atol=1e-12)
    # lambda=1 eigenvector is (1, 0, -1)/norm; signs canonicalized.
    v = s.eigenvectors[:, 1]
    np.testing.assert_allclose(v, [1, 0, -1] / np.sqrt(2) * np.sign(v[0]),
                               atol=1e-12)


def test_nonuniform_measure_oracle():
    # Two vertices, w=3, mu=(1,2): generalized problem has eigenvalues
    # 0 and w*(1/mu1 + 1/mu2) = 3*(1 + 1/2) = 4.5.
    g = graph_from_dense([[0, 3], [3, 0]], [1.0, 2.0])
    s = smallest_k(g, 2, method="dense")
    np.testing.assert_allclose(s.eigenvalues, [0.0, 4.5], atol=1e-12)


def test_mu_orthonormality_and_residuals():
    rng = make_rng(31)
    A = rng.random((12, 12))
    W = np.triu(A + A.T, 1)
    W = W + W.T
    mu = 0.5 + rng.random(12)
    g = graph_from_dense(W, mu)
    s = smallest_k(g, 12, method="dense")
    G = s.eigenvectors.T @ (mu[:, None] * s.eigenvectors)
    np.testing.assert_allclose(G, np.eye(12), atol=1e-10)
    assert s.mu_gram_error < 1e-12
    # Eigen-equation holds: (1/mu) L v = lambda v.
    for a in range(12):
        np.testing.assert_allclose(
            g.apply_laplacian(s.eigenvectors[:, a]),
            s.eigenvalues[a] * s.eigenvectors[:, a], atol=1e-8)


@pytest.mark.parametrize("trial", range(5))
def test_dense_vs_lanczos(trial):
    rng = make_rng(32, trial)
    N = 25 + 3 * trial
    A = rng.random((N, N))
    W = np.triu(A + A.T, 1)
    W = W + W.T
    mu = 0.5 + rng.random(N)
    g = graph_from_dense(W, mu)
    k = 6
    d = smallest_k(g, k, method="dense")
    l = smallest_k(g, k, method="lanczos", tol=1e-11)
    np.testing.assert_allclose(l.eigenvalues, d.eigenvalues, atol=1e-9)
    assert l.method == "lanczos" and d.method == "dense"
    assert np.all(l.residuals <= 1e-11 * max(1.0, l.eigenvalues[-1]) * 10)


def test_guards():
    g = graph_from_dense([[0, 1], [1, 0]], [1, 1])
    with pytest.raises(KTooLarge):
        smallest_k(g, 3)
    with pytest.raises(KTooLarge):
        smallest_k(g, 0)
    with pytest.raises(ValueError):
        smallest_k(g, 1, tol=0.0)
    with pytest.raises(ValueError):
        smallest_k(g, 1, method="arnoldi")


def test_spectral_projection_resolution():
    rng = make_rng(33)
    A = rng.random((15, 15))
    W = np.triu(A + A.T, 1)
    W = W + W.T
    mu = 0.5 + rng.random(15)
    g = graph_from_dense(W, mu)
    s = smallest_k(g, 15, method="dense")
    u = rng.standard_normal(15)
    lam = s.eigenvalues
    # Projecting onto the full computed range reproduces u.
    full = spectral_projection(s, g, (-1.0, lam[-1]), u)
    np.testing.assert_allclose(full, u, atol=1e-9)
    # Complementary intervals split u additively.
    mid = 0.5 * (lam[4] + lam[5])
    lo = spectral_projection(s, g, (-1.0, mid), u)
    hi = spectral_projection(s, g, (mid, lam[-1]), u)
    np.testing.assert_allclose(lo + hi, u, atol=1e-9)
    # Empty interval projects to zero.
    gap = 0.5 * (lam[0] + lam[1])
    tiny = spectral_projection(s, g, (gap, gap + 1e-15), u)
    np.testing.assert_allclose(tiny, 0.0)
    # Interval beyond the computed spectrum is refused.
    with pytest.raises(IntervalNotResolved):
        spectral_projection(s, g, (0.0, lam[-1] + 1.0), u)


def test_cluster_eigenvalues():
    evs = np.array([0.0, 2.0, 2.001, 2.002, 6.0, 6.0, 12.0])
    assert cluster_eigenvalues(evs, 0.1) == [(0, 0), (1, 3), (4, 5), (6, 6)]
    # Tighter threshold splits the near-degenerate block.
    assert cluster_eigenvalues(evs, 1e-5) == [
        (0, 0), (1, 1), (2, 2), (3, 3), (4, 5), (6, 6)]
    assert cluster_eigenvalues(np.array([3.0]), 0.1) == [(0, 0)]
    assert cluster_eigenvalues(np.array([]), 0.1) == []
    with pytest.raises(ValueError):
        cluster_eigenvalues(evs, 0.0)


def test_cluster_accepts_spectrum_result():
    s = SpectrumResult(
        eigenvalues=np.array([0.0, 1.0, 1.0005, 3.0]),
        eigenvectors=np.zeros((4, 4)), residuals=np.zeros(4),
        mu_gram_error=0.0, method="dense")
    assert cluster_eigenvalues(s, 0.01) == [(0, 0), (1, 2), (3, 3)]
