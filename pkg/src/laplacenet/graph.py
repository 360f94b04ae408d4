"""Weighted proximity graph on a net, its Laplacian, and quadratic forms.

Vertices are net points carrying the cell measures mu_i; an edge joins
two vertices at geodesic distance in (0, rho), with weight

    w_ij = 2 (n+2) / (nu_n rho^{n+2}) * mu_i * mu_j,

nu_n the Euclidean unit n-ball volume.  The Laplacian acts as

    (Lap u)_i = (1/mu_i) * sum_{j ~ i} w_ij (u_i - u_j).

Two conventions for the second factor circulate (mu_i vs mu_j inside the
sum); only the weight-based form above is self-adjoint with respect to
the mu-weighted inner product and has the Dirichlet energy as its
quadratic form, so that is the one implemented.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ._backend import kernels
from .errors import DisconnectedGraphWarning, RhoOutOfRange
from .manifolds import Manifold, unit_ball_volume
from .net import EpsNet

__all__ = ["WeightedGraph", "build_graph"]

DENSE_CUTOFF = 512  # below this, tests cross-validate against a dense matrix


@dataclass
class WeightedGraph:
    """Symmetric weighted graph with vertex measures.

    Edges are stored once with i < j; ``laplacian_matrix`` is the
    symmetric weight Laplacian L (L_ii = sum_j w_ij, L_ij = -w_ij), kept
    in CSR form.  The operator applied by :meth:`apply_laplacian` is
    diag(mu)^-1 L.
    """

    N: int
    dim: int
    rho: float
    mu: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_w: np.ndarray
    connected: bool
    _lap: Optional[sp.csr_matrix] = field(default=None, repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.edge_w)

    @property
    def degree_weight(self) -> np.ndarray:
        d = np.zeros(self.N)
        np.add.at(d, self.edge_i, self.edge_w)
        np.add.at(d, self.edge_j, self.edge_w)
        return d

    @property
    def laplacian_matrix(self) -> sp.csr_matrix:
        if self._lap is None:
            i = np.concatenate([self.edge_i, self.edge_j])
            j = np.concatenate([self.edge_j, self.edge_i])
            w = np.concatenate([self.edge_w, self.edge_w])
            off = sp.coo_matrix((-w, (i, j)), shape=(self.N, self.N))
            lap = (sp.diags(self.degree_weight) + off).tocsr()
            lap.sum_duplicates()
            object.__setattr__(self, "_lap", lap)
        return self._lap

    def laplacian_dense(self) -> np.ndarray:
        """Dense weight Laplacian; for cross-validation at small N."""
        return self.laplacian_matrix.toarray()

    def apply_laplacian(self, u) -> np.ndarray:
        """(1/mu_i) sum_j w_ij (u_i - u_j); annihilates constants exactly."""
        u = np.asarray(u, dtype=np.float64)
        return (self.laplacian_matrix @ u) / self.mu

    def dirichlet_energy(self, u) -> float:
        """Quadratic form of the (negative) Laplacian; always >= 0."""
        u = np.asarray(u, dtype=np.float64)
        diff = u[self.edge_i] - u[self.edge_j]
        return float(np.dot(self.edge_w, diff * diff))

    def inner(self, u, v) -> float:
        """mu-weighted inner product on graph functions."""
        return float(np.sum(self.mu * np.asarray(u) * np.asarray(v)))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def with_scaled_measure(self, c: float) -> "WeightedGraph":
        """Scale every vertex measure by c > 0 (weights scale by c^2)."""
        if c <= 0:
            raise ValueError("scale must be positive")
        return WeightedGraph(
            N=self.N, dim=self.dim, rho=self.rho,
            mu=self.mu * c,
            edge_i=self.edge_i, edge_j=self.edge_j,
            edge_w=self.edge_w * c * c,
            connected=self.connected,
        )

    def to_json(self) -> str:
        return json.dumps({
            "N": self.N,
            "rho": self.rho,
            "mu": self.mu.tolist(),
            "edges": [[int(i), int(j), w] for i, j, w in
                      zip(self.edge_i, self.edge_j, self.edge_w)],
        }, indent=1)

    def export_coordinate_text(self) -> str:
        """Weight Laplacian in 1-based `i j value` triples, one per line."""
        lap = self.laplacian_matrix.tocoo()
        lines = [
            f"{i + 1} {j + 1} {v:.17g}"
            for i, j, v in sorted(zip(lap.row, lap.col, lap.data))
        ]
        return "\n".join(lines) + "\n"


def build_graph(net: EpsNet, m: Manifold, rho: float) -> WeightedGraph:
    """Connect net points closer than rho and attach the edge weights.

    Requires eps < rho < i0/2.  A disconnected result is flagged with a
    DisconnectedGraphWarning rather than an error; spectral routines then
    report a (near-)zero second eigenvalue.
    """
    if not net.eps < rho < 0.5 * m.injectivity_radius:
        raise RhoOutOfRange(
            f"rho={rho} outside (eps, i0/2)=({net.eps}, {0.5 * m.injectivity_radius})"
        )
    n = m.dim
    ei, ej, _dist = kernels.edges(m.kind, m.params, net.points, rho)
    coef = 2.0 * (n + 2) / (unit_ball_volume(n) * rho ** (n + 2))
    w = coef * net.mu[ei] * net.mu[ej]

    N = net.size
    adj = sp.coo_matrix((np.ones(len(ei)), (ei, ej)), shape=(N, N))
    ncomp = connected_components(adj, directed=False, return_labels=False) if N else 0
    connected = ncomp <= 1
    if not connected:
        warnings.warn(
            f"graph with rho={rho} has {ncomp} components",
            DisconnectedGraphWarning,
            stacklevel=2,
        )
    return WeightedGraph(
        N=N, dim=n, rho=float(rho), mu=net.mu,
        edge_i=ei, edge_j=ej, edge_w=w, connected=connected,
    )
