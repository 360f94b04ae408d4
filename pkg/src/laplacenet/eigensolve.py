"""Smallest eigenpairs of the graph Laplacian in the mu-weighted metric.

The generalized problem L v = lambda diag(mu) v is symmetrized as
B = D^-1/2 L D^-1/2 with D = diag(mu); eigenpairs map back through
v = D^-1/2 y, which makes Euclidean orthonormality of y exactly
mu-orthonormality of v.  Small problems go through the dense LAPACK
solver; large ones through Lanczos with full reorthogonalization and
Ritz-residual stopping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import IntervalNotResolved, KTooLarge, NoConvergence
from .graph import WeightedGraph
from .manifolds import make_rng

__all__ = [
    "SpectrumResult",
    "smallest_k",
    "spectral_projection",
    "cluster_eigenvalues",
]

DENSE_CUTOFF = 2000
DEFAULT_TOL = 1e-9
# Krylov cap.  The nominal 4k+80 is far too small to resolve tightly
# clustered low eigenvalues at desk scale, so the cap has a generous floor;
# full reorthogonalization keeps the basis usable at this size.
_LANCZOS_FLOOR = 1200
_CHECK_EVERY = 10


@dataclass
class SpectrumResult:
    """Ascending eigenvalues with mu-orthonormal eigenvectors.

    ``eigenvectors[:, a]`` belongs to ``eigenvalues[a]``; ``residuals[a]``
    is the mu-norm of the eigen-residual.  Signs are canonicalized so the
    largest-magnitude entry of each vector is positive.
    """

    eigenvalues: np.ndarray      # (k,)
    eigenvectors: np.ndarray     # (N, k)
    residuals: np.ndarray        # (k,)
    mu_gram_error: float
    method: str


def _symmetrized_operator(g: WeightedGraph):
    s = 1.0 / np.sqrt(g.mu)
    lap = g.laplacian_matrix

    def matvec(y):
        return s * (lap @ (s * y))

    return s, matvec


def smallest_k(g: WeightedGraph, k: int, tol: float = DEFAULT_TOL,
               seed: int = 0, method: str = "auto",
               dense_cutoff: int = DENSE_CUTOFF) -> SpectrumResult:
    """k smallest eigenpairs of the negative graph Laplacian.

    method: "auto" picks dense below ``dense_cutoff`` vertices and Lanczos
    above; "dense"/"lanczos" force a path.  Raises KTooLarge for k > N and
    NoConvergence (carrying the partial result) if Lanczos hits its cap.
    """
    if not 1 <= k <= g.N:
        raise KTooLarge(f"k={k} not in [1, N={g.N}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method == "auto":
        method = "dense" if g.N <= dense_cutoff else "lanczos"

    s, matvec = _symmetrized_operator(g)
    if method == "dense":
        B = (s[:, None] * g.laplacian_dense()) * s[None, :]
        B = 0.5 * (B + B.T)
        evals, Y = scipy.linalg.eigh(B, subset_by_index=(0, k - 1))
    elif method == "lanczos":
        evals, Y = _lanczos_smallest(matvec, g.N, k, tol, seed)
    else:
        raise ValueError(f"unknown method {method!r}")

    # Canonical signs for determinism across runs and backends.
    for a in range(Y.shape[1]):
        if Y[np.argmax(np.abs(Y[:, a])), a] < 0:
            Y[:, a] = -Y[:, a]

    res = np.array([
        float(np.linalg.norm(matvec(Y[:, a]) - evals[a] * Y[:, a]))
        for a in range(k)
    ])
    gram = Y.T @ Y
    vecs = s[:, None] * Y
    result = SpectrumResult(
        eigenvalues=np.asarray(evals, dtype=np.float64),
        eigenvectors=vecs,
        residuals=res,
        mu_gram_error=float(np.max(np.abs(gram - np.eye(k)))),
        method=method,
    )
    if method == "lanczos" and np.any(res > tol * max(1.0, float(evals[-1]))):
        raise NoConvergence(
            f"Lanczos residuals {res.max():.3e} above tol after cap", result
        )
    return result


def _lanczos_smallest(matvec, N: int, k: int, tol: float, seed: int):
    """Lanczos with full (twice-iterated) reorthogonalization.

    Stops when the k smallest Ritz pairs have residual bounds below
    tol * max(1, ritz_k); returns (values, Ritz vectors in the symmetrized
    coordinates).
    """
    max_dim = min(N, max(4 * k + 80, _LANCZOS_FLOOR))
    rng = make_rng(seed, 0x4C414E43)  # dedicated stream for start vectors
    V = np.empty((N, max_dim))
    alpha = np.zeros(max_dim)
    beta = np.zeros(max_dim)

    v = rng.standard_normal(N)
    v /= np.linalg.norm(v)
    V[:, 0] = v
    m = 0
    while m < max_dim:
        w = matvec(V[:, m])
        alpha[m] = np.dot(V[:, m], w)
        w -= alpha[m] * V[:, m]
        if m > 0:
            w -= beta[m - 1] * V[:, m - 1]
        # Full reorthogonalization, two passes of classical Gram-Schmidt.
        for _ in range(2):
            w -= V[:, : m + 1] @ (V[:, : m + 1].T @ w)
        b = np.linalg.norm(w)
        m += 1
        if m == max_dim:
            break
        if b < 1e-13 * max(1.0, float(np.abs(alpha[:m]).max())):
            # Invariant subspace found; restart with a fresh direction.
            w = rng.standard_normal(N)
            for _ in range(2):
                w -= V[:, :m] @ (V[:, :m].T @ w)
            b = 0.0
            nw = np.linalg.norm(w)
            if nw < 1e-13:
                break
            V[:, m] = w / nw
            beta[m - 1] = 0.0
            continue
        beta[m - 1] = b
        V[:, m] = w / b
        if m >= k and (m % _CHECK_EVERY == 0 or m == max_dim):
            ritz, S = scipy.linalg.eigh_tridiagonal(alpha[:m], beta[: m - 1])
            bounds = np.abs(beta[m - 1] * S[-1, :k])
            if np.all(bounds <= tol * max(1.0, float(ritz[k - 1]))):
                return ritz[:k], V[:, :m] @ S[:, :k]
    ritz, S = scipy.linalg.eigh_tridiagonal(alpha[:m], beta[: m - 1])
    return ritz[:k], V[:, :m] @ S[:, :k]


def spectral_projection(s: SpectrumResult, g: WeightedGraph,
                        interval: Tuple[float, float], u) -> np.ndarray:
    """Project u onto computed eigenvectors with eigenvalue in (lo, hi].

    The whole interval must lie within the resolved part of the spectrum:
    the largest computed eigenvalue must reach hi.
    """
    lo, hi = interval
    if s.eigenvalues[-1] < hi:
        raise IntervalNotResolved(
            f"interval top {hi} above last computed eigenvalue {s.eigenvalues[-1]}"
        )
    u = np.asarray(u, dtype=np.float64)
    mask = (s.eigenvalues > lo) & (s.eigenvalues <= hi)
    if not np.any(mask):
        return np.zeros_like(u)
    vecs = s.eigenvectors[:, mask]
    coeffs = vecs.T @ (g.mu * u)
    return vecs @ coeffs


def cluster_eigenvalues(s, rel_gap: float) -> List[Tuple[int, int]]:
    """Greedy clustering of near-equal eigenvalues.

    A new cluster starts whenever consecutive eigenvalues differ by more
    than rel_gap * max(1, previous value).  Returns inclusive 0-based
    (start, end) index ranges.
    """
    if rel_gap <= 0:
        raise ValueError("rel_gap must be positive")
    evs = s.eigenvalues if isinstance(s, SpectrumResult) else np.asarray(s)
    if len(evs) == 0:
        return []
    ranges = []
    start = 0
    for a in range(len(evs) - 1):
        if evs[a + 1] - evs[a] > rel_gap * max(1.0, float(evs[a])):
            ranges.append((start, a))
            start = a + 1
    ranges.append((start, len(evs) - 1))
    return ranges
