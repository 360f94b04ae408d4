"""Pure-NumPy implementations of the hot geometric kernels.

Mirrors the API of the compiled extension ``laplacenet._kernels``.  Every
function takes the manifold as a ``(kind, params)`` pair:

    kind 0: circle of radius R,   params (R, 0),  points are 2-d embeddings
    kind 1: round 2-sphere,       params (R, 0),  points are 3-d embeddings
    kind 2: flat 2-torus,         params (a, b),  points are angle coords

Distances are exact geodesics.  These versions are vectorized but
memory-bound; the compiled twin streams the same loops in C.
"""

from __future__ import annotations

import math

import numpy as np

COMPILED = False

CIRCLE, SPHERE, TORUS = 0, 1, 2

# Work buffer budget (in double entries) for chunked pairwise scans.
_CHUNK_BUDGET = 30_000_000


def _dim(kind: int) -> int:
    return 1 if kind == CIRCLE else 2


def _unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def pairwise_distance(kind, params, X, Y):
    """Full geodesic distance matrix, shape (len(X), len(Y))."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if kind in (CIRCLE, SPHERE):
        R = params[0]
        c = (X @ Y.T) / (R * R)
        np.clip(c, -1.0, 1.0, out=c)
        return R * np.arccos(c)
    a, b = params[0], params[1]
    dx = np.abs(X[:, None, 0] - Y[None, :, 0])
    dy = np.abs(X[:, None, 1] - Y[None, :, 1])
    dx = np.minimum(dx, a - dx)
    dy = np.minimum(dy, b - dy)
    return np.hypot(dx, dy)


def rowwise_distance(kind, params, X, Y):
    """Geodesic distance between matching rows of X and Y (broadcastable)."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if kind in (CIRCLE, SPHERE):
        R = params[0]
        c = np.sum(X * Y, axis=-1) / (R * R)
        c = np.clip(c, -1.0, 1.0)
        return R * np.arccos(c)
    a, b = params[0], params[1]
    d = np.abs(X - Y)
    d[..., 0] = np.minimum(d[..., 0], a - d[..., 0])
    d[..., 1] = np.minimum(d[..., 1], b - d[..., 1])
    return np.hypot(d[..., 0], d[..., 1])


def nearest_net(kind, params, samples, net):
    """Nearest net point per sample: (indices, geodesic distances)."""
    samples = np.asarray(samples, dtype=np.float64)
    net = np.asarray(net, dtype=np.float64)
    Q, N = len(samples), len(net)
    idx = np.empty(Q, dtype=np.int64)
    dist = np.empty(Q, dtype=np.float64)
    chunk = max(1, _CHUNK_BUDGET // max(N, 1))
    for lo in range(0, Q, chunk):
        hi = min(lo + chunk, Q)
        D = pairwise_distance(kind, params, samples[lo:hi], net)
        idx[lo:hi] = np.argmin(D, axis=1)
        dist[lo:hi] = D[np.arange(hi - lo), idx[lo:hi]]
    return idx, dist


def fps(kind, params, pool, eps, start):
    """Greedy farthest-point selection over a candidate pool.

    Adds the pool point farthest from the current selection while that
    distance is >= eps.  Returns (selected indices, final pool covering
    radius).  Selected points are pairwise >= eps apart.
    """
    pool = np.asarray(pool, dtype=np.float64)
    P = len(pool)
    sel = [int(start)]
    dist = rowwise_distance(kind, params, pool, pool[start])
    far = int(np.argmax(dist))
    while dist[far] >= eps:
        sel.append(far)
        np.minimum(dist, rowwise_distance(kind, params, pool, pool[far]), out=dist)
        far = int(np.argmax(dist))
    return np.asarray(sel, dtype=np.int64), float(dist[far])


def thin(kind, params, pool, eps):
    """Greedy thinning of the pool in its given (random) order.

    Keeps a pool point iff it lies >= eps from every point kept so far.
    Returns (kept indices, final pool covering radius).  Kept points are
    pairwise >= eps apart and every pool point is within eps of one, but
    unlike farthest-point selection the result has no lattice order: on
    flat manifolds farthest-point nets crystallize, and the coherent
    neighbor shells bias distance-cutoff sums.
    """
    pool = np.asarray(pool, dtype=np.float64)
    P = len(pool)
    kept = [0]
    dmin = rowwise_distance(kind, params, pool, pool[0])
    for i in range(1, P):
        if dmin[i] >= eps:
            kept.append(i)
            np.minimum(dmin, rowwise_distance(kind, params, pool, pool[i]),
                       out=dmin)
    return np.asarray(kept, dtype=np.int64), float(dmin.max())


def edges(kind, params, pts, rho):
    """All unordered pairs (i < j) with 0 < geodesic distance < rho."""
    pts = np.asarray(pts, dtype=np.float64)
    N = len(pts)
    ii, jj, dd = [], [], []
    chunk = max(1, _CHUNK_BUDGET // max(N, 1))
    for lo in range(0, N, chunk):
        hi = min(lo + chunk, N)
        D = pairwise_distance(kind, params, pts[lo:hi], pts)
        for r in range(lo, hi):
            row = D[r - lo, r + 1:]
            cols = np.nonzero(row < rho)[0] + r + 1
            if len(cols):
                ii.append(np.full(len(cols), r, dtype=np.int64))
                jj.append(cols.astype(np.int64))
                dd.append(row[cols - r - 1])
    if not ii:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), np.zeros(0)
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(dd)


def min_separation(kind, params, pts):
    """Minimum pairwise geodesic distance."""
    pts = np.asarray(pts, dtype=np.float64)
    N = len(pts)
    if N < 2:
        return math.inf
    best = math.inf
    chunk = max(1, _CHUNK_BUDGET // N)
    for lo in range(0, N, chunk):
        hi = min(lo + chunk, N)
        D = pairwise_distance(kind, params, pts[lo:hi], pts)
        for r in range(lo, hi):
            D[r - lo, r] = math.inf
        best = min(best, float(D.min()))
    return best


def smooth(kind, params, eval_pts, samples, F, weight, r):
    """Kernel-smoothed sums at eval points.

    out[e, c] = weight * sum_s F[s, c] * r^-n * psi(d(eval_e, sample_s) / r)
    with the parabolic bump psi(t) = (n+2)/(2 nu_n) (1 - t^2) on t <= 1.
    """
    eval_pts = np.asarray(eval_pts, dtype=np.float64)
    samples = np.asarray(samples, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    squeeze = F.ndim == 1
    if squeeze:
        F = F[:, None]
    n = _dim(kind)
    coef = weight * (n + 2) / (2.0 * _unit_ball_volume(n) * r**n)
    E, Q = len(eval_pts), len(samples)
    out = np.zeros((E, F.shape[1]))
    chunk = max(1, _CHUNK_BUDGET // max(Q, 1))
    for lo in range(0, E, chunk):
        hi = min(lo + chunk, E)
        t = pairwise_distance(kind, params, eval_pts[lo:hi], samples) / r
        k = 1.0 - t * t
        np.maximum(k, 0.0, out=k)
        out[lo:hi] = coef * (k @ F)
    return out[:, 0] if squeeze else out
