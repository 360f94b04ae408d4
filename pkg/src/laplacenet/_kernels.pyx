# cython: language_level=3
"""Compiled geometric kernels: exact geodesic scans on the model manifolds.

API twin of ``laplacenet._kernels_py``; see that module for the
(kind, params) conventions.  Distance comparisons inside the loops use a
monotone surrogate (dot product or squared shifted difference) so the
transcendental is only evaluated where a true distance is needed, and the
kernel smoothing uses a uniform cell grid over the embedding coordinates
(chord length never exceeds geodesic length, so a cell size of one radius
is a safe prefilter).
"""

import math

import numpy as np

cimport numpy as cnp
from libc.math cimport acos, cos, sqrt, fabs

COMPILED = True

cdef int CIRCLE = 0, SPHERE = 1, TORUS = 2


cdef inline double _clip1(double x) nogil:
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


cdef inline double geodesic(int kind, double p0, double p1,
                            const double* x, const double* y) nogil:
    cdef double c, dx, dy
    if kind == CIRCLE:
        c = (x[0] * y[0] + x[1] * y[1]) / (p0 * p0)
        return p0 * acos(_clip1(c))
    if kind == SPHERE:
        c = (x[0] * y[0] + x[1] * y[1] + x[2] * y[2]) / (p0 * p0)
        return p0 * acos(_clip1(c))
    dx = fabs(x[0] - y[0])
    if p0 - dx < dx:
        dx = p0 - dx
    dy = fabs(x[1] - y[1])
    if p1 - dy < dy:
        dy = p1 - dy
    return sqrt(dx * dx + dy * dy)


cdef inline double surro(int kind, double p0, double p1,
                         const double* x, const double* y) nogil:
    # Monotone increasing with geodesic distance; cheaper than the exact one.
    cdef double dx, dy
    if kind == CIRCLE:
        return -(x[0] * y[0] + x[1] * y[1])
    if kind == SPHERE:
        return -(x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
    dx = fabs(x[0] - y[0])
    if p0 - dx < dx:
        dx = p0 - dx
    dy = fabs(x[1] - y[1])
    if p1 - dy < dy:
        dy = p1 - dy
    return dx * dx + dy * dy


cdef inline double surro_to_dist(int kind, double p0, double s) nogil:
    if kind == CIRCLE or kind == SPHERE:
        return p0 * acos(_clip1(-s / (p0 * p0)))
    return sqrt(s)


cdef inline double dist_to_surro(int kind, double p0, double d) nogil:
    if kind == CIRCLE or kind == SPHERE:
        return -(p0 * p0) * cos(d / p0)
    return d * d


cdef inline int _dim_of(int kind):
    return 2 if kind != SPHERE else 3


def pairwise_distance(kind, params, X, Y):
    """Full geodesic distance matrix, shape (len(X), len(Y))."""
    cdef double[:, ::1] xv = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(np.atleast_2d(Y), dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef Py_ssize_t A = xv.shape[0], B = yv.shape[0], i, j
    out = np.empty((A, B))
    cdef double[:, ::1] ov = out
    with nogil:
        for i in range(A):
            for j in range(B):
                ov[i, j] = geodesic(k, p0, p1, &xv[i, 0], &yv[j, 0])
    return out


def rowwise_distance(kind, params, X, Y):
    """Geodesic distance between matching rows (Y may be a single point)."""
    cdef double[:, ::1] xv = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(np.atleast_2d(Y), dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef Py_ssize_t n = xv.shape[0], i
    cdef bint broadcast = yv.shape[0] == 1
    if not broadcast and yv.shape[0] != n:
        raise ValueError("row count mismatch")
    out = np.empty(n)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = geodesic(k, p0, p1, &xv[i, 0], &yv[0 if broadcast else i, 0])
    if np.ndim(X) == 1 and np.ndim(Y) == 1:
        return out  # callers index [0] for the scalar case
    return out


def nearest_net(kind, params, samples, net):
    """Nearest net point per sample: (indices, geodesic distances)."""
    cdef double[:, ::1] sv = np.ascontiguousarray(samples, dtype=np.float64)
    cdef double[:, ::1] nv = np.ascontiguousarray(net, dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef Py_ssize_t Q = sv.shape[0], N = nv.shape[0], i, j, best
    cdef double s, sb
    idx = np.empty(Q, dtype=np.int64)
    dist = np.empty(Q)
    cdef long long[::1] iv = idx
    cdef double[::1] dv = dist
    with nogil:
        for i in range(Q):
            best = 0
            sb = surro(k, p0, p1, &sv[i, 0], &nv[0, 0])
            for j in range(1, N):
                s = surro(k, p0, p1, &sv[i, 0], &nv[j, 0])
                if s < sb:
                    sb = s
                    best = j
            iv[i] = best
            dv[i] = geodesic(k, p0, p1, &sv[i, 0], &nv[best, 0])
    return idx, dist


def fps(kind, params, pool, eps, start):
    """Greedy farthest-point selection; see the fallback for semantics."""
    cdef double[:, ::1] pv = np.ascontiguousarray(pool, dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef double e = eps
    cdef Py_ssize_t P = pv.shape[0], i, far, last
    cdef double s, dfar
    sbest = np.empty(P)
    cdef double[::1] sb = sbest
    sel = [int(start)]
    last = start
    with nogil:
        for i in range(P):
            sb[i] = surro(k, p0, p1, &pv[i, 0], &pv[last, 0])
    while True:
        far = 0
        with nogil:
            for i in range(1, P):
                if sb[i] > sb[far]:
                    far = i
        dfar = surro_to_dist(k, p0, sb[far])
        if dfar < e:
            break
        sel.append(int(far))
        last = far
        with nogil:
            for i in range(P):
                s = surro(k, p0, p1, &pv[i, 0], &pv[last, 0])
                if s < sb[i]:
                    sb[i] = s
    return np.asarray(sel, dtype=np.int64), float(dfar)


def thin(kind, params, pool, eps):
    """Greedy thinning in pool order; see the fallback for semantics."""
    cdef double[:, ::1] pv = np.ascontiguousarray(pool, dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef double e = eps
    cdef Py_ssize_t P = pv.shape[0], i, j, nxt
    cdef double s, smax
    sbest = np.empty(P)
    cdef double[::1] sb = sbest
    kept = [0]
    with nogil:
        for i in range(P):
            sb[i] = surro(k, p0, p1, &pv[i, 0], &pv[0, 0])
    i = 1
    while i < P:
        nxt = -1
        with nogil:
            while i < P:
                if surro_to_dist(k, p0, sb[i]) >= e:
                    nxt = i
                    break
                i += 1
        if nxt < 0:
            break
        kept.append(int(nxt))
        with nogil:
            for j in range(P):
                s = surro(k, p0, p1, &pv[j, 0], &pv[nxt, 0])
                if s < sb[j]:
                    sb[j] = s
        i += 1
    smax = sb[0]
    with nogil:
        for i in range(1, P):
            if sb[i] > smax:
                smax = sb[i]
    return np.asarray(kept, dtype=np.int64), float(surro_to_dist(k, p0, smax))


def edges(kind, params, pts, rho):
    """All unordered pairs (i < j) with 0 < geodesic distance < rho."""
    cdef double[:, ::1] pv = np.ascontiguousarray(pts, dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef double rcut = rho
    cdef Py_ssize_t N = pv.shape[0], i, j, cnt = 0, pos = 0
    cdef double d
    with nogil:
        for i in range(N):
            for j in range(i + 1, N):
                d = geodesic(k, p0, p1, &pv[i, 0], &pv[j, 0])
                if 0.0 < d < rcut:
                    cnt += 1
    ei = np.empty(cnt, dtype=np.int64)
    ej = np.empty(cnt, dtype=np.int64)
    ed = np.empty(cnt)
    cdef long long[::1] iv = ei
    cdef long long[::1] jv = ej
    cdef double[::1] dv = ed
    with nogil:
        for i in range(N):
            for j in range(i + 1, N):
                d = geodesic(k, p0, p1, &pv[i, 0], &pv[j, 0])
                if 0.0 < d < rcut:
                    iv[pos] = i
                    jv[pos] = j
                    dv[pos] = d
                    pos += 1
    return ei, ej, ed


def min_separation(kind, params, pts):
    """Minimum pairwise geodesic distance."""
    cdef double[:, ::1] pv = np.ascontiguousarray(pts, dtype=np.float64)
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef Py_ssize_t N = pv.shape[0], i, j
    cdef double s, sb
    if N < 2:
        return math.inf
    sb = surro(k, p0, p1, &pv[0, 0], &pv[1, 0])
    with nogil:
        for i in range(N):
            for j in range(i + 1, N):
                s = surro(k, p0, p1, &pv[i, 0], &pv[j, 0])
                if s < sb:
                    sb = s
    return surro_to_dist(k, p0, sb)


def smooth(kind, params, eval_pts, samples, F, weight, r):
    """Kernel-smoothed sums at eval points; see the fallback for the formula.

    Samples are bucketed into a uniform grid over the embedding box with
    cell size >= r (periodic for the torus), so each eval point only scans
    its 3^d neighborhood.
    """
    ev_np = np.ascontiguousarray(np.atleast_2d(eval_pts), dtype=np.float64)
    sm_np = np.ascontiguousarray(samples, dtype=np.float64)
    F_np = np.asarray(F, dtype=np.float64)
    squeeze = F_np.ndim == 1
    if squeeze:
        F_np = F_np[:, None]
    F_np = np.ascontiguousarray(F_np)

    cdef double[:, ::1] evv = ev_np
    cdef double[:, ::1] smv = sm_np
    cdef double[:, ::1] fv = F_np
    cdef int k = kind
    cdef double p0 = params[0], p1 = params[1]
    cdef double rr = r
    cdef Py_ssize_t E = evv.shape[0], Q = smv.shape[0], M = fv.shape[1]
    cdef int d = _dim_of(k), ax
    cdef int n = 1 if k == CIRCLE else 2
    nu_n = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
    cdef double coef = weight * (n + 2) / (2.0 * nu_n * rr ** n)
    cdef bint periodic = k == TORUS

    # Grid geometry over the embedding box.
    cdef double orig[3]
    cdef double side[3]
    if k == TORUS:
        orig[0] = 0.0; orig[1] = 0.0
        side[0] = p0; side[1] = p1
    else:
        for ax in range(d):
            orig[ax] = -p0
            side[ax] = 2.0 * p0
    cdef int nc[3]
    cdef Py_ssize_t ncells = 1
    for ax in range(d):
        nc[ax] = <int>(side[ax] / rr)
        if nc[ax] < 1:
            nc[ax] = 1
        if nc[ax] > 64:
            nc[ax] = 64
        # keep cell size >= r so +-1 neighborhoods cover radius r
        while nc[ax] > 1 and side[ax] / nc[ax] < rr:
            nc[ax] -= 1
        ncells *= nc[ax]

    # Counting sort of samples into cells.
    cell_id = np.empty(Q, dtype=np.int64)
    cdef long long[::1] cid = cell_id
    cdef Py_ssize_t s_i, flat
    cdef int c0, c1, c2
    cdef int cc[3]
    with nogil:
        for s_i in range(Q):
            flat = 0
            for ax in range(d):
                c0 = <int>((smv[s_i, ax] - orig[ax]) / (side[ax] / nc[ax]))
                if c0 >= nc[ax]:
                    c0 = nc[ax] - 1
                if c0 < 0:
                    c0 = 0
                flat = flat * nc[ax] + c0
            cid[s_i] = flat
    order_np = np.argsort(cell_id, kind="stable")
    counts_np = np.bincount(cell_id, minlength=ncells)
    starts_np = np.zeros(ncells + 1, dtype=np.int64)
    np.cumsum(counts_np, out=starts_np[1:])
    cdef long long[::1] starts = np.ascontiguousarray(starts_np, dtype=np.int64)
    # Sort samples and values into cell order for contiguous scans.
    cdef double[:, ::1] smo = np.ascontiguousarray(sm_np[order_np])
    cdef double[:, ::1] fvo = np.ascontiguousarray(F_np[order_np])

    out = np.zeros((E, M))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t e_i, t, sidx
    cdef int nb[3][3]      # per-axis candidate cell indices
    cdef int nbn[3]        # per-axis candidate counts
    cdef int a0, a1, a2, cand, seen, u
    cdef double dist, kfac, s
    cdef double sthr = dist_to_surro(k, p0, rr)
    cdef Py_ssize_t col
    with nogil:
        for e_i in range(E):
            for ax in range(d):
                c0 = <int>((evv[e_i, ax] - orig[ax]) / (side[ax] / nc[ax]))
                if c0 >= nc[ax]:
                    c0 = nc[ax] - 1
                if c0 < 0:
                    c0 = 0
                cc[ax] = c0
                nbn[ax] = 0
                for a0 in range(-1, 2):
                    cand = cc[ax] + a0
                    if periodic:
                        if cand < 0:
                            cand += nc[ax]
                        elif cand >= nc[ax]:
                            cand -= nc[ax]
                    else:
                        if cand < 0 or cand >= nc[ax]:
                            continue
                    seen = 0
                    for u in range(nbn[ax]):
                        if nb[ax][u] == cand:
                            seen = 1
                            break
                    if not seen:
                        nb[ax][nbn[ax]] = cand
                        nbn[ax] += 1
            for a0 in range(nbn[0]):
                for a1 in range(nbn[1] if d > 1 else 1):
                    for a2 in range(nbn[2] if d > 2 else 1):
                        flat = nb[0][a0]
                        if d > 1:
                            flat = flat * nc[1] + nb[1][a1]
                        if d > 2:
                            flat = flat * nc[2] + nb[2][a2]
                        for t in range(starts[flat], starts[flat + 1]):
                            s = surro(k, p0, p1, &evv[e_i, 0], &smo[t, 0])
                            if s < sthr:
                                dist = surro_to_dist(k, p0, s)
                                kfac = coef * (1.0 - (dist / rr) * (dist / rr))
                                for col in range(M):
                                    ov[e_i, col] += kfac * fvo[t, col]
    return out[:, 0] if squeeze else out
