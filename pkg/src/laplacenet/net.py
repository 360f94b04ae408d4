"""Net construction: covering point sets, cell assignment, cell measures.

A net is built by greedy selection over a dense uniform candidate pool —
by default keeping pool points in random order whenever they are at least
``eps`` from the net so far — stopping once every pool point is within
``eps`` of the net.  Cells are realized implicitly through a shared Monte-Carlo
quadrature set: each quadrature sample is assigned to its nearest net
point (lowest index on ties), and the cell measures are the sample counts
scaled to the manifold volume.  Every integral over the manifold
downstream of this module is a weighted sum over this one quadrature set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import EmptyCell, EpsTooLarge
from .manifolds import Manifold, manifold_from_spec, unit_ball_volume

__all__ = ["QuadratureSet", "EpsNet", "NetReport", "build_net", "verify_net"]

# Candidate pool sizing: ~50 candidates per expected net point, with a
# floor so coarse nets still see a dense pool.
_POOL_PER_POINT = 50
_POOL_MIN = 10_000
_POOL_MAX = 5_000_000

DEFAULT_OVERSAMPLE = 200


@dataclass
class QuadratureSet:
    """Uniform Monte-Carlo samples with equal weights summing to vol(M)."""

    samples: np.ndarray          # (Q, d) manifold points
    weight_per_sample: float     # vol(M) / Q
    cell_of_sample: np.ndarray   # (Q,) int64, nearest net point index

    @property
    def size(self) -> int:
        return len(self.samples)

    def l2_inner(self, f, g) -> float:
        return float(self.weight_per_sample * np.dot(np.asarray(f), np.asarray(g)))

    def l2_norm(self, f) -> float:
        return math.sqrt(max(self.l2_inner(f, f), 0.0))


@dataclass
class EpsNet:
    """Net points with cell measures and the shared quadrature set."""

    manifold: Manifold
    points: np.ndarray           # (N, d)
    eps: float
    separation: float            # min pairwise distance between net points
    covering_radius: float       # max quadrature-sample distance to the net
    mu: np.ndarray               # (N,) cell measures, sum = vol(M)
    quadrature: Optional[QuadratureSet]

    @property
    def size(self) -> int:
        return len(self.points)

    def to_json(self, seed=None) -> str:
        payload = {
            "manifold": self.manifold.spec_string(),
            "eps": self.eps,
            "seed": seed,
            "N": self.size,
            "points": self.points.tolist(),
            "mu": self.mu.tolist(),
            "covering_radius": self.covering_radius,
            "separation": self.separation,
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "EpsNet":
        d = json.loads(text)
        return cls(
            manifold=manifold_from_spec(d["manifold"]),
            points=np.asarray(d["points"], dtype=np.float64),
            eps=float(d["eps"]),
            separation=float(d["separation"]),
            covering_radius=float(d["covering_radius"]),
            mu=np.asarray(d["mu"], dtype=np.float64),
            quadrature=None,
        )


@dataclass
class NetReport:
    """Diagnostic covering check against fresh probes."""

    max_gap: float
    cell_radius_violations: int


def build_net(m: Manifold, eps: float, rng: np.random.Generator,
              oversample: int = DEFAULT_OVERSAMPLE,
              sampler: str = "random") -> EpsNet:
    """Build a covering net with cell measures estimated by Monte Carlo.

    ``sampler`` selects how net points are picked from the candidate pool:
    "random" keeps pool points in their (random) order whenever they are
    >= eps from the net so far; "farthest" uses greedy farthest-point
    selection.  Both yield separation >= eps and covering <= eps, but
    farthest-point nets crystallize on flat manifolds and their coherent
    neighbor shells bias the sharp distance-cutoff sums in the graph
    weights, so the disordered sampler is the default.

    Raises EpsTooLarge if eps >= i0/2 and EmptyCell if some cell receives
    no quadrature samples (raise ``oversample`` in that case).
    """
    if not 0.0 < eps < 0.5 * m.injectivity_radius:
        raise EpsTooLarge(
            f"eps={eps} outside (0, i0/2)={0.5 * m.injectivity_radius} for {m}"
        )
    if oversample < 1:
        raise ValueError("oversample must be >= 1")

    n = m.dim
    density_target = unit_ball_volume(n) / 2.0 * eps**n
    pool_size = int(min(max(_POOL_PER_POINT * m.volume / density_target, _POOL_MIN), _POOL_MAX))
    pool = m.sample(rng, pool_size)
    if sampler == "random":
        sel, _pool_cover = kernels.thin(m.kind, m.params, pool, eps)
    elif sampler == "farthest":
        sel, _pool_cover = kernels.fps(m.kind, m.params, pool, eps, 0)
    else:
        raise ValueError(f"unknown sampler {sampler!r} (random | farthest)")
    net_pts = pool[sel]

    quad_size = oversample * len(net_pts)
    samples = m.sample(rng, quad_size)
    idx, dist = kernels.nearest_net(m.kind, m.params, samples, net_pts)

    # The pool is dense but finite, so a fresh sample can sit slightly
    # farther than eps from the net.  Keep extending the net greedily from
    # the quadrature samples until the covering holds on them too; each
    # added point is >= eps from the rest, so the separation is preserved.
    extra = []
    far = int(np.argmax(dist))
    while dist[far] >= eps:
        extra.append(samples[far])
        nd = kernels.rowwise_distance(m.kind, m.params, samples, samples[far])
        closer = nd < dist
        idx[closer] = len(net_pts) + len(extra) - 1
        dist[closer] = nd[closer]
        far = int(np.argmax(dist))
    if extra:
        net_pts = np.vstack([net_pts, np.asarray(extra)])

    counts = np.bincount(idx, minlength=len(net_pts))
    if np.any(counts == 0):
        empty = np.nonzero(counts == 0)[0]
        raise EmptyCell(
            f"{len(empty)} cells received no quadrature samples "
            f"(first: {empty[:5].tolist()}); raise oversample (current {oversample})"
        )
    weight = m.volume / quad_size
    mu = counts * weight

    return EpsNet(
        manifold=m,
        points=net_pts,
        eps=float(eps),
        separation=kernels.min_separation(m.kind, m.params, net_pts),
        covering_radius=float(dist.max()),
        mu=mu,
        quadrature=QuadratureSet(samples, weight, idx),
    )


def verify_net(net: EpsNet, m: Manifold, fresh_rng: np.random.Generator,
               probes: int) -> NetReport:
    """Probe the covering property with an independent sample set."""
    if probes < 1:
        raise ValueError("probes must be >= 1")
    pts = m.sample(fresh_rng, probes)
    _, dist = kernels.nearest_net(m.kind, m.params, pts, net.points)
    return NetReport(
        max_gap=float(dist.max()),
        cell_radius_violations=int(np.count_nonzero(dist > net.eps)),
    )
