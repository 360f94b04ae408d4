"""Transfer operators between manifold functions and graph functions.

All manifold-side functions are realized by their values on the shared
quadrature set of the net, so the cell-average map P and the
piecewise-constant lift P* are exactly adjoint and P o P* is exactly the
identity: the only Monte-Carlo error lives in genuinely analytic
quantities (the smoothing normalizer, smoothed functions, and the
average dispersion).

The smoothing operator convolves with the compact parabolic kernel
k_r(x, y) = r^-n psi(d(x, y) / r) and renormalizes by theta, the kernel
mass seen at each point; the interpolation map lifts a graph function and
smooths at radius rho - 2 eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import RadiusNonpositive, ThetaNonpositive
from .manifolds import Manifold, unit_ball_volume
from .net import EpsNet

__all__ = [
    "psi",
    "TransferContext",
    "discretize_P",
    "lift_Pstar",
    "smooth_Lambda0",
    "compute_theta",
    "smooth_Lambda",
    "interpolate_I",
    "average_dispersion",
]


def psi(t: float, n: int) -> float:
    """Parabolic bump (n+2)/(2 nu_n) (1 - t^2) on [0, 1], zero beyond."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t >= 1.0:
        return 0.0
    return (n + 2) / (2.0 * unit_ball_volume(n)) * (1.0 - t * t)


def kernel_bound(n: int, r: float) -> float:
    """Supremum of k_r: (n+2) / (nu_n r^n)."""
    return (n + 2) / (unit_ball_volume(n) * r**n)


@dataclass
class TransferContext:
    """A net plus a smoothing radius, with the normalizer cached.

    ``r`` must lie in (0, i0/2); for the interpolation map it equals
    rho - 2 eps.  ``theta`` holds the normalizer at every quadrature
    sample once computed.
    """

    manifold: Manifold
    net: EpsNet
    r: float
    rho: Optional[float] = None
    theta: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.net.quadrature is None:
            raise ValueError("transfer operators need a net with its quadrature set")
        if not 0.0 < self.r < 0.5 * self.manifold.injectivity_radius:
            raise RadiusNonpositive(
                f"smoothing radius {self.r} outside (0, i0/2)"
            )

    @classmethod
    def for_interpolation(cls, net: EpsNet, m: Manifold, rho: float) -> "TransferContext":
        r = rho - 2.0 * net.eps
        if r <= 0:
            raise RadiusNonpositive(f"rho - 2*eps = {r} must be positive")
        return cls(manifold=m, net=net, r=r, rho=rho)

    # Convenience passthroughs for the shared quadrature.
    @property
    def quadrature(self):
        return self.net.quadrature

    def l2_norm(self, f) -> float:
        return self.net.quadrature.l2_norm(f)

    def l2_inner(self, f, g) -> float:
        return self.net.quadrature.l2_inner(f, g)


def discretize_P(ctx: TransferContext, f) -> np.ndarray:
    """Cell averages of a sampled function: one value per net point."""
    q = ctx.quadrature
    f = np.asarray(f, dtype=np.float64)
    if f.ndim == 1:
        sums = np.bincount(q.cell_of_sample, weights=f, minlength=ctx.net.size)
    else:
        sums = np.column_stack([
            np.bincount(q.cell_of_sample, weights=f[:, c], minlength=ctx.net.size)
            for c in range(f.shape[1])
        ])
    mu = ctx.net.mu if f.ndim == 1 else ctx.net.mu[:, None]
    return q.weight_per_sample * sums / mu


def lift_Pstar(ctx: TransferContext, u) -> np.ndarray:
    """Piecewise-constant lift: each sample takes its cell's value."""
    return np.asarray(u, dtype=np.float64)[ctx.quadrature.cell_of_sample]


def smooth_Lambda0(ctx: TransferContext, f, eval_points=None) -> np.ndarray:
    """Unnormalized smoothing: kernel-weighted integral at eval points.

    Defaults to evaluating at every quadrature sample.  ``f`` may carry
    multiple columns; the kernel scan is shared across them.
    """
    q = ctx.quadrature
    if eval_points is None:
        eval_points = q.samples
    m = ctx.manifold
    return kernels.smooth(m.kind, m.params, np.asarray(eval_points, dtype=np.float64),
                          q.samples, np.asarray(f, dtype=np.float64),
                          q.weight_per_sample, ctx.r)


def compute_theta(ctx: TransferContext) -> np.ndarray:
    """Normalizer (smoothed constant 1) at every quadrature sample; cached."""
    if ctx.theta is None:
        theta = smooth_Lambda0(ctx, np.ones(ctx.quadrature.size))
        if np.any(theta <= 0.0):
            raise ThetaNonpositive(
                f"normalizer min {theta.min():.3e} <= 0 at r={ctx.r}; "
                "radius too large or quadrature too sparse"
            )
        ctx.theta = theta
    return ctx.theta


def smooth_Lambda(ctx: TransferContext, f) -> np.ndarray:
    """Normalized smoothing at the quadrature samples; fixes constants."""
    theta = compute_theta(ctx)
    out = smooth_Lambda0(ctx, f)
    if out.ndim == 2:
        return out / theta[:, None]
    return out / theta


def interpolate_I(ctx: TransferContext, u) -> np.ndarray:
    """Interpolation of a graph function: lift then smooth at rho - 2 eps."""
    if ctx.rho is None or not math.isclose(ctx.r, ctx.rho - 2.0 * ctx.net.eps, rel_tol=1e-9):
        raise RadiusNonpositive(
            "interpolation requires a context built with r = rho - 2*eps"
        )
    u = np.asarray(u, dtype=np.float64)
    if u.ndim == 2:
        lifted = np.column_stack([lift_Pstar(ctx, u[:, c]) for c in range(u.shape[1])])
    else:
        lifted = lift_Pstar(ctx, u)
    return smooth_Lambda(ctx, lifted)


def average_dispersion(ctx: TransferContext, f, r: float,
                       max_pairs: int = 10_000_000, seed: int = 0) -> float:
    """Double integral of squared differences over r-balls, by pair sampling.

    Uses all ordered quadrature pairs when that fits in ``max_pairs``,
    otherwise a uniform pair subsample (seeded, recorded by the caller)
    reweighted to the full double integral.
    """
    if not 0.0 < r < 0.5 * ctx.manifold.injectivity_radius:
        raise ValueError(f"dispersion radius {r} outside (0, i0/2)")
    q = ctx.quadrature
    f = np.asarray(f, dtype=np.float64)
    Q = q.size
    m = ctx.manifold
    vol2 = (ctx.manifold.volume) ** 2
    if Q * Q <= max_pairs:
        D = m.pairwise_distance(q.samples, q.samples)
        diff = f[:, None] - f[None, :]
        return float(vol2 / (Q * Q) * np.sum((D < r) * diff * diff))
    rng = np.random.Generator(np.random.Philox(key=np.random.SeedSequence((seed, 0x45525F)).generate_state(2, np.uint64)))
    total = 0.0
    remaining = max_pairs
    chunk = 2_000_000
    while remaining > 0:
        c = min(chunk, remaining)
        s = rng.integers(0, Q, size=c)
        t = rng.integers(0, Q, size=c)
        d = m.rowwise_distance(q.samples[s], q.samples[t])
        diff = f[s] - f[t]
        total += float(np.sum((d < r) * diff * diff))
        remaining -= c
    return vol2 * total / max_pairs
