"""Analytic model manifolds with exact distances, sampling, and spectra.

Three closed manifolds ship: the circle, the round 2-sphere, and the flat
2-torus.  Each provides exact geodesic distance, i.i.d. uniform sampling
from the (unnormalized) volume measure, the closed-form spectrum of the
(negative) Laplace-Beltrami operator with multiplicities expanded, and
evaluation of a real orthonormal eigenfunction basis.  Orthonormality is
with respect to the unnormalized Riemannian volume.

Point conventions: circle points are 2-d embedding coordinates on the
circle of radius R; sphere points are 3-d embeddings of norm R; torus
points are angle coordinates in [0, a) x [0, b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import kernels

__all__ = [
    "Manifold",
    "Circle",
    "Sphere2",
    "FlatTorus2",
    "ExactSpectrum",
    "unit_ball_volume",
    "manifold_from_spec",
    "make_rng",
]


def unit_ball_volume(n: int) -> float:
    """Volume of the Euclidean unit n-ball (2 for n=1, pi for n=2)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def make_rng(seed, *extra) -> np.random.Generator:
    """Counter-based RNG (Philox) keyed by a seed tuple.

    Identical keys reproduce identical streams bit-for-bit across runs and
    platforms; distinct stream indices (e.g. per sweep level) are derived
    by extending the key tuple.
    """
    return np.random.Generator(np.random.Philox(key=np.random.SeedSequence((seed, *extra)).generate_state(2, np.uint64)))


@dataclass(frozen=True)
class ExactSpectrum:
    """Ascending eigenvalues of the manifold Laplacian, multiplicities expanded.

    ``eigenvalues[0]`` is always 0 (constant mode on a connected manifold);
    ``labels[i]`` identifies the mode and can be fed to
    ``Manifold.eigenfunction``.
    """

    eigenvalues: np.ndarray
    labels: tuple

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        object.__setattr__(self, "eigenvalues", ev)
        if len(ev) != len(self.labels):
            raise ValueError("eigenvalues and labels length mismatch")
        if len(ev) and not np.all(np.diff(ev) >= -1e-12):
            raise ValueError("eigenvalues must be ascending")


class Manifold:
    """Base class; immutable after construction, all methods are pure."""

    kind: int
    dim: int
    volume: float
    diameter: float
    injectivity_radius: float

    @property
    def params(self):
        raise NotImplementedError

    # -- geometry -----------------------------------------------------------

    def distance(self, x, y) -> float:
        """Exact geodesic distance between two points."""
        return float(kernels.rowwise_distance(self.kind, self.params, np.atleast_2d(x), np.atleast_2d(y))[0])

    def pairwise_distance(self, X, Y) -> np.ndarray:
        return kernels.pairwise_distance(self.kind, self.params, X, Y)

    def rowwise_distance(self, X, Y) -> np.ndarray:
        return kernels.rowwise_distance(self.kind, self.params, X, Y)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """i.i.d. samples from the normalized volume measure."""
        if count < 1:
            raise ValueError("count must be >= 1")
        return self._sample(rng, count)

    # -- spectrum -----------------------------------------------------------

    def spectrum(self, k_max: int) -> ExactSpectrum:
        """First k_max eigenvalues of the negative Laplacian, ascending."""
        if k_max < 1:
            raise ValueError("k_max must be >= 1")
        return self._spectrum(k_max)

    def eigenfunction(self, label, pts) -> np.ndarray:
        """Values of the real unit-L2-norm eigenfunction for a mode label."""
        raise NotImplementedError

    def validate_points(self, pts) -> None:
        """Raise ValueError if pts are not valid points of this manifold."""
        raise NotImplementedError

    def __repr__(self):
        return self.spec_string()

    def spec_string(self) -> str:
        raise NotImplementedError


class Circle(Manifold):
    """Circle of radius R embedded in the plane."""

    kind = 0
    dim = 1

    def __init__(self, radius: float):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.volume = 2.0 * math.pi * self.radius
        self.diameter = math.pi * self.radius
        self.injectivity_radius = math.pi * self.radius

    @property
    def params(self):
        return (self.radius, 0.0)

    def _sample(self, rng, count):
        theta = rng.random(count) * (2.0 * math.pi)
        return self.radius * np.column_stack([np.cos(theta), np.sin(theta)])

    def _spectrum(self, k_max):
        evs = [0.0]
        labels = [("const",)]
        p = 1
        while len(evs) < k_max:
            lam = (p / self.radius) ** 2
            evs += [lam, lam]
            labels += [("cos", p), ("sin", p)]
            p += 1
        return ExactSpectrum(np.array(evs[:k_max]), tuple(labels[:k_max]))

    def eigenfunction(self, label, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        R = self.radius
        if label == ("const",):
            return np.full(len(pts), 1.0 / math.sqrt(2.0 * math.pi * R))
        branch, p = label
        if branch == "cos":
            return np.cos(p * theta) / math.sqrt(math.pi * R)
        if branch == "sin":
            return np.sin(p * theta) / math.sqrt(math.pi * R)
        raise ValueError(f"unknown mode label {label!r}")

    def validate_points(self, pts):
        pts = np.atleast_2d(pts)
        if pts.shape[1] != 2:
            raise ValueError("circle points are 2-d embeddings")
        if not np.allclose(np.linalg.norm(pts, axis=1), self.radius, atol=1e-12 * max(1.0, self.radius)):
            raise ValueError("point not on the circle")

    def spec_string(self):
        return f"circle:{self.radius:g}"


class Sphere2(Manifold):
    """Round 2-sphere of radius R embedded in 3-space."""

    kind = 1
    dim = 2

    def __init__(self, radius: float):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.volume = 4.0 * math.pi * self.radius**2
        self.diameter = math.pi * self.radius
        self.injectivity_radius = math.pi * self.radius

    @property
    def params(self):
        return (self.radius, 0.0)

    def _sample(self, rng, count):
        v = rng.normal(size=(count, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        return self.radius * v

    def _spectrum(self, k_max):
        evs, labels = [], []
        ell = 0
        while len(evs) < k_max:
            lam = ell * (ell + 1) / self.radius**2
            for m in range(-ell, ell + 1):
                evs.append(lam)
                labels.append((ell, m))
            ell += 1
        return ExactSpectrum(np.array(evs[:k_max]), tuple(labels[:k_max]))

    def eigenfunction(self, label, pts):
        ell, m = label
        if not (isinstance(ell, int) and abs(m) <= ell):
            raise ValueError(f"unknown mode label {label!r}")
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        theta = np.arccos(np.clip(z / self.radius, -1.0, 1.0))
        phi = np.arctan2(y, x)
        return _real_sph_harm(ell, m, theta, phi) / self.radius

    def validate_points(self, pts):
        pts = np.atleast_2d(pts)
        if pts.shape[1] != 3:
            raise ValueError("sphere points are 3-d embeddings")
        if not np.allclose(np.linalg.norm(pts, axis=1), self.radius, atol=1e-12 * max(1.0, self.radius)):
            raise ValueError("point not on the sphere")

    def spec_string(self):
        return f"sphere2:{self.radius:g}"


class FlatTorus2(Manifold):
    """Flat rectangular 2-torus with side lengths (a, b), angle coordinates."""

    kind = 2
    dim = 2

    def __init__(self, side_a: float, side_b: float):
        if side_a <= 0 or side_b <= 0:
            raise ValueError("sides must be positive")
        self.side_a = float(side_a)
        self.side_b = float(side_b)
        self.volume = self.side_a * self.side_b
        self.diameter = 0.5 * math.hypot(self.side_a, self.side_b)
        self.injectivity_radius = 0.5 * min(self.side_a, self.side_b)

    @property
    def params(self):
        return (self.side_a, self.side_b)

    def _sample(self, rng, count):
        u = rng.random((count, 2))
        u[:, 0] *= self.side_a
        u[:, 1] *= self.side_b
        return u

    def _spectrum(self, k_max):
        a, b = self.side_a, self.side_b
        pmax = 4
        while True:
            modes = []
            for p in range(pmax + 1):
                for q in range(pmax + 1):
                    lam = 4.0 * math.pi**2 * (p**2 / a**2 + q**2 / b**2)
                    for bx in (("c", "s") if p > 0 else ("c",)):
                        for by in (("c", "s") if q > 0 else ("c",)):
                            modes.append((lam, (p, q, bx + by)))
            modes.sort(key=lambda t: t[0])
            # Any mode outside the [0, pmax]^2 box has eigenvalue at least
            # this boundary value; k_max below it means the list is complete.
            boundary = 4.0 * math.pi**2 * (pmax + 1) ** 2 / max(a, b) ** 2
            if len(modes) >= k_max and modes[k_max - 1][0] < boundary:
                modes = modes[:k_max]
                return ExactSpectrum(
                    np.array([t[0] for t in modes]), tuple(t[1] for t in modes)
                )
            pmax *= 2

    def eigenfunction(self, label, pts):
        try:
            p, q, branch = label
            bx, by = branch
        except (TypeError, ValueError):
            raise ValueError(f"unknown mode label {label!r}") from None
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        a, b = self.side_a, self.side_b
        wx = 2.0 * math.pi * p / a
        wy = 2.0 * math.pi * q / b
        fx = np.cos(wx * pts[:, 0]) if bx == "c" else np.sin(wx * pts[:, 0])
        fy = np.cos(wy * pts[:, 1]) if by == "c" else np.sin(wy * pts[:, 1])
        if (p == 0 and bx == "s") or (q == 0 and by == "s"):
            raise ValueError(f"unknown mode label {label!r}")
        norm2 = (a if p == 0 else a / 2.0) * (b if q == 0 else b / 2.0)
        return fx * fy / math.sqrt(norm2)

    def validate_points(self, pts):
        pts = np.atleast_2d(pts)
        if pts.shape[1] != 2:
            raise ValueError("torus points are 2-d angle coordinates")
        if np.any(pts[:, 0] < 0) or np.any(pts[:, 0] >= self.side_a) or np.any(
            pts[:, 1] < 0
        ) or np.any(pts[:, 1] >= self.side_b):
            raise ValueError("torus coordinates must lie in [0,a) x [0,b)")

    def spec_string(self):
        return f"torus2:{self.side_a:g},{self.side_b:g}"


def _real_sph_harm(ell, m, theta, phi):
    """Real orthonormal spherical harmonics on the unit sphere.

    m = 0 is the zonal harmonic, m > 0 the cosine branch, m < 0 the sine
    branch; all have unit L2 norm on S^2.
    """
    from scipy.special import lpmv

    am = abs(m)
    norm = math.sqrt(
        (2 * ell + 1) / (4.0 * math.pi) * math.factorial(ell - am) / math.factorial(ell + am)
    )
    pl = lpmv(am, ell, np.cos(theta))
    if m == 0:
        return norm * pl
    if m > 0:
        return math.sqrt(2.0) * norm * pl * np.cos(am * phi)
    return math.sqrt(2.0) * norm * pl * np.sin(am * phi)


def manifold_from_spec(spec: str) -> Manifold:
    """Parse a manifold selector: circle:R, sphere2:R, or torus2:a,b."""
    try:
        name, _, args = spec.partition(":")
        vals = [float(v) for v in args.split(",")] if args else []
        if name == "circle" and len(vals) == 1:
            return Circle(vals[0])
        if name == "sphere2" and len(vals) == 1:
            return Sphere2(vals[0])
        if name == "torus2" and len(vals) == 2:
            return FlatTorus2(vals[0], vals[1])
    except ValueError as exc:
        raise ValueError(f"bad manifold spec {spec!r}: {exc}") from None
    raise ValueError(f"bad manifold spec {spec!r}; expected circle:R, sphere2:R, or torus2:a,b")
