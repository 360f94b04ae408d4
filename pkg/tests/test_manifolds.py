"""Closed-form spectra, eigenfunctions, distances, sampling, RNG streams.

Spectrum values are checked against independent brute-force enumerations
written inline here, not against the library's own enumeration logic.
"""

import math

import numpy as np
import pytest

from laplacenet.manifolds import (
    Circle,
    FlatTorus2,
    Sphere2,
    make_rng,
    manifold_from_spec,
    unit_ball_volume,
)

SPHERE = Sphere2(1.0)
TORUS = FlatTorus2(2 * math.pi, 2 * math.pi)
CIRCLE = Circle(1.0)
ALL = [CIRCLE, SPHERE, TORUS]


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)


def test_volumes_and_radii():
    assert CIRCLE.volume == pytest.approx(2 * math.pi)
    assert SPHERE.volume == pytest.approx(4 * math.pi)
    assert TORUS.volume == pytest.approx(4 * math.pi**2)
    assert CIRCLE.injectivity_radius == pytest.approx(math.pi)
    assert SPHERE.injectivity_radius == pytest.approx(math.pi)
    assert TORUS.injectivity_radius == pytest.approx(math.pi)


# ---------------------------------------------------------------------------
# Spectra against independent enumerations


def test_circle_spectrum_oracle():
    # Oracle: 0, then p^2 twice for p = 1, 2, ... on radius 1.
    oracle = sorted([0.0] + [p * p for p in range(1, 8) for _ in range(2)])
    spec = CIRCLE.spectrum(15)
    np.testing.assert_allclose(spec.eigenvalues, oracle[:15], atol=1e-12)


def test_circle_spectrum_radius_scaling():
    spec = Circle(2.0).spectrum(4)
    np.testing.assert_allclose(spec.eigenvalues, [0, 0.25, 0.25, 1.0], atol=1e-12)


def test_sphere_spectrum_oracle():
    # Oracle: l(l+1) with multiplicity 2l+1.
    oracle = sorted(
        ell * (ell + 1) for ell in range(6) for _ in range(2 * ell + 1)
    )
    spec = SPHERE.spectrum(25)
    np.testing.assert_allclose(spec.eigenvalues, oracle[:25], atol=1e-12)


def test_torus_spectrum_oracle():
    # Oracle: brute-force p^2 + q^2 with cos/sin branch multiplicities.
    vals = []
    for p in range(-12, 13):
        for q in range(-12, 13):
            vals.append(p * p + q * q)
    vals.sort()
    spec = TORUS.spectrum(30)
    np.testing.assert_allclose(spec.eigenvalues, vals[:30], atol=1e-12)


def test_torus_rectangular_spectrum():
    m = FlatTorus2(2 * math.pi, math.pi)
    # lambda = p^2 + 4 q^2; first values 0, 1, 1, 4, 4, 4, ...
    np.testing.assert_allclose(
        m.spectrum(6).eigenvalues, [0, 1, 1, 4, 4, 4], atol=1e-12)


def test_spectrum_ascending_and_labeled():
    for m in ALL:
        spec = m.spectrum(20)
        assert len(spec.labels) == 20
        assert np.all(np.diff(spec.eigenvalues) >= -1e-12)


# ---------------------------------------------------------------------------
# Eigenfunctions: orthonormality and the eigen-equation by quadrature


@pytest.mark.parametrize("m", ALL, ids=lambda m: type(m).__name__)
def test_eigenfunction_orthonormality(m):
    rng = make_rng(11, m.kind)
    pts = m.sample(rng, 200_000)
    w = m.volume / len(pts)
    spec = m.spectrum(10)
    F = np.column_stack([m.eigenfunction(lab, pts) for lab in spec.labels])
    G = w * (F.T @ F)
    # Monte-Carlo tolerance ~ few / sqrt(200k).
    np.testing.assert_allclose(G, np.eye(10), atol=2e-2)


def test_circle_eigenfunction_values():
    pts = np.array([[1.0, 0.0], [0.0, 1.0]])
    spec = Circle(1.0).spectrum(3)
    const = CIRCLE.eigenfunction(spec.labels[0], pts)
    np.testing.assert_allclose(const, 1 / math.sqrt(2 * math.pi))
    # cos mode at theta = 0 and pi/2.
    cosv = CIRCLE.eigenfunction(("cos", 1), pts)
    np.testing.assert_allclose(cosv, [1 / math.sqrt(math.pi), 0.0], atol=1e-14)


def test_sphere_first_harmonics_are_coordinates():
    rng = make_rng(12)
    pts = SPHERE.sample(rng, 1000)
    # The lambda=2 eigenspace is spanned by the coordinate functions
    # sqrt(3/4pi) * {y, z, x} in the standard real ordering (m=-1, 0, 1).
    c = math.sqrt(3 / (4 * math.pi))
    np.testing.assert_allclose(
        SPHERE.eigenfunction((1, 0), pts), c * pts[:, 2], atol=1e-12)
    np.testing.assert_allclose(
        np.abs(SPHERE.eigenfunction((1, 1), pts)), np.abs(c * pts[:, 0]), atol=1e-12)
    np.testing.assert_allclose(
        np.abs(SPHERE.eigenfunction((1, -1), pts)), np.abs(c * pts[:, 1]), atol=1e-12)


def test_bad_labels_raise():
    with pytest.raises(ValueError):
        SPHERE.eigenfunction((1, 5), np.zeros((1, 3)))
    with pytest.raises(ValueError):
        TORUS.eigenfunction("nonsense", np.zeros((1, 2)))


# ---------------------------------------------------------------------------
# Distances


def test_known_distances():
    # Antipodal points on the unit sphere.
    assert SPHERE.distance([0, 0, 1.0], [0, 0, -1.0]) == pytest.approx(math.pi)
    # Quarter turn on the circle.
    assert CIRCLE.distance([1.0, 0], [0, 1.0]) == pytest.approx(math.pi / 2)
    # Torus wraparound: distance across the seam is short.
    assert TORUS.distance([0.1, 0.0], [2 * math.pi - 0.1, 0.0]) == pytest.approx(0.2)


@pytest.mark.parametrize("m", ALL, ids=lambda m: type(m).__name__)
def test_distance_metric_properties(m):
    rng = make_rng(13, m.kind)
    X = m.sample(rng, 60)
    D = m.pairwise_distance(X, X)
    np.testing.assert_allclose(D, D.T, atol=1e-12)
    # acos near 1 floors the self-distance around sqrt(machine eps).
    np.testing.assert_allclose(np.diag(D), 0.0, atol=1e-7)
    assert D.max() <= m.diameter + 1e-12
    # Triangle inequality on all triples.
    for i in range(0, 60, 7):
        viol = D[i][None, :] - (D[i][:, None] + D)
        assert viol.max() <= 1e-10


@pytest.mark.parametrize("m", ALL, ids=lambda m: type(m).__name__)
def test_sampling_is_uniform(m):
    rng = make_rng(14, m.kind)
    pts = m.sample(rng, 100_000)
    m.validate_points(pts)
    # Fraction of samples in a metric ball matches its exact volume share.
    center = m.sample(make_rng(15), 1)
    r = 0.8
    frac = np.mean(m.rowwise_distance(pts, np.repeat(center, len(pts), 0)) < r)
    if isinstance(m, Sphere2):
        exact = 2 * math.pi * (1 - math.cos(r)) / m.volume
    elif isinstance(m, Circle):
        exact = 2 * r / m.volume
    else:
        exact = math.pi * r * r / m.volume
    assert frac == pytest.approx(exact, abs=4 / math.sqrt(len(pts)))


# ---------------------------------------------------------------------------
# RNG streams and parsing


def test_rng_streams_are_reproducible_and_distinct():
    a = make_rng(7, 3).standard_normal(5)
    b = make_rng(7, 3).standard_normal(5)
    c = make_rng(7, 4).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_manifold_from_spec_roundtrip():
    for s in ("circle:1", "sphere2:2.5", "torus2:6.5,3"):
        m = manifold_from_spec(s)
        assert manifold_from_spec(m.spec_string()).spec_string() == m.spec_string()
    with pytest.raises(ValueError):
        manifold_from_spec("klein:1")
    with pytest.raises(ValueError):
        manifold_from_spec("torus2:5")
