import numpy as np
import pytest
from scipy.special import gamma

from anisoperim import (
    ConvexCurve,
    WulffShape,
    isoperimetric_deficit,
    kappa_of,
    random_convex_polygon,
    steiner_report,
)
from anisoperim.errors import InvalidCurveError, InvalidInputError

SQUARE = ConvexCurve([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def hexagon(r=1.0):
    theta = 2.0 * np.pi * np.arange(6) / 6
    return ConvexCurve(r * np.stack([np.cos(theta), np.sin(theta)], axis=-1))


def test_square_measurements(euclid):
    norm, _ = euclid
    assert SQUARE.area == pytest.approx(1.0)
    assert SQUARE.perimeter() == pytest.approx(4.0)
    assert SQUARE.anisotropic_perimeter(norm) == pytest.approx(4.0)
    assert SQUARE.centroid == pytest.approx([0.5, 0.5])


def test_vertex_cleanup_and_orientation():
    # clockwise input with a duplicate and a collinear vertex
    cw = [(0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.5, 0.0), (0.0, 0.0), (0.0, 0.0)]
    curve = ConvexCurve(cw)
    assert curve.n_vertices == 4
    assert curve.area == pytest.approx(1.0)


def test_invalid_curves_rejected():
    with pytest.raises(InvalidCurveError):
        ConvexCurve([(0.0, 0.0), (1.0, 0.0)])
    with pytest.raises(InvalidCurveError):
        ConvexCurve([(0.0, 0.0), (1.0, 0.0), (np.nan, 1.0)])
    with pytest.raises(InvalidCurveError):
        ConvexCurve([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])  # flat
    with pytest.raises(InvalidCurveError):
        ConvexCurve([(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 0.5), (0.0, 2.0)])


def test_contains_and_boundary_points():
    inside = np.array([[0.5, 0.5], [0.01, 0.99]])
    outside = np.array([[1.5, 0.5], [-0.1, 0.2]])
    assert SQUARE.contains(inside).all()
    assert not SQUARE.contains(outside).any()
    pts = SQUARE.boundary_points(400)
    assert pts.shape == (400, 2)
    assert SQUARE.contains(pts).all()
    assert not SQUARE.contains(pts, strict=True).any()


def test_distance_features():
    pts = np.array([[0.5, 0.5], [0.5, 0.1], [-0.3, -0.4], [1.2, 1.2]])
    d, nearest, at_vertex = SQUARE.distance(pts)
    assert d == pytest.approx([0.5, 0.1, 0.5, 0.2 * np.sqrt(2)])
    assert nearest[1] == pytest.approx([0.5, 0.0])
    assert nearest[3] == pytest.approx([1.0, 1.0])
    assert list(at_vertex) == [False, False, True, True]


def test_minkowski_sum_is_exact_and_commutes():
    tri = ConvexCurve([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    s1 = SQUARE.minkowski_sum(tri)
    s2 = tri.minkowski_sum(SQUARE)
    # square + right triangle: area 1 + 0.5 + mixed term 2
    assert s1.area == pytest.approx(1.0 + 0.5 + 2.0)
    assert s1.area == pytest.approx(s2.area)
    assert s1.perimeter() == pytest.approx(s2.perimeter())
    assert s1.perimeter() == pytest.approx(4.0 + 2.0 + np.sqrt(2.0))


def test_scale_and_translate():
    c = SQUARE.scale(2.0).translate((1.0, -1.0))
    assert c.area == pytest.approx(4.0)
    assert c.centroid == pytest.approx([2.0, 0.0])
    with pytest.raises(InvalidInputError):
        SQUARE.scale(0.0)


def test_kappa_oracles(euclid, ellipse21, power3):
    assert kappa_of(euclid[1]) == pytest.approx(np.pi, rel=1e-10)
    # the ellipse-gauge unit ball is the polar ellipse with semi-axes 1/2, 1
    assert kappa_of(ellipse21[1]) == pytest.approx(np.pi / 2.0, rel=1e-10)
    q = 1.5  # dual exponent of p = 3
    exact = 4.0 * gamma(1.0 + 1.0 / q) ** 2 / gamma(1.0 + 2.0 / q)
    assert kappa_of(power3[1]) == pytest.approx(exact, rel=1e-9)


def test_wulff_shape_geometry(norm_pair):
    _, (norm, polar) = norm_pair
    kappa = kappa_of(polar)
    for radius in (0.5, 1.0, 2.0):
        w = WulffShape(polar, radius=radius, n_vertices=8192)
        assert w.curve.area == pytest.approx(kappa * radius**2, rel=1e-5)
        perim = w.curve.anisotropic_perimeter(norm)
        assert perim == pytest.approx(2.0 * kappa * radius, rel=1e-4)


def test_wulff_input_validation(euclid):
    _, polar = euclid
    with pytest.raises(InvalidInputError):
        WulffShape(polar, radius=-1.0)
    with pytest.raises(InvalidInputError):
        WulffShape(polar, n_vertices=4)


def test_steiner_expansion(norm_pair):
    _, (norm, polar) = norm_pair
    wulff = WulffShape(polar, radius=0.8, n_vertices=512).curve
    for curve in (SQUARE, hexagon(), wulff):
        rows = steiner_report(curve, norm, polar, deltas=(0.05, 0.1, 0.25))
        p0 = curve.anisotropic_perimeter(norm)
        for row in rows:
            assert abs(row["area"] - row["area_predicted"]) <= 1e-4 * curve.area
            assert abs(row["perimeter"] - row["perimeter_predicted"]) <= 1e-4 * p0
            assert row["total_curvature"] == pytest.approx(
                row["total_curvature_predicted"], rel=1e-4)


def test_steiner_rejects_nonpositive_width(euclid):
    norm, polar = euclid
    with pytest.raises(InvalidInputError):
        steiner_report(SQUARE, norm, polar, deltas=(0.0,))


def test_isoperimetric_deficit_nonnegative(norm_pair, rng):
    _, (norm, polar) = norm_pair
    for _ in range(100):
        poly = random_convex_polygon(rng, n_points=16, scale=rng.uniform(0.2, 3.0))
        deficit = isoperimetric_deficit(poly, norm, polar)
        p = poly.anisotropic_perimeter(norm)
        assert deficit >= -1e-9 * p * p


def test_isoperimetric_equality_on_wulff(norm_pair):
    _, (norm, polar) = norm_pair
    w = WulffShape(polar, radius=1.3, n_vertices=8192).curve
    p = w.anisotropic_perimeter(norm)
    deficit = isoperimetric_deficit(w, norm, polar)
    assert 0.0 <= deficit <= 1e-3 * p * p


def test_euclidean_deficit_matches_classical():
    curve = hexagon(1.7)
    norm_pair = (None, None)
    from anisoperim import Norm, PolarNorm

    norm = Norm.euclidean()
    polar = PolarNorm(norm)
    p = curve.perimeter()
    classical = p * p - 4.0 * np.pi * curve.area
    assert isoperimetric_deficit(curve, norm, polar) == pytest.approx(classical)


def test_random_polygon_reproducible():
    a = random_convex_polygon(np.random.default_rng(7))
    b = random_convex_polygon(np.random.default_rng(7))
    assert np.array_equal(a.vertices, b.vertices)
    assert a.n_vertices >= 3
