import numpy as np
import pytest

from anisoperim import (
    ConvexCurve,
    Norm,
    ScalarField,
    WulffShape,
    build_profile,
    curvature_route_gap,
    hessian_integral_report,
    kappa_of,
    reilly_report,
)
from anisoperim.errors import (
    ConfigurationError,
    EmptyLevelError,
    SingularGradientError,
    SingularPointError,
    StencilError,
)
from anisoperim.presets import make_field

from conftest import COARSE_H


def interior_points(rng, n, r_max=0.8):
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    r = np.sqrt(rng.uniform(0.05, r_max**2, n))
    return r[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def test_radial_field_pointwise(radial_field_euclid, euclid, rng):
    norm, _ = euclid
    f = radial_field_euclid
    pts = interior_points(rng, 200)
    r2 = (pts**2).sum(axis=1)
    assert np.allclose(f.u(pts), 1.0 - r2, atol=1e-12)
    assert np.allclose(f.grad(pts), -2.0 * pts, atol=1e-12)
    assert np.allclose(f.hess(pts), -2.0 * np.eye(2), atol=1e-12)
    # the quadratic radial field has constant operator value 4
    assert np.allclose(f.det_h(pts, norm), 4.0, atol=1e-10)


def test_gradient_guard_at_the_peak(radial_field_euclid, euclid):
    # fields whose gradient routes through the gauge guard at that layer
    # instead, so either singularity error is an acceptable rejection
    norm, _ = euclid
    with pytest.raises((SingularGradientError, SingularPointError)):
        radial_field_euclid.det_h(np.array([[0.0, 0.0]]), norm)


def test_curvature_of_circular_levels(radial_field_euclid, euclid, rng):
    norm, _ = euclid
    pts = interior_points(rng, 100)
    r = np.hypot(pts[:, 0], pts[:, 1])
    for route in ("hessian", "cofactor"):
        k = radial_field_euclid.curvature(pts, norm, route=route)
        assert np.allclose(k, 1.0 / r, rtol=1e-10)


def test_curvature_routes_agree(aniso_field_ellipse, ellipse21, rng):
    norm, _ = ellipse21
    pts = interior_points(rng, 100, r_max=0.5)
    assert curvature_route_gap(aniso_field_ellipse, norm, pts) <= 1e-8


def test_wulff_level_curvature(norm_pair):
    """On level lines of the gauge field, curvature times radius is one."""
    name, (norm, polar) = norm_pair
    f = make_field("radial-quadratic", name, polar, h=1.0 / 64.0)
    gauge = polar.as_norm()
    for radius in (0.3, 0.6, 0.9):
        theta = 2.0 * np.pi * (np.arange(64) + 0.5) / 64
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        pts = radius * u / gauge.eval(u)[:, None]
        k = f.curvature(pts, norm, route="hessian")
        assert np.allclose(k * radius, 1.0, rtol=1e-4)


def test_level_curves_match_radii(radial_field_euclid):
    for t in (0.1, 0.4, 0.7):
        curve = radial_field_euclid.level_curve(t)
        assert curve.area == pytest.approx(np.pi * (1.0 - t), rel=2e-3)
    with pytest.raises(EmptyLevelError):
        radial_field_euclid.level_curve(1.5)


def test_quadrature_reproduces_area_and_moments(radial_field_euclid):
    f = radial_field_euclid
    w = f.quadrature_weights()
    area = f.integrate(lambda pts: np.ones(pts.shape[0]), w)
    assert area == pytest.approx(np.pi, rel=1e-4)
    second = f.integrate(lambda pts: (pts**2).sum(axis=1), w)
    assert second == pytest.approx(np.pi / 2.0, rel=1e-3)


def test_superlevel_quadrature(radial_field_euclid):
    f = radial_field_euclid
    for t in (0.2, 0.5):
        w = f.superlevel_weights(t)
        area = f.integrate(lambda pts: np.ones(pts.shape[0]), w)
        assert area == pytest.approx(np.pi * (1.0 - t), rel=1e-3)


def test_grid_field_round_trip(radial_field_euclid, rng):
    f = radial_field_euclid
    g = ScalarField.from_grid(f.domain, f.origin, f.h, f.values, name="grid")
    assert not g.analytic
    pts = interior_points(rng, 50, r_max=0.6)
    # linear interpolation of a curvature-2 surface carries O(h^2) error
    assert np.allclose(g.u(pts), f.u(pts), atol=5e-4)
    assert np.allclose(g.grad(pts), f.grad(pts), atol=2e-3)
    assert np.allclose(g.hess(pts), f.hess(pts), atol=2e-2)
    # boundary chord slopes recover the gradient sup to first order in h
    assert g.grad_max() == pytest.approx(f.grad_max(), rel=2e-2)
    assert g.grad_max() <= f.grad_max() * (1.0 + 1e-9)


def test_grid_field_stencil_guards(radial_field_euclid):
    f = radial_field_euclid
    g = ScalarField.from_grid(f.domain, f.origin, f.h, f.values)
    near_boundary = np.array([[0.999, 0.0]])
    with pytest.raises(StencilError):
        g.grad(near_boundary)
    far_outside = np.array([[50.0, 0.0]])
    with pytest.raises(StencilError):
        g.u(far_outside)


def test_profile_structure(aniso_field_ellipse, ellipse21):
    norm, polar = ellipse21
    prof = build_profile(aniso_field_ellipse, norm, polar, n_levels=24)
    prof.validate()
    assert prof.mu[0] == pytest.approx(aniso_field_ellipse.domain.area, rel=1e-6)
    assert prof.lam[0] == pytest.approx(
        aniso_field_ellipse.domain.anisotropic_perimeter(norm), rel=1e-6)
    assert np.all(np.diff(prof.mu) < 0.0)
    assert np.all(np.diff(prof.lam) < 0.0)
    assert prof.derivative_cross_check() <= 2e-2
    assert prof.top_area == 0.0


def test_profile_needs_enough_levels(radial_field_euclid, euclid):
    norm, polar = euclid
    with pytest.raises(ConfigurationError):
        build_profile(radial_field_euclid, norm, polar, n_levels=4)


def test_profile_derivatives_radial(radial_field_euclid, euclid):
    """For the radial quadratic: lambda' = -pi/sqrt(1-t), mu' = -pi."""
    norm, polar = euclid
    prof = build_profile(radial_field_euclid, norm, polar, n_levels=16)
    inner = slice(1, 12)
    expected = -np.pi / np.sqrt(1.0 - prof.t[inner])
    assert np.allclose(prof.lam_prime[inner], expected, rtol=1e-3)
    assert np.allclose(prof.mu_prime[inner], -np.pi, rtol=1e-3)


def test_plateau_field_records_top_area(euclid):
    """A flat maximum produces a distribution atom at the top level."""
    norm, polar = euclid
    f = make_field("distance-cube", "euclidean", polar, h=1.0 / 64.0)
    prof = build_profile(f, norm, polar, n_levels=16)
    core_area = f.domain.area - prof.top_area
    assert prof.top_area > 0.5  # inner plateau of the truncated cone
    assert prof.top_perimeter > 0.0
    assert core_area > 0.0


def test_hessian_routes_and_radial_oracle(radial_field_euclid, euclid):
    norm, polar = euclid
    rep = hessian_integral_report(radial_field_euclid, norm, refine=1)
    oracle = 2.0 * kappa_of(polar)
    for key in ("det_route", "curvature_route", "cofactor_route"):
        assert rep[key] == pytest.approx(oracle, rel=1e-3), key


def test_hessian_report_needs_analytic_field(radial_field_euclid, euclid):
    norm, _ = euclid
    f = radial_field_euclid
    g = ScalarField.from_grid(f.domain, f.origin, f.h, f.values)
    with pytest.raises(ConfigurationError):
        hessian_integral_report(g, norm)
    with pytest.raises(ConfigurationError):
        reilly_report(g, norm, levels=[0.5])


def test_reilly_bulk_equals_boundary(aniso_field_ellipse, ellipse21):
    norm, _ = ellipse21
    m = aniso_field_ellipse.max_value
    rows = reilly_report(aniso_field_ellipse, norm, levels=[0.1 * m, 0.5 * m],
                         refine=1)
    for row in rows:
        assert row["rel_gap"] <= 1e-2, row


def test_field_construction_guards(euclid):
    square = ConvexCurve([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    from anisoperim.errors import InvalidInputError

    with pytest.raises(InvalidInputError):
        ScalarField.from_callable(square, lambda p: np.full(p.shape[0], -1.0),
                                  h=0.125)
    with pytest.raises(InvalidInputError):
        ScalarField.from_callable(square, lambda p: np.full(p.shape[0], np.nan),
                                  h=0.125)
