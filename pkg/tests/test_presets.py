import numpy as np
import pytest

from anisoperim.errors import ConfigurationError
from anisoperim.presets import (
    FIELD_NAMES,
    FIELD_SPECS,
    NORM_NAMES,
    extract_domain,
    field_spec,
    make_field,
    make_norm,
)


def test_norm_presets(norm_pair):
    name, (norm, polar) = norm_pair
    assert polar.mode == "analytic"
    v = np.array([[0.3, -0.8]])
    assert norm.eval(v)[0] > 0.0
    assert polar.eval(v)[0] > 0.0


def test_unknown_names_are_rejected():
    with pytest.raises(ConfigurationError):
        make_norm("taxicab")
    with pytest.raises(ConfigurationError):
        field_spec("mystery-field")
    _, polar = make_norm("euclidean")
    with pytest.raises(ConfigurationError):
        make_field("mystery-field", "euclidean", polar, h=0.1)


def test_every_field_preset_builds(euclid):
    _, polar = euclid
    for name in FIELD_NAMES:
        f = make_field(name, "euclidean", polar, h=1.0 / 32.0)
        assert f.analytic
        assert f.name == name
        assert f.max_value > 0.0
        assert f.domain.area > 0.0
        # fields vanish on the domain boundary up to the sagitta of the
        # polygon that stores it
        ring = f.domain.boundary_points(256)
        assert np.abs(f.u(ring)).max() <= 1e-4 * f.max_value


def test_field_specs_are_consistent():
    assert len(FIELD_SPECS) == 10
    assert len(set(FIELD_NAMES)) == 10
    for spec in FIELD_SPECS:
        for group in (spec.psz_equality, spec.lp_equality, spec.model_equality):
            assert set(group) <= set(NORM_NAMES)
        # a field radial enough to reproduce the model is also an Lp and
        # an energy fixed point
        assert set(spec.model_equality) <= set(spec.lp_equality)
        assert set(spec.lp_equality) <= set(spec.psz_equality)
    assert field_spec("radial-quadratic").model_equality == NORM_NAMES
    assert field_spec("distance-cube").talenti is False
    assert field_spec("distance-cube").psz_equality == ("euclidean",)
    assert field_spec("aniso-quadratic").psz_equality == ()


def test_radial_fields_adapt_to_the_gauge(norm_pair):
    name, (norm, polar) = norm_pair
    f = make_field("radial-quadratic", name, polar, h=1.0 / 32.0)
    # level sets are gauge balls: u(x) = 1 - Ho(x)^2
    pts = np.array([[0.2, 0.1], [-0.4, 0.3], [0.1, -0.6]])
    rho = polar.eval(pts)
    assert np.allclose(f.u(pts), 1.0 - rho**2, atol=1e-12)


def test_preset_build_is_deterministic(euclid):
    _, polar = euclid
    a = make_field("quartic-blend", "euclidean", polar, h=1.0 / 32.0)
    b = make_field("quartic-blend", "euclidean", polar, h=1.0 / 32.0)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.domain.vertices, b.domain.vertices)


def test_extract_domain_recovers_a_disc():
    def u_fn(p):
        return 0.25 - p[..., 0] ** 2 - p[..., 1] ** 2

    curve = extract_domain(u_fn, n_vertices=512)
    r = np.hypot(curve.vertices[:, 0], curve.vertices[:, 1])
    assert np.abs(r - 0.5).max() <= 1e-9
