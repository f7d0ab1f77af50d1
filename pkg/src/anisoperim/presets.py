"""Built-in gauges and manufactured fields for the verification suites.

Every field is analytic with vectorized value, gradient and Hessian
callbacks, positive inside its convex domain and zero on the boundary, and
has nonnegative Hessian determinant, so all identities and inequalities
under test apply.  Radial fields are adapted to the active gauge (their
level sets are Wulff shapes), giving equality cases; the quadratic family
probes translations, anisotropy and high aspect ratio; the two polynomial
fields have no special symmetry; the distance-cube field is piecewise
smooth with a plateau, a flat Hessian determinant on its edge strips and
an exactly computable Hessian integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ExtractionError
from .fields import DEFAULT_SPACING, ScalarField
from .geometry import ConvexCurve, WulffShape
from .norms import Norm, PolarNorm

NORM_NAMES = ("euclidean", "ellipse", "power3")


def make_norm(name: str):
    """A named gauge with its analytic polar."""
    if name == "euclidean":
        norm = Norm.euclidean()
    elif name == "ellipse":
        norm = Norm.ellipse(2.0, 1.0)
    elif name == "power3":
        norm = Norm.pnorm(3.0)
    else:
        raise ConfigurationError(f"unknown gauge preset {name!r}")
    return norm, PolarNorm(norm, mode="analytic")


def extract_domain(u_fn, center=(0.0, 0.0), n_vertices=2048, r_start=1.0,
                   iterations=60) -> ConvexCurve:
    """The region {u > 0} as a polygon, by radial bisection from center.

    Assumes the region is star-shaped around center (convex in all uses
    here) and that u < 0 far out along every ray.
    """
    center = np.asarray(center, dtype=float)
    theta = 2.0 * np.pi * (np.arange(n_vertices) + 0.5) / n_vertices
    rays = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    hi = np.full(n_vertices, float(r_start))
    for _ in range(40):
        grow = u_fn(center + hi[:, None] * rays) > 0.0
        if not grow.any():
            break
        hi[grow] *= 2.0
    else:
        raise ExtractionError("the positivity region is unbounded along some ray")
    lo = np.zeros(n_vertices)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        inside = u_fn(center + mid[:, None] * rays) > 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return ConvexCurve(center + (0.5 * (lo + hi))[:, None] * rays)


def radial_power_field(polar: PolarNorm, m: float, h, name) -> ScalarField:
    """u = 1 - Ho(x)^m on the unit Wulff shape of the gauge."""
    gauge = polar.as_norm()
    domain = WulffShape(polar, radius=1.0, n_vertices=2048).curve

    def u_fn(p):
        return 1.0 - gauge.eval(p) ** m

    def grad_fn(p):
        rho = gauge.eval(p)
        return -m * rho[..., None] ** (m - 1.0) * gauge.grad(p)

    def hess_fn(p):
        rho = gauge.eval(p)[..., None, None]
        g = gauge.grad(p)
        outer = g[..., :, None] * g[..., None, :]
        return -m * ((m - 1.0) * rho ** (m - 2.0) * outer + rho ** (m - 1.0) * gauge.hess(p))

    return ScalarField.from_callable(domain, u_fn, grad_fn, hess_fn, h=h, name=name)


def quadratic_field(a: float, b: float, angle: float, center, h, name) -> ScalarField:
    """u = 1 - |R(x - c)|_(a,b)^2 on the corresponding ellipse."""
    c = np.asarray(center, dtype=float)
    ca, sa = np.cos(angle), np.sin(angle)
    rot = np.array([[ca, sa], [-sa, ca]])  # maps world to ellipse frame
    quad = rot.T @ np.diag([1.0 / a**2, 1.0 / b**2]) @ rot

    def u_fn(p):
        y = p - c
        return 1.0 - np.einsum("...i,ij,...j->...", y, quad, y)

    def grad_fn(p):
        return -2.0 * np.einsum("ij,...j->...i", quad, p - c)

    def hess_fn(p):
        out = np.empty(p.shape[:-1] + (2, 2))
        out[...] = -2.0 * quad
        return out

    theta = 2.0 * np.pi * (np.arange(2048) + 0.5) / 2048
    ring = np.stack([a * np.cos(theta), b * np.sin(theta)], axis=-1)
    domain = ConvexCurve(c + ring @ rot)
    return ScalarField.from_callable(domain, u_fn, grad_fn, hess_fn, h=h, name=name)


def quartic_blend_field(h, name) -> ScalarField:
    def u_fn(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        return 1.0 - 0.5 * (x * x + 1.4 * y * y) - 0.3 * r2 * r2

    def grad_fn(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        return np.stack([-x - 1.2 * r2 * x, -1.4 * y - 1.2 * r2 * y], axis=-1)

    def hess_fn(p):
        x, y = p[..., 0], p[..., 1]
        r2 = x * x + y * y
        out = np.empty(p.shape[:-1] + (2, 2))
        out[..., 0, 0] = -1.0 - 1.2 * (r2 + 2.0 * x * x)
        out[..., 1, 1] = -1.4 - 1.2 * (r2 + 2.0 * y * y)
        out[..., 0, 1] = out[..., 1, 0] = -2.4 * x * y
        return out

    domain = extract_domain(u_fn)
    return ScalarField.from_callable(domain, u_fn, grad_fn, hess_fn, h=h, name=name)


def cubic_tilt_field(h, name) -> ScalarField:
    def u_fn(p):
        x, y = p[..., 0], p[..., 1]
        return 1.0 - x * x - y * y - 0.2 * x**3

    def grad_fn(p):
        x, y = p[..., 0], p[..., 1]
        return np.stack([-2.0 * x - 0.6 * x * x, -2.0 * y], axis=-1)

    def hess_fn(p):
        x = p[..., 0]
        out = np.zeros(p.shape[:-1] + (2, 2))
        out[..., 0, 0] = -2.0 - 1.2 * x
        out[..., 1, 1] = -2.0
        return out

    domain = extract_domain(u_fn)
    return ScalarField.from_callable(domain, u_fn, grad_fn, hess_fn, h=h, name=name)


def distance_cube_field(h, name, delta=0.4, n_core=16, core_radius=0.8,
                        n_arc=512) -> ScalarField:
    """u = delta^3 - dist(x, K)^3 on K inflated by a disc of radius delta.

    Inside the core polygon K the field is a plateau at delta^3.  On the
    collar the Hessian is rank one over the edge strips (so det hess u = 0
    there) and has determinant 18 d^2 over the vertex fans.
    """
    phase = 0.37
    ang = 2.0 * np.pi * np.arange(n_core) / n_core + phase
    core = ConvexCurve(core_radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1))
    disc_ang = 2.0 * np.pi * (np.arange(n_arc) + 0.5) / n_arc
    disc = ConvexCurve(delta * np.stack([np.cos(disc_ang), np.sin(disc_ang)], axis=-1))
    domain = core.minkowski_sum(disc)

    def parts(p):
        d, nearest, at_vertex = core.distance(p)
        inside = core.contains(p)
        d = np.where(inside, 0.0, d)
        return d, p - nearest, at_vertex, inside

    def u_fn(p):
        d, _, _, _ = parts(np.asarray(p, dtype=float))
        return delta**3 - d**3

    def grad_fn(p):
        d, v, _, inside = parts(np.asarray(p, dtype=float))
        # -3 d^2 * v/|v| with |v| = d
        return np.where(inside[..., None], 0.0, -3.0 * d[..., None] * v)

    def hess_fn(p):
        p = np.asarray(p, dtype=float)
        d, v, at_vertex, inside = parts(p)
        safe = np.where(d > 0.0, d, 1.0)
        nhat = v / safe[..., None]
        outer = nhat[..., :, None] * nhat[..., None, :]
        eye = np.eye(2)
        strip = -6.0 * d[..., None, None] * outer
        fan = -3.0 * d[..., None, None] * (eye + outer)
        out = np.where(at_vertex[..., None, None], fan, strip)
        return np.where(inside[..., None, None], 0.0, out)

    return ScalarField.from_callable(domain, u_fn, grad_fn, hess_fn, h=h, name=name)


@dataclass(frozen=True)
class FieldSpec:
    """A manufactured field and what the suites may assume about it.

    The three equality tuples list gauge names.  psz_equality: the Hessian
    integral is preserved by the perimeter rearrangement (needs the
    curvature concentrated where the level sets are Wulff arcs).
    lp_equality: every superlevel set is a Wulff shape, so the perimeter
    rearrangement also preserves measure and hence Lp norms.
    model_equality: additionally the rearranged source reproduces the
    field, so the radial model solution coincides with the rearrangement
    (needs the source nonincreasing outward along the levels).
    """

    name: str
    builder: object
    psz_equality: tuple
    lp_equality: tuple
    model_equality: tuple
    talenti: bool  # admissible source for the pointwise comparison


def _build(spec_name, norm_name, polar, h):
    if spec_name == "radial-quadratic":
        return radial_power_field(polar, 2.0, h, spec_name)
    if spec_name == "radial-cubic":
        return radial_power_field(polar, 3.0, h, spec_name)
    if spec_name == "radial-quartic":
        return radial_power_field(polar, 4.0, h, spec_name)
    if spec_name == "offset-quadratic":
        return quadratic_field(1.0, 1.0, 0.0, (0.13, -0.07), h, spec_name)
    if spec_name == "aniso-quadratic":
        return quadratic_field(1.3, 0.7, 0.0, (0.0, 0.0), h, spec_name)
    if spec_name == "rotated-quadratic":
        return quadratic_field(1.3, 0.7, np.pi / 6.0, (0.0, 0.0), h, spec_name)
    if spec_name == "thin-quadratic":
        return quadratic_field(1.6, 0.4, 0.0, (0.0, 0.0), h, spec_name)
    if spec_name == "quartic-blend":
        return quartic_blend_field(h, spec_name)
    if spec_name == "cubic-tilt":
        return cubic_tilt_field(h, spec_name)
    if spec_name == "distance-cube":
        return distance_cube_field(h, spec_name)
    raise ConfigurationError(f"unknown field preset {spec_name!r}")


_EUCLID = ("euclidean",)

FIELD_SPECS = (
    FieldSpec("radial-quadratic", _build, NORM_NAMES, NORM_NAMES, NORM_NAMES, True),
    FieldSpec("radial-cubic", _build, NORM_NAMES, NORM_NAMES, (), True),
    FieldSpec("radial-quartic", _build, NORM_NAMES, NORM_NAMES, (), True),
    FieldSpec("offset-quadratic", _build, _EUCLID, _EUCLID, _EUCLID, True),
    FieldSpec("aniso-quadratic", _build, (), (), (), True),
    FieldSpec("rotated-quadratic", _build, (), (), (), True),
    FieldSpec("thin-quadratic", _build, (), (), (), True),
    FieldSpec("quartic-blend", _build, (), (), (), True),
    FieldSpec("cubic-tilt", _build, (), (), (), True),
    FieldSpec("distance-cube", _build, _EUCLID, (), (), False),
)

FIELD_NAMES = tuple(spec.name for spec in FIELD_SPECS)


def field_spec(name: str) -> FieldSpec:
    for spec in FIELD_SPECS:
        if spec.name == name:
            return spec
    raise ConfigurationError(f"unknown field preset {name!r}")


def make_field(name: str, norm_name: str, polar: PolarNorm,
               h=DEFAULT_SPACING) -> ScalarField:
    return _build(name, norm_name, polar, h)
