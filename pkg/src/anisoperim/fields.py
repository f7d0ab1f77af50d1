"""Scalar fields on convex domains and the anisotropic Monge-Ampere toolbox.

A field u lives on a uniform grid covering its convex domain with a small
margin; node values outside the domain are zero, matching the extension by
zero of the admissible class (u > 0 inside, u = 0 on the boundary).  When
analytic callbacks for u, grad u and the Hessian are supplied they are used
everywhere; otherwise derivatives come from second-order central
differences, valid only two grid spacings inside the domain (queries closer
to the boundary raise StencilError).

Operators, for a gauge H with F = H^2/2:

    A[u]    = F_xixi(grad u) . hess u
    det_H u = det F_xixi(grad u) * det hess u        (= det A[u])
    k_H     = -sum_ij H_xi_i xi_j(grad u) u_ij       (curvature of level lines)

k_H has a second, independently coded route through the cofactor
contraction (f.g) tr A - (A f).g with f = F_xi(grad u), g = grad u, which
equals -k_H H(grad u)^3 identically; the two routes agree to rounding and
disagreement beyond 1e-4 relative is reported as an inconsistency.

The distribution function mu(t) = |{u > t}|, the anisotropic perimeter
profile lambda(t) = P_H({u > t}) and their derivatives

    mu'(t)     = - integral over {u = t} of 1/|grad u|
    lambda'(t) = - integral over {u = t} of k_H/|grad u|

are assembled in LevelSetProfile.  Bulk integrals use midpoint quadrature
with fractional coverage weights on boundary cells, obtained by
subsampling; level-line integrals use the trapezoid rule at the segment
midpoints of the extracted polygon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    EmptyLevelError,
    ExtractionError,
    InvalidCurveError,
    InvalidInputError,
    ProfileError,
    SingularGradientError,
    StencilError,
)
from .geometry import ConvexCurve, kappa_of
from .levelset import convexify, principal_loop, superlevel_loops
from .norms import Norm, PolarNorm

DEFAULT_SPACING = 1.0 / 256.0
# fractional margin in grid cells; keeps nodes and cell midpoints off the
# coordinate axes, where dual p-norm gauges lose regularity
GRID_MARGIN = 2.37
_FLAT_REL = 1e-12
_CURVATURE_ROUTE_TOL = 1e-4


def _det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


class ScalarField:
    """A nonnegative field on a convex domain, vanishing on its boundary."""

    def __init__(self, domain: ConvexCurve, origin, h, values, mask,
                 u_fn=None, grad_fn=None, hess_fn=None, name=""):
        self.domain = domain
        self.origin = np.asarray(origin, dtype=float)
        self.h = float(h)
        self.values = np.asarray(values, dtype=float)
        self.mask = np.asarray(mask, dtype=bool)
        self.u_fn = u_fn
        self.grad_fn = grad_fn
        self.hess_fn = hess_fn
        self.name = name
        self.nx, self.ny = self.values.shape
        self.xs = self.origin[0] + self.h * np.arange(self.nx)
        self.ys = self.origin[1] + self.h * np.arange(self.ny)
        if not np.isfinite(self.values).all():
            raise InvalidInputError("non-finite node value")
        if self.values.max() <= 0.0:
            raise InvalidInputError("field has no positive values on the grid")
        self._fd = None
        self._interp = {}
        self._quad_cache = {}
        self._grad_max = None

    @classmethod
    def from_callable(cls, domain: ConvexCurve, u_fn, grad_fn=None, hess_fn=None,
                      h=DEFAULT_SPACING, margin=GRID_MARGIN, name=""):
        lo = domain.vertices.min(axis=0) - margin * h
        hi = domain.vertices.max(axis=0) + margin * h
        nx = int(np.ceil((hi[0] - lo[0]) / h)) + 1
        ny = int(np.ceil((hi[1] - lo[1]) / h)) + 1
        xs = lo[0] + h * np.arange(nx)
        ys = lo[1] + h * np.arange(ny)
        pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
        mask = domain.contains(pts, strict=True)
        values = np.zeros((nx, ny))
        values[mask] = u_fn(pts[mask])
        return cls(domain, lo, h, values, mask, u_fn, grad_fn, hess_fn, name)

    @classmethod
    def from_grid(cls, domain: ConvexCurve, origin, h, values, name=""):
        values = np.asarray(values, dtype=float)
        origin = np.asarray(origin, dtype=float)
        nx, ny = values.shape
        xs = origin[0] + h * np.arange(nx)
        ys = origin[1] + h * np.arange(ny)
        pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
        mask = domain.contains(pts, strict=True)
        vals = np.where(mask, values, 0.0)
        return cls(domain, origin, h, vals, mask, name=name)

    @property
    def analytic(self) -> bool:
        return self.grad_fn is not None and self.hess_fn is not None

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    # -- pointwise evaluation ------------------------------------------------

    def _interpolator(self, key, grid):
        ip = self._interp.get(key)
        if ip is None:
            ip = RegularGridInterpolator((self.xs, self.ys), grid, method="linear",
                                         bounds_error=False, fill_value=np.nan)
            self._interp[key] = ip
        return ip

    def _fd_grids(self):
        if self._fd is not None:
            return self._fd
        v, h = self.values, self.h
        pad = np.pad(v, 1, mode="edge")
        c = pad[1:-1, 1:-1]
        ux = (pad[2:, 1:-1] - pad[:-2, 1:-1]) / (2 * h)
        uy = (pad[1:-1, 2:] - pad[1:-1, :-2]) / (2 * h)
        uxx = (pad[2:, 1:-1] - 2 * c + pad[:-2, 1:-1]) / h**2
        uyy = (pad[1:-1, 2:] - 2 * c + pad[1:-1, :-2]) / h**2
        uxy = (pad[2:, 2:] - pad[2:, :-2] - pad[:-2, 2:] + pad[:-2, :-2]) / (4 * h**2)
        # a stencil is trusted only when its full 3x3 neighborhood is inside
        m = np.pad(self.mask, 1, mode="constant")
        valid = np.ones_like(self.mask)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                valid &= m[1 + di : 1 + di + self.nx, 1 + dj : 1 + dj + self.ny]
        bad = ~valid
        for g in (ux, uy, uxx, uyy, uxy):
            g[bad] = np.nan
        self._fd = {"ux": ux, "uy": uy, "uxx": uxx, "uyy": uyy, "uxy": uxy}
        return self._fd

    def u(self, points):
        points = np.asarray(points, dtype=float)
        if self.u_fn is not None:
            return np.asarray(self.u_fn(points), dtype=float)
        out = self._interpolator("u", self.values)(points)
        if np.isnan(out).any():
            raise StencilError("field query outside the grid")
        return out

    def grad(self, points):
        points = np.asarray(points, dtype=float)
        if self.grad_fn is not None:
            return np.asarray(self.grad_fn(points), dtype=float)
        fd = self._fd_grids()
        gx = self._interpolator("ux", fd["ux"])(points)
        gy = self._interpolator("uy", fd["uy"])(points)
        out = np.stack([gx, gy], axis=-1)
        if np.isnan(out).any():
            raise StencilError(
                "gradient stencil reaches within two spacings of the boundary"
            )
        return out

    def hess(self, points):
        points = np.asarray(points, dtype=float)
        if self.hess_fn is not None:
            return np.asarray(self.hess_fn(points), dtype=float)
        fd = self._fd_grids()
        hxx = self._interpolator("uxx", fd["uxx"])(points)
        hyy = self._interpolator("uyy", fd["uyy"])(points)
        hxy = self._interpolator("uxy", fd["uxy"])(points)
        if np.isnan(hxx).any() or np.isnan(hyy).any() or np.isnan(hxy).any():
            raise StencilError(
                "Hessian stencil reaches within two spacings of the boundary"
            )
        out = np.empty(points.shape[:-1] + (2, 2))
        out[..., 0, 0] = hxx
        out[..., 1, 1] = hyy
        out[..., 0, 1] = hxy
        out[..., 1, 0] = hxy
        return out

    def grad_max(self) -> float:
        """sup |grad u| over the closed domain (grid nodes plus boundary)."""
        if self._grad_max is not None:
            return self._grad_max
        if self.analytic:
            pts = np.stack(np.meshgrid(self.xs, self.ys, indexing="ij"), axis=-1)[self.mask]
            g = self.grad(pts)
            m = float(np.hypot(g[..., 0], g[..., 1]).max())
            gb = self.grad(self.domain.boundary_points(4096))
            m = max(m, float(np.hypot(gb[..., 0], gb[..., 1]).max()))
        else:
            fd = self._fd_grids()
            m = float(np.nanmax(np.hypot(fd["ux"], fd["uy"])))
            # stencils near the boundary are masked, yet the gradient often
            # peaks there; the chord slope from a node to its boundary
            # projection (where u = 0) recovers it to first order
            ring = self.mask & ~np.isfinite(fd["ux"])
            if ring.any():
                pts = np.stack(np.meshgrid(self.xs, self.ys, indexing="ij"),
                               axis=-1)[ring]
                d, _, _ = self.domain.distance(pts)
                # nodes hugging the polygon amplify any mismatch between the
                # stored polygon and the surface u vanishes on, so keep a
                # half-spacing standoff
                live = d >= 0.5 * self.h
                if live.any():
                    m = max(m, float((self.values[ring][live] / d[live]).max()))
        self._grad_max = m
        return m

    # -- anisotropic operators -----------------------------------------------

    def _grad_checked(self, points, floor_rel=1e-13):
        g = self.grad(points)
        gn = np.hypot(g[..., 0], g[..., 1])
        if np.any(gn <= floor_rel * max(self.grad_max(), 1.0)):
            raise SingularGradientError("vanishing gradient at a query point")
        return g

    def det_h(self, points, norm: Norm):
        """det F_xixi(grad u) * det hess u."""
        g = self._grad_checked(points)
        return _det2(norm.f_hessian(g)) * _det2(self.hess(points))

    def a_matrix(self, points, norm: Norm):
        """A[u] = F_xixi(grad u) . hess u."""
        g = self._grad_checked(points)
        return np.einsum("...ij,...jk->...ik", norm.f_hessian(g), self.hess(points))

    def curvature(self, points, norm: Norm, route="hessian"):
        """Anisotropic curvature of the level line through each point.

        route "hessian" contracts the gauge Hessian with the field Hessian;
        route "cofactor" evaluates -((f.g) tr A - (A f).g)/H(grad u)^3 with
        f = F_xi(grad u), g = grad u.  Both are exact rearrangements of the
        same expression, so they must agree to rounding.
        """
        g = self._grad_checked(points)
        hess = self.hess(points)
        if route == "hessian":
            return -np.einsum("...ij,...ij->...", norm.hess(g), hess)
        if route == "cofactor":
            hval = norm.eval(g)
            f = hval[..., None] * norm.grad(g)
            a = np.einsum("...ij,...jk->...ik", norm.f_hessian(g), hess)
            form = (f * g).sum(axis=-1) * (a[..., 0, 0] + a[..., 1, 1])
            form -= (np.einsum("...ij,...j->...i", a, f) * g).sum(axis=-1)
            return -form / hval**3
        raise ConfigurationError(f"unknown curvature route {route!r}")

    def curvature_checked(self, points, norm: Norm):
        """Curvature with the two routes cross-checked at 1e-4 relative."""
        k1 = self.curvature(points, norm, route="hessian")
        k2 = self.curvature(points, norm, route="cofactor")
        scale = np.maximum(np.abs(k1), 1e-30)
        worst = float((np.abs(k1 - k2) / scale).max())
        if worst > _CURVATURE_ROUTE_TOL:
            raise ConsistencyError(
                f"curvature routes disagree by {worst:.3e} relative"
            )
        return k1

    # -- quadrature ----------------------------------------------------------

    def cell_midpoints(self, refine=1):
        r = int(refine)
        step = self.h / r
        cx = self.xs[0] + step * (np.arange((self.nx - 1) * r) + 0.5)
        cy = self.ys[0] + step * (np.arange((self.ny - 1) * r) + 0.5)
        return cx, cy

    def quadrature_weights(self, refine=1, sub=8):
        """Fractional coverage of the domain per fine cell, in [0, 1]."""
        key = (int(refine), int(sub))
        cached = self._quad_cache.get(key)
        if cached is not None:
            return cached
        r = int(refine)
        step = self.h / r
        fx = self.xs[0] + step * np.arange((self.nx - 1) * r + 1)
        fy = self.ys[0] + step * np.arange((self.ny - 1) * r + 1)
        nodes_in = self.domain.contains(
            np.stack(np.meshgrid(fx, fy, indexing="ij"), axis=-1), strict=True
        )
        corners = (
            nodes_in[:-1, :-1].astype(np.int8)
            + nodes_in[1:, :-1]
            + nodes_in[1:, 1:]
            + nodes_in[:-1, 1:]
        )
        w = np.zeros(corners.shape)
        w[corners == 4] = 1.0
        mixed = (corners > 0) & (corners < 4)
        cx, cy = self.cell_midpoints(r)
        # cells with no inside corner can still clip a sliver where the
        # boundary runs between node rows; catch those whose center lies in
        # the domain inflated by a diagonal step
        none_idx = np.nonzero(corners == 0)
        if none_idx[0].size:
            pad_r = step * np.sqrt(2.0) * 1.01
            m = 32
            ang = 2.0 * np.pi * (np.arange(m) + 0.5) / m
            pad = ConvexCurve(
                pad_r / np.cos(np.pi / m) * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
            )
            inflated = self.domain.minkowski_sum(pad)
            centers = np.stack([cx[none_idx[0]], cy[none_idx[1]]], axis=-1)
            close = inflated.contains(centers)
            mixed[none_idx[0][close], none_idx[1][close]] = True
        mi, mj = np.nonzero(mixed)
        if mi.size:
            off = (np.arange(sub) + 0.5) / sub - 0.5
            ox, oy = np.meshgrid(off, off, indexing="ij")
            sample = np.stack(
                [
                    cx[mi][:, None] + step * ox.ravel()[None, :],
                    cy[mj][:, None] + step * oy.ravel()[None, :],
                ],
                axis=-1,
            )
            w[mi, mj] = self.domain.contains(sample, strict=True).mean(axis=1)
        self._quad_cache[key] = w
        return w

    def superlevel_weights(self, t, refine=1, sub=8):
        """Fractional coverage of {u > t} per fine cell."""
        if t < 0:
            raise DomainError("levels are nonnegative")
        r = int(refine)
        step = self.h / r
        fx = self.xs[0] + step * np.arange((self.nx - 1) * r + 1)
        fy = self.ys[0] + step * np.arange((self.ny - 1) * r + 1)
        pts = np.stack(np.meshgrid(fx, fy, indexing="ij"), axis=-1)
        if self.u_fn is not None:
            vals = np.where(
                self.domain.contains(pts, strict=True), self.u_fn(pts), 0.0
            )
        else:
            vals = self._interpolator("u", self.values)(pts)
            vals = np.nan_to_num(vals, nan=0.0)
        above = vals > t
        corners = (
            above[:-1, :-1].astype(np.int8)
            + above[1:, :-1]
            + above[1:, 1:]
            + above[:-1, 1:]
        )
        w = np.zeros(corners.shape)
        w[corners == 4] = 1.0
        mi, mj = np.nonzero((corners > 0) & (corners < 4))
        if mi.size:
            cx, cy = self.cell_midpoints(r)
            off = (np.arange(sub) + 0.5) / sub - 0.5
            ox, oy = np.meshgrid(off, off, indexing="ij")
            sample = np.stack(
                [
                    cx[mi][:, None] + step * ox.ravel()[None, :],
                    cy[mj][:, None] + step * oy.ravel()[None, :],
                ],
                axis=-1,
            )
            if self.u_fn is not None:
                svals = np.where(
                    self.domain.contains(sample, strict=True), self.u_fn(sample), 0.0
                )
            else:
                svals = np.nan_to_num(
                    self._interpolator("u", self.values)(sample), nan=0.0
                )
            w[mi, mj] = (svals > t).mean(axis=1)
        return w

    def integrate(self, integrand, weights, refine=1, chunk=1 << 18):
        """Sum of integrand over weighted fine-cell midpoints.

        integrand maps (n, 2) midpoints to (n,) values; cells with zero
        weight are skipped, so the integrand is never evaluated outside the
        covered region.
        """
        r = int(refine)
        cx, cy = self.cell_midpoints(r)
        ci, cj = np.nonzero(weights > 0.0)
        total = 0.0
        for lo in range(0, ci.size, chunk):
            sl = slice(lo, lo + chunk)
            pts = np.stack([cx[ci[sl]], cy[cj[sl]]], axis=-1)
            total += float(np.dot(integrand(pts), weights[ci[sl], cj[sl]]))
        return total * (self.h / r) ** 2

    # -- level sets ------------------------------------------------------------

    def _snap(self, pts, t, iterations=2):
        if self.u_fn is None or self.grad_fn is None:
            return pts
        out = pts.copy()
        floor = 1e-9 * max(self.grad_max(), 1.0)
        # extracted vertices already sit within one cell of the curve, so
        # any longer correction is a Newton blow-up (tiny gradient next to
        # a plateau), not a refinement
        cap = self.h
        for _ in range(iterations):
            g = np.asarray(self.grad_fn(out), dtype=float)
            gn2 = (g * g).sum(axis=-1)
            gn = np.sqrt(gn2)
            ok = gn > floor
            resid = t - np.asarray(self.u_fn(out), dtype=float)
            step = np.where(ok, resid / np.where(ok, gn2, 1.0), 0.0)
            move = np.abs(step) * gn
            shrink = np.where(move > cap, cap / np.where(move > 0.0, move, 1.0), 1.0)
            out = out + (step * shrink)[..., None] * g
        return out

    def level_curve(self, t) -> ConvexCurve:
        """The boundary of {u > t} as a convex polygon."""
        if t < 0:
            raise DomainError("levels are nonnegative")
        if t == 0:
            return self.domain
        if t >= self.max_value:
            raise EmptyLevelError(
                f"level {t} is at or above the field maximum {self.max_value}"
            )
        loops = superlevel_loops(self.xs, self.ys, self.values, t)
        loop = principal_loop(loops)
        if loop is None:
            raise EmptyLevelError(f"no grid cell exceeds level {t}")
        return convexify(self._snap(loop, t))

    def _flat_mask(self, g):
        gn = np.hypot(g[..., 0], g[..., 1])
        return gn <= _FLAT_REL * max(self.grad_max(), 1.0)


def _midpoint_line_data(curve: ConvexCurve, per_segment=4):
    """Composite midpoint nodes and weights along the polygon boundary.

    Each segment is split so that integrands with jumps inside a segment
    (piecewise fields) are resolved below the segment scale.
    """
    v = curve.vertices
    e = curve.edges
    q = int(per_segment)
    frac = (np.arange(q) + 0.5) / q
    mids = (v[:, None, :] + frac[None, :, None] * e[:, None, :]).reshape(-1, 2)
    seg = np.repeat(np.hypot(e[:, 0], e[:, 1]) / q, q)
    return mids, seg


@dataclass
class LevelSetProfile:
    """Distribution and perimeter profiles of a field over its levels."""

    t: np.ndarray
    mu: np.ndarray
    lam: np.ndarray
    lam_prime: np.ndarray
    mu_prime: np.ndarray
    kappa: float
    max_value: float
    grad_sup: float
    perimeter: float  # lambda at t = 0
    area: float  # mu at t = 0
    beta: float = 1.0  # upper gauge-equivalence constant of the norm used
    top_area: float = 0.0  # area of {u = max}, nonzero for plateau fields
    top_perimeter: float = 0.0
    name: str = ""

    def validate(self):
        """Monotonicity, the isoperimetric bound and the derivative bound."""
        if np.any(np.diff(self.mu) >= 0.0):
            raise ProfileError("distribution function is not strictly decreasing")
        if np.any(np.diff(self.lam) >= 0.0):
            raise ProfileError("perimeter profile is not strictly decreasing")
        slack = 1e-9 * self.lam[0] ** 2
        if np.any(self.lam**2 < 4.0 * self.kappa * self.mu - slack):
            raise ProfileError("isoperimetric bound fails along the profile")
        # equality cases touch this bound, so leave room for the polygonal
        # discretization of the level lines; the t = 0 row integrates over
        # the stored domain polygon, whose chords can cut across jumps of
        # the integrand of piecewise fields, and gets a coarser allowance
        bound = -2.0 * self.kappa / (self.grad_sup * self.beta)
        slack = np.where(self.t <= 0.0, 1e-2, 1e-4)
        finite = np.isfinite(self.lam_prime)
        if np.any(self.lam_prime[finite] > bound * (1.0 - slack[finite])):
            raise ProfileError("perimeter derivative exceeds its negative upper bound")

    def derivative_cross_check(self, skip_top=None):
        """Max relative gap between lambda' and central differences of lambda.

        A fixed fraction of the top levels is excluded: lambda' typically
        blows up with a power of (max - t) there, and since the blowup is
        scale free a uniform-step difference quotient only becomes a
        faithful reference a fixed number of steps below the top.
        """
        n = self.t.size
        if skip_top is None:
            skip_top = max(3, n // 8)
        if n < skip_top + 3:
            raise ProfileError("too few levels for a derivative cross-check")
        worst = 0.0
        compared = 0
        for i in range(1, n - 1 - skip_top):
            if not np.isfinite(self.lam_prime[i]):
                # grid-backed fields lose the quadrature route where the
                # stencil nears the boundary; nothing to compare there
                continue
            fd = (self.lam[i + 1] - self.lam[i - 1]) / (self.t[i + 1] - self.t[i - 1])
            worst = max(worst, abs(fd - self.lam_prime[i]) / abs(self.lam_prime[i]))
            compared += 1
        if compared < 3:
            raise ProfileError("too few finite perimeter derivatives to cross-check")
        return worst



def build_profile(field: ScalarField, norm: Norm, polar: PolarNorm,
                  n_levels=32) -> LevelSetProfile:
    """Profile of mu, lambda and their derivatives on uniform levels.

    Levels are t_k = k M / n for k = 0 .. n-1.  Areas and perimeters come
    from the extracted polygons; the derivative rows integrate 1/|grad u|
    and k_H/|grad u| over the level polygon.  In grid-only mode the
    derivative columns are NaN wherever the stencil is too close to the
    boundary.
    """
    if n_levels < 8:
        raise ConfigurationError("profiles need at least 8 levels")
    m = field.max_value
    ts = m * np.arange(n_levels) / n_levels
    mu = np.empty(n_levels)
    lam = np.empty(n_levels)
    lamp = np.full(n_levels, np.nan)
    mup = np.full(n_levels, np.nan)
    for i, t in enumerate(ts):
        curve = field.level_curve(float(t))
        mu[i] = curve.area
        lam[i] = curve.anisotropic_perimeter(norm)
        mids, seg = _midpoint_line_data(curve)
        try:
            g = field._grad_checked(mids)
            gn = np.hypot(g[..., 0], g[..., 1])
            k = field.curvature(mids, norm, route="hessian")
            lamp[i] = -float((k / gn * seg).sum())
            mup[i] = -float((seg / gn).sum())
        except (StencilError, SingularGradientError):
            pass
    # Fields attaining their max on a set of positive area put an atom at
    # the top of the distribution; measure it so the rearrangement tables
    # can carry the flat head.  For fields with a single peak the extracted
    # cap is either absent or of negligible area, and is dropped.
    top_area = 0.0
    top_perimeter = 0.0
    try:
        cap = field.level_curve(float(m * (1.0 - 1e-6)))
    except (EmptyLevelError, ExtractionError, InvalidCurveError,
            StencilError, SingularGradientError):
        pass
    else:
        if cap.area > 1e-3 * mu[0]:
            top_area = cap.area
            top_perimeter = cap.anisotropic_perimeter(norm)
    profile = LevelSetProfile(
        t=ts, mu=mu, lam=lam, lam_prime=lamp, mu_prime=mup,
        kappa=kappa_of(polar), max_value=m, grad_sup=field.grad_max(),
        perimeter=lam[0], area=mu[0], beta=norm.beta,
        top_area=top_area, top_perimeter=top_perimeter, name=field.name,
    )
    return profile


def hessian_integral_report(field: ScalarField, norm: Norm, refine=2) -> dict:
    """Three quadrature routes to the Hessian integral of u.

    det route:       integral of u det_H u
    curvature route: 1/2 integral of k_H H(grad u)^3
    cofactor route:  -1/2 integral of (f.g) tr A - (A f).g

    The det route differs from the other two by an integration by parts, so
    its agreement is a genuine check; the last two are pointwise equal and
    serve as an implementation consistency check.  Cells where the gradient
    vanishes contribute nothing to any route.
    """
    if not field.analytic:
        raise ConfigurationError("Hessian integrals need analytic derivatives")
    w = field.quadrature_weights(refine)

    def det_integrand(pts):
        g = field.grad(pts)
        flat = field._flat_mask(g)
        out = np.zeros(pts.shape[0])
        if np.any(~flat):
            p = pts[~flat]
            out[~flat] = field.u(p) * field.det_h(p, norm)
        return out

    def curv_integrand(pts):
        g = field.grad(pts)
        flat = field._flat_mask(g)
        out = np.zeros(pts.shape[0])
        if np.any(~flat):
            p = pts[~flat]
            gg = g[~flat]
            k = field.curvature(p, norm, route="hessian")
            out[~flat] = 0.5 * k * norm.eval(gg) ** 3
        return out

    def cof_integrand(pts):
        g = field.grad(pts)
        flat = field._flat_mask(g)
        out = np.zeros(pts.shape[0])
        if np.any(~flat):
            p = pts[~flat]
            gg = g[~flat]
            k = field.curvature(p, norm, route="cofactor")
            out[~flat] = 0.5 * k * norm.eval(gg) ** 3
        return out

    return {
        "det_route": field.integrate(det_integrand, w, refine),
        "curvature_route": field.integrate(curv_integrand, w, refine),
        "cofactor_route": field.integrate(cof_integrand, w, refine),
    }


def reilly_report(field: ScalarField, norm: Norm, levels, refine=2) -> list:
    """Bulk vs boundary form of the divergence identity on superlevel sets.

    For each level t, the integral of det_H u over {u > t} is compared with
    1/2 the integral of k_H H(grad u)^3 / |grad u| over {u = t}.
    """
    if not field.analytic:
        raise ConfigurationError("the divergence identity needs analytic derivatives")
    rows = []
    for t in levels:
        w = field.superlevel_weights(float(t), refine)

        def integrand(pts):
            g = field.grad(pts)
            flat = field._flat_mask(g)
            out = np.zeros(pts.shape[0])
            if np.any(~flat):
                p = pts[~flat]
                out[~flat] = field.det_h(p, norm)
            return out

        lhs = field.integrate(integrand, w, refine)
        curve = field.level_curve(float(t))
        mids, seg = _midpoint_line_data(curve)
        g = field._grad_checked(mids)
        gn = np.hypot(g[..., 0], g[..., 1])
        k = field.curvature(mids, norm, route="hessian")
        rhs = 0.5 * float((k * norm.eval(g) ** 3 / gn * seg).sum())
        rows.append(
            {
                "t": float(t),
                "bulk": lhs,
                "boundary": rhs,
                "rel_gap": abs(lhs - rhs) / max(abs(rhs), 1e-30),
            }
        )
    return rows


def curvature_route_gap(field: ScalarField, norm: Norm, points) -> float:
    """Max relative disagreement of the two curvature routes at the points.

    Points where both routes vanish to rounding (flat directions of a
    piecewise field) are compared against the overall curvature scale
    instead of against their own near-zero value.
    """
    k1 = field.curvature(points, norm, route="hessian")
    k2 = field.curvature(points, norm, route="cofactor")
    scale = max(float(np.abs(k1).max()), 1e-30)
    diff = np.abs(k1 - k2)
    live = np.abs(k1) > 1e-8 * scale
    worst = float((diff[~live] / scale).max()) if np.any(~live) else 0.0
    if np.any(live):
        worst = max(worst, float((diff[live] / np.abs(k1[live])).max()))
    return worst
