"""Convex polygonal geometry for anisotropic perimeters.

A convex body K is carried as a counterclockwise polygon without repeated
or collinear vertices.  The anisotropic perimeter of K w.r.t. a gauge H is

    P_H(K) = sum over edges of H(outward normal) * edge length,

which is exact for polygons because the normal is constant on each edge.
The Wulff shape W = {Ho < 1} plays the role of the unit ball: P_H(R W) =
2 kappa R with kappa = |W|, the Minkowski sum K + delta W obeys the
quadratic expansion |K + delta W| = |K| + P_H(K) delta + kappa delta^2,
and P_H(K)^2 >= 4 kappa |K| with equality exactly on Wulff shapes.
Polygonal sums are computed exactly by the sorted edge merge, so the only
discretization error in the expansion checks is the polygonal
approximation of W itself, which is O(n^-2) in the vertex count.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InvalidCurveError, InvalidInputError
from .norms import Norm, PolarNorm

_COLLINEAR_TOL = 1e-12
_KAPPA_SAMPLES = 1 << 17


def _clean_vertices(vertices):
    """Drop duplicate and collinear vertices; returns a CCW array."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise InvalidCurveError(f"need at least 3 plane vertices, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise InvalidCurveError("non-finite vertex coordinate")
    area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    if area2 < 0.0:
        v = v[::-1]
    diam = max(np.ptp(v[:, 0]), np.ptp(v[:, 1]))
    if diam == 0.0:
        raise InvalidCurveError("degenerate polygon")
    # iterate because removing a vertex can make its neighbors collinear;
    # the criterion is the turn angle, so fine polygons with short edges
    # survive, while reflex vertices are kept for the convexity check
    for _ in range(v.shape[0]):
        e_prev = v - np.roll(v, 1, axis=0)
        e_next = np.roll(v, -1, axis=0) - v
        cross = e_prev[:, 0] * e_next[:, 1] - e_prev[:, 1] * e_next[:, 0]
        lp = np.hypot(e_prev[:, 0], e_prev[:, 1])
        ln = np.hypot(e_next[:, 0], e_next[:, 1])
        scale = lp * ln
        # the cross of rounded vertices carries absolute noise of order
        # eps * diam * edge length, which dominates the relative term for
        # short edges meeting long ones (e.g. merged parallel edges)
        noise = 32.0 * np.finfo(float).eps * diam * (lp + ln)
        collinear = (np.abs(cross) <= np.maximum(_COLLINEAR_TOL * scale, noise)) & (scale > 0.0)
        dup = ln < 1e-14 * diam
        keep = ~collinear & ~dup
        if keep.all():
            break
        v = v[keep]
        if v.shape[0] < 3:
            raise InvalidCurveError("polygon collapses after collinear cleanup")
    return v


class ConvexCurve:
    """A convex CCW polygon with exact perimeter and area operations."""

    def __init__(self, vertices):
        v = _clean_vertices(vertices)
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        if not (cross > 0.0).all():
            raise InvalidCurveError("vertices do not bound a convex region")
        self.vertices = v
        self._angles = None

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def edges(self):
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def outward_normals(self):
        e = self.edges
        n = np.stack([e[:, 1], -e[:, 0]], axis=-1)
        return n / np.hypot(n[:, 0], n[:, 1])[:, None]

    @property
    def area(self) -> float:
        v = self.vertices
        return 0.5 * float(
            np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        )

    @property
    def centroid(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return (v + w).T @ cross / (6.0 * self.area)

    def perimeter(self) -> float:
        e = self.edges
        return float(np.hypot(e[:, 0], e[:, 1]).sum())

    def anisotropic_perimeter(self, norm: Norm) -> float:
        # H(nu)|e| = H((e_y, -e_x)) by 1-homogeneity
        e = self.edges
        return float(norm.eval(np.stack([e[:, 1], -e[:, 0]], axis=-1)).sum())

    def translate(self, shift) -> "ConvexCurve":
        return ConvexCurve(self.vertices + np.asarray(shift, dtype=float))

    def scale(self, factor: float) -> "ConvexCurve":
        if factor <= 0:
            raise InvalidInputError("scale factor must be positive")
        return ConvexCurve(self.vertices * factor)

    def contains(self, points, strict=False):
        """Vectorized membership test via wedge lookup around the centroid."""
        pts = np.asarray(points, dtype=float)
        if self._angles is None:
            c = self.centroid
            phi = np.arctan2(self.vertices[:, 1] - c[1], self.vertices[:, 0] - c[0])
            start = int(np.argmin(phi))
            self._wedge_verts = np.roll(self.vertices, -start, axis=0)
            self._angles = np.roll(phi, -start)
            self._wedge_center = c
        c = self._wedge_center
        psi = np.arctan2(pts[..., 1] - c[1], pts[..., 0] - c[0])
        idx = np.searchsorted(self._angles, psi, side="right") - 1
        idx %= self.n_vertices
        a = self._wedge_verts[idx]
        b = self._wedge_verts[(idx + 1) % self.n_vertices]
        cross = (b[..., 0] - a[..., 0]) * (pts[..., 1] - a[..., 1]) - (
            b[..., 1] - a[..., 1]
        ) * (pts[..., 0] - a[..., 0])
        return cross > 0.0 if strict else cross >= 0.0

    def _edges_from_bottom(self):
        v = self.vertices
        order = np.lexsort((v[:, 0], v[:, 1]))
        v = np.roll(v, -order[0], axis=0)
        e = np.roll(v, -1, axis=0) - v
        ang = np.mod(np.arctan2(e[:, 1], e[:, 0]), 2.0 * np.pi)
        return v[0], e, ang

    def minkowski_sum(self, other: "ConvexCurve") -> "ConvexCurve":
        """Exact polygon sum by the monotone edge merge."""
        a0, ea, xa = self._edges_from_bottom()
        b0, eb, xb = other._edges_from_bottom()
        ia = ib = 0
        merged = []
        while ia < len(ea) or ib < len(eb):
            if ib >= len(eb) or (ia < len(ea) and xa[ia] <= xb[ib]):
                merged.append(ea[ia])
                ia += 1
            else:
                merged.append(eb[ib])
                ib += 1
        verts = a0 + b0 + np.concatenate([[(0.0, 0.0)], np.cumsum(merged, axis=0)[:-1]])
        return ConvexCurve(verts)

    def boundary_points(self, n: int):
        """n points equally spaced in arc length along the polygon."""
        if n < 1:
            raise InvalidInputError("need at least one boundary point")
        e = self.edges
        lengths = np.hypot(e[:, 0], e[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        s = cum[-1] * np.arange(n) / n
        idx = np.searchsorted(cum, s, side="right") - 1
        idx = np.clip(idx, 0, self.n_vertices - 1)
        frac = (s - cum[idx]) / lengths[idx]
        return self.vertices[idx] + frac[:, None] * e[idx]

    def distance(self, points, chunk=None):
        """Euclidean distance to the polygon boundary, with feature data.

        Returns (dist, nearest, at_vertex) where at_vertex flags points
        whose closest boundary feature is a corner rather than an edge
        interior.  dist is the distance to the boundary curve, not the
        signed distance; combine with :meth:`contains` if a sign is needed.
        """
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 2)
        a = self.vertices
        e = self.edges
        ll = (e * e).sum(axis=1)
        if chunk is None:
            # keep the (points x edges) temporaries around 100 MB
            chunk = max(1, (1 << 21) // self.n_vertices)
        dist = np.empty(flat.shape[0])
        nearest = np.empty_like(flat)
        at_vertex = np.empty(flat.shape[0], dtype=bool)
        for lo in range(0, flat.shape[0], chunk):
            p = flat[lo : lo + chunk]
            diff = p[:, None, :] - a[None, :, :]
            t = np.clip((diff * e[None, :, :]).sum(axis=2) / ll[None, :], 0.0, 1.0)
            proj = a[None, :, :] + t[:, :, None] * e[None, :, :]
            d2 = ((p[:, None, :] - proj) ** 2).sum(axis=2)
            j = np.argmin(d2, axis=1)
            rows = np.arange(p.shape[0])
            dist[lo : lo + chunk] = np.sqrt(d2[rows, j])
            nearest[lo : lo + chunk] = proj[rows, j]
            tj = t[rows, j]
            at_vertex[lo : lo + chunk] = (tj <= 1e-12) | (tj >= 1.0 - 1e-12)
        shape = pts.shape[:-1]
        return dist.reshape(shape), nearest.reshape(shape + (2,)), at_vertex.reshape(shape)


def kappa_of(polar: PolarNorm, samples: int = _KAPPA_SAMPLES) -> float:
    """Area of the Wulff shape {Ho < 1} by the periodic polar-area rule."""
    cached = polar._kappa_cache.get(samples)
    if cached is not None:
        return cached
    theta = 2.0 * np.pi * (np.arange(samples) + 0.5) / samples
    r = 1.0 / polar.eval(np.stack([np.cos(theta), np.sin(theta)], axis=-1))
    kappa = float(np.pi / samples * (r * r).sum())
    polar._kappa_cache[samples] = kappa
    return kappa


class WulffShape:
    """Polygonal Wulff shape x0 + R {Ho < 1} with vertices on the true boundary."""

    def __init__(self, polar: PolarNorm, radius=1.0, center=(0.0, 0.0), n_vertices=512):
        if radius <= 0:
            raise InvalidInputError("Wulff radius must be positive")
        if n_vertices < 8:
            raise InvalidInputError("Wulff polygon needs at least 8 vertices")
        self.polar = polar
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)
        # half-step offset keeps vertices off the coordinate axes, where
        # dual p-norm gauges lose second derivatives
        theta = 2.0 * np.pi * (np.arange(n_vertices) + 0.5) / n_vertices
        u = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        verts = self.center + self.radius * u / polar.eval(u)[:, None]
        self.curve = ConvexCurve(verts)

    @property
    def kappa(self) -> float:
        return kappa_of(self.polar)


def steiner_report(curve: ConvexCurve, norm: Norm, polar: PolarNorm, deltas, n_wulff=4096):
    """Residuals of the quadratic volume expansion and its first variation.

    For each inflation width delta the exact polygon sum K + delta W is
    compared against |K| + P_H(K) delta + kappa delta^2 and against
    P_H(K) + 2 kappa delta.  The perimeter row is the discrete form of the
    total-curvature identity: the first variation of P_H under Wulff
    inflation is the constant 2 kappa.
    """
    kappa = kappa_of(polar)
    wulff = WulffShape(polar, radius=1.0, n_vertices=n_wulff)
    area0 = curve.area
    perim0 = curve.anisotropic_perimeter(norm)
    rows = []
    for delta in deltas:
        if delta <= 0:
            raise InvalidInputError("inflation width must be positive")
        inflated = curve.minkowski_sum(wulff.curve.scale(delta))
        area = inflated.area
        perim = inflated.anisotropic_perimeter(norm)
        rows.append(
            {
                "delta": float(delta),
                "area": area,
                "area_predicted": area0 + perim0 * delta + kappa * delta * delta,
                "perimeter": perim,
                "perimeter_predicted": perim0 + 2.0 * kappa * delta,
                "total_curvature": (perim - perim0) / delta,
                "total_curvature_predicted": 2.0 * kappa,
            }
        )
    return rows


def isoperimetric_deficit(curve: ConvexCurve, norm: Norm, polar: PolarNorm) -> float:
    """P_H(K)^2 - 4 kappa |K|; nonnegative, zero exactly on Wulff shapes."""
    p = curve.anisotropic_perimeter(norm)
    return p * p - 4.0 * kappa_of(polar) * curve.area


def random_convex_polygon(rng, n_points=16, scale=1.0, center=(0.0, 0.0)) -> ConvexCurve:
    """Convex hull of a Gaussian point cloud; at least a triangle."""
    pts = center + scale * rng.standard_normal((max(int(n_points), 3), 2))
    hull = ConvexHull(pts)
    return ConvexCurve(pts[hull.vertices])
