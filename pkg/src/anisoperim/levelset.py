"""Superlevel-set contour extraction on uniform grids.

Chains marching-squares crossings into closed CCW loops around {u > t}.
Crossing points are stored once per grid edge, so the two cells sharing an
edge reference bitwise-identical coordinates and loops close exactly.
Saddle cells (two opposite corners above the level) are split according to
the cell-center value.  Loops can be post-processed by a snapping callable
(e.g. a Newton projection onto the analytic level curve) before being
convexified; convexification takes the hull of the loop points, which
removes the concave kinks that linear interpolation introduces near cell
corners while moving no point more than O(h^2).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import ExtractionError
from .geometry import ConvexCurve

# directed segments per marching-squares case, with the above-region kept
# on the left; edges are labelled bottom/right/top/left = 0/1/2/3
_CASE_SEGMENTS = {
    1: [(0, 3)],
    2: [(1, 0)],
    3: [(1, 3)],
    4: [(2, 1)],
    6: [(2, 0)],
    7: [(2, 3)],
    8: [(3, 2)],
    9: [(0, 2)],
    11: [(1, 2)],
    12: [(3, 1)],
    13: [(0, 1)],
    14: [(3, 0)],
}
_SADDLE = {
    5: {True: [(0, 1), (2, 3)], False: [(0, 3), (2, 1)]},
    10: {True: [(3, 0), (1, 2)], False: [(1, 0), (3, 2)]},
}


def _edge_ids(nx, ny):
    # horizontal edge (i, j): between nodes (i, j) and (i+1, j)
    # vertical edge (i, j): between nodes (i, j) and (i, j+1)
    nh = (nx - 1) * ny
    return nh, nh + nx * (ny - 1)


def superlevel_loops(xs, ys, values, t, center_values=None):
    """Closed CCW loops bounding {u > t} from node values (indexed [ix, iy]).

    Returns a list of (m, 2) point arrays.  center_values, if given, is a
    (nx-1, ny-1) array used to split saddle cells; the default is the
    corner average, i.e. the bilinear value at the cell center.
    """
    values = np.asarray(values, dtype=float)
    nx, ny = values.shape
    above = values > t

    nh, total = _edge_ids(nx, ny)
    pts = np.full((total, 2), np.nan)

    cross_h = above[:-1, :] != above[1:, :]
    ih, jh = np.nonzero(cross_h)
    v0 = values[ih, jh]
    v1 = values[ih + 1, jh]
    frac = (t - v0) / (v1 - v0)
    hid = jh * (nx - 1) + ih
    pts[hid, 0] = xs[ih] + frac * (xs[ih + 1] - xs[ih])
    pts[hid, 1] = ys[jh]

    cross_v = above[:, :-1] != above[:, 1:]
    iv, jv = np.nonzero(cross_v)
    w0 = values[iv, jv]
    w1 = values[iv, jv + 1]
    frac = (t - w0) / (w1 - w0)
    vid = nh + jv * nx + iv
    pts[vid, 0] = xs[iv]
    pts[vid, 1] = ys[jv] + frac * (ys[jv + 1] - ys[jv])

    a = above[:-1, :-1]
    b = above[1:, :-1]
    c = above[1:, 1:]
    d = above[:-1, 1:]
    case = (
        a.astype(np.int8)
        + 2 * b.astype(np.int8)
        + 4 * c.astype(np.int8)
        + 8 * d.astype(np.int8)
    )

    def edge_id(which, ci, cj):
        if which == 0:
            return cj * (nx - 1) + ci
        if which == 2:
            return (cj + 1) * (nx - 1) + ci
        if which == 3:
            return nh + cj * nx + ci
        return nh + cj * nx + ci + 1

    succ = np.full(total, -1, dtype=np.int64)
    for code, segments in _CASE_SEGMENTS.items():
        ci, cj = np.nonzero(case == code)
        for src, dst in segments:
            succ[edge_id(src, ci, cj)] = edge_id(dst, ci, cj)
    for code, variants in _SADDLE.items():
        ci, cj = np.nonzero(case == code)
        if ci.size == 0:
            continue
        if center_values is None:
            center = 0.25 * (
                values[ci, cj] + values[ci + 1, cj] + values[ci + 1, cj + 1] + values[ci, cj + 1]
            )
        else:
            center = np.asarray(center_values)[ci, cj]
        for joined in (True, False):
            sel = (center > t) == joined
            for src, dst in variants[joined]:
                succ[edge_id(src, ci[sel], cj[sel])] = edge_id(dst, ci[sel], cj[sel])

    loops = []
    visited = np.zeros(total, dtype=bool)
    for start in np.nonzero(succ >= 0)[0]:
        if visited[start]:
            continue
        chain = [start]
        visited[start] = True
        cur = succ[start]
        while cur != start:
            if cur < 0:
                raise ExtractionError("open contour chain; level set touches the grid edge")
            if visited[cur]:
                raise ExtractionError("contour chain merged into an already traced loop")
            chain.append(cur)
            visited[cur] = True
            cur = succ[cur]
        loops.append(pts[chain])
    return loops


def principal_loop(loops):
    """The loop enclosing the largest area; discards marching specks."""
    if not loops:
        return None
    if len(loops) == 1:
        return loops[0]

    def loop_area(p):
        x, y = p[:, 0], p[:, 1]
        return 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    return max(loops, key=loop_area)


def convexify(points) -> ConvexCurve:
    """Convex hull of loop points as a ConvexCurve."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] < 3:
        raise ExtractionError("level curve has fewer than 3 points")
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise ExtractionError(f"degenerate level curve: {exc}") from exc
    return ConvexCurve(points[hull.vertices])
