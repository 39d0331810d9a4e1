"""Constrained Delaunay triangulation of a sampled simple polygon.

The boundary samples are triangulated by ear clipping (which keeps every
consecutive-sample edge as a constraint and never emits a triangle outside
the polygon), then Lawson edge flips restore the Delaunay criterion on all
interior diagonals. A hole-free simple polygon with n vertices always yields
exactly n - 2 triangles whose areas sum to the polygon area.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import math
import numpy as np

from .contour import BoundarySamples
from .errors import PipelineError
from .geometry import orient_sign, polygon_is_simple, shoelace_area

DUPLICATE_TOL = 1e-9


@dataclass
class TriangleMesh:
    """Interior triangulation: sample vertices, index triples, per-triangle areas."""

    vertices: np.ndarray
    triangles: np.ndarray
    areas: np.ndarray

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64)
        self.areas = np.ascontiguousarray(self.areas, dtype=float)

    def __len__(self) -> int:
        return len(self.triangles)

    @property
    def total_area(self) -> float:
        return float(math.fsum(self.areas.tolist()))


def triangle_area(a, b, c) -> float:
    """Nonnegative area |cross(b - a, c - a)| / 2; degenerate triples give 0."""
    return abs(
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    ) / 2.0


def _check_input(pts: np.ndarray) -> None:
    n = len(pts)
    if n < 3:
        raise PipelineError("need at least 3 sample points to triangulate")
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
    np.fill_diagonal(d2, np.inf)
    if d2.min() < DUPLICATE_TOL**2:
        raise PipelineError("duplicate sample points closer than 1e-9")
    if not polygon_is_simple(pts):
        raise PipelineError("sample polygon is self-intersecting")


def _find_ear_exact(pts, nxt, prv, active):
    """Exhaustive exact-arithmetic ear search; fallback for degenerate rounding."""
    for v in active:
        p, n_ = prv[v], nxt[v]
        if orient_sign(*pts[p], *pts[v], *pts[n_]) <= 0:
            continue
        ok = True
        for w in active:
            if w in (p, v, n_):
                continue
            o1 = orient_sign(*pts[p], *pts[v], *pts[w])
            o2 = orient_sign(*pts[v], *pts[n_], *pts[w])
            o3 = orient_sign(*pts[n_], *pts[p], *pts[w])
            if o1 >= 0 and o2 >= 0 and o3 >= 0:
                ok = False
                break
        if ok:
            return v
    return None


# Decision margins relative to local edge lengths and the shape extent.
# Rounding noise sits ten-plus orders of magnitude below these, so the same
# decisions fall out for translated, scaled, or rotated copies of a shape;
# that stability is what makes the descriptor pipeline reproducible under
# rigid motion. Genuinely ambiguous inputs fall back to exact arithmetic.
_CONVEX_REL = 1e-9
_INSIDE_REL = 1e-9


def _ear_clip(pts: np.ndarray) -> list[tuple[int, int, int]]:
    n = len(pts)
    nxt = {i: (i + 1) % n for i in range(n)}
    prv = {i: (i - 1) % n for i in range(n)}
    active = list(range(n))
    extent = float(np.hypot(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    triangles: list[tuple[int, int, int]] = []
    cursor = 0
    while len(active) > 3:
        act = np.array(active)
        ax = pts[act, 0]
        ay = pts[act, 1]
        found = None
        for offset in range(len(active)):
            v = active[(cursor + offset) % len(active)]
            p, n_ = prv[v], nxt[v]
            px, py = pts[p]
            vx, vy = pts[v]
            nx, ny = pts[n_]
            det = (vx - px) * (ny - py) - (vy - py) * (nx - px)
            l_pv = np.hypot(vx - px, vy - py)
            l_vn = np.hypot(nx - vx, ny - vy)
            if det <= _CONVEX_REL * l_pv * l_vn:
                continue  # reflex or too close to straight to call
            o1 = (vx - px) * (ay - py) - (vy - py) * (ax - px)
            o2 = (nx - vx) * (ay - vy) - (ny - vy) * (ax - vx)
            o3 = (px - nx) * (ay - ny) - (py - ny) * (ax - nx)
            l_np = np.hypot(px - nx, py - ny)
            inside = (
                (o1 >= -_INSIDE_REL * l_pv * extent)
                & (o2 >= -_INSIDE_REL * l_vn * extent)
                & (o3 >= -_INSIDE_REL * l_np * extent)
            )
            inside &= (act != p) & (act != v) & (act != n_)
            if not inside.any():
                found = v
                break
        if found is None:
            found = _find_ear_exact(pts, nxt, prv, active)
            if found is None:
                raise PipelineError("no ear found; sample polygon is degenerate")
        p, n_ = prv[found], nxt[found]
        triangles.append((p, found, n_))
        nxt[p] = n_
        prv[n_] = p
        active.remove(found)
        cursor = active.index(p)
    a, b, c = active[0], nxt[active[0]], nxt[nxt[active[0]]]
    triangles.append((a, b, c))
    return triangles


def _clearly_ccw(a, b, c) -> bool:
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    scale = np.hypot(b[0] - a[0], b[1] - a[1]) * np.hypot(c[0] - a[0], c[1] - a[1])
    return det > _CONVEX_REL * scale


def _clearly_in_circle(a, b, c, d) -> bool:
    """True when d lies inside the circumcircle of ccw (a, b, c) by a clear margin.

    Near-cocircular quadruples (regular grids, circle samples) stay unflipped,
    which keeps the flip sequence stable under rigid motion of the input.
    """
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdx * cdy - cdx * bdy)
        + blift * (cdx * ady - adx * cdy)
        + clift * (adx * bdy - bdx * ady)
    )
    permanent = (
        alift * (abs(bdx * cdy) + abs(cdx * bdy))
        + blift * (abs(cdx * ady) + abs(adx * cdy))
        + clift * (abs(adx * bdy) + abs(bdx * ady))
    )
    return det > 1e-9 * permanent


def _lawson_flips(pts: np.ndarray, triangles: list[tuple[int, int, int]],
                  constrained: set[frozenset]) -> list[tuple[int, int, int]]:
    tris = [list(t) for t in triangles]
    edge_map: dict[frozenset, list[int]] = {}

    def register(ti):
        a, b, c = tris[ti]
        for e in (frozenset((a, b)), frozenset((b, c)), frozenset((c, a))):
            edge_map.setdefault(e, []).append(ti)

    for ti in range(len(tris)):
        register(ti)

    queue = deque(sorted((e for e in edge_map if e not in constrained and len(edge_map[e]) == 2),
                         key=sorted))
    queued = set(queue)
    max_pops = 16 * len(pts) * len(pts)
    pops = 0
    while queue and pops < max_pops:
        pops += 1
        e = queue.popleft()
        queued.discard(e)
        if e in constrained:
            continue
        owners = [ti for ti in edge_map.get(e, []) if e <= set(tris[ti])]
        if len(owners) != 2:
            continue
        t1, t2 = owners
        a, b = sorted(e)
        c = next(v for v in tris[t1] if v not in e)
        d = next(v for v in tris[t2] if v not in e)
        # Orient (a, b, c) ccw for the in-circle test.
        if orient_sign(*pts[a], *pts[b], *pts[c]) < 0:
            a, b = b, a
        if not _clearly_in_circle(pts[a], pts[b], pts[c], pts[d]):
            continue
        # Flip only when both replacement triangles are clearly ccw.
        if not _clearly_ccw(pts[a], pts[d], pts[c]):
            continue
        if not _clearly_ccw(pts[d], pts[b], pts[c]):
            continue
        for ti in owners:
            for edge in (frozenset((tris[ti][0], tris[ti][1])),
                         frozenset((tris[ti][1], tris[ti][2])),
                         frozenset((tris[ti][2], tris[ti][0]))):
                lst = edge_map.get(edge, [])
                if ti in lst:
                    lst.remove(ti)
        tris[t1] = [a, d, c]
        tris[t2] = [d, b, c]
        register(t1)
        register(t2)
        for edge in (frozenset((a, d)), frozenset((d, b)),
                     frozenset((b, c)), frozenset((c, a))):
            if edge not in constrained and edge not in queued and len(edge_map.get(edge, [])) == 2:
                queue.append(edge)
                queued.add(edge)
    return [tuple(t) for t in tris]


def triangulate_interior(samples: BoundarySamples) -> TriangleMesh:
    """Triangulate the region bounded by the sample polygon.

    Every edge between consecutive samples is kept as a constraint; interior
    diagonals satisfy the Delaunay criterion after flipping. The output holds
    exactly len(samples) - 2 triangles, all inside the polygon.
    """
    pts = np.asarray(samples.points, dtype=float)
    if shoelace_area(pts) < 0:
        raise PipelineError("sample polygon must be counter-clockwise")
    _check_input(pts)
    n = len(pts)
    triangles = _ear_clip(pts)
    constrained = {frozenset((i, (i + 1) % n)) for i in range(n)}
    triangles = _lawson_flips(pts, triangles, constrained)
    tri_arr = np.array(triangles, dtype=np.int64)
    a = pts[tri_arr[:, 0]]
    b = pts[tri_arr[:, 1]]
    c = pts[tri_arr[:, 2]]
    areas = np.abs(
        (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
        - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    ) / 2.0
    return TriangleMesh(vertices=pts, triangles=tri_arr, areas=areas)


def mesh_edges(mesh: TriangleMesh) -> set[frozenset]:
    """All undirected edges present in the mesh."""
    edges = set()
    for a, b, c in mesh.triangles:
        edges.add(frozenset((int(a), int(b))))
        edges.add(frozenset((int(b), int(c))))
        edges.add(frozenset((int(c), int(a))))
    return edges
