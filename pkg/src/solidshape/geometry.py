"""Planar geometry primitives shared by the shape pipeline.

Orientation and in-circle tests use a floating-point filter with an exact
rational fallback, so topological decisions (ear validity, edge flips) never
depend on rounding noise.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

# Relative error bound for the 2-term cross-product determinant; values whose
# magnitude falls below errbound get re-evaluated exactly.
_ORIENT_EPS = 3.3306690738754716e-16


def orient_sign(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the signed area of triangle (a, b, c): +1 ccw, -1 cw, 0 collinear."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    bound = _ORIENT_EPS * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    d = (Fraction(ax) - Fraction(cx)) * (Fraction(by) - Fraction(cy)) - (
        Fraction(ay) - Fraction(cy)
    ) * (Fraction(bx) - Fraction(cx))
    return (d > 0) - (d < 0)


def shoelace_area(vertices: np.ndarray) -> float:
    """Signed area of a closed polygon given as an (n, 2) vertex array."""
    x = vertices[:, 0]
    y = vertices[:, 1]
    terms = x * np.roll(y, -1) - np.roll(x, -1) * y
    return 0.5 * math.fsum(terms.tolist())


def polygon_perimeter(vertices: np.ndarray) -> float:
    d = np.roll(vertices, -1, axis=0) - vertices
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def segment_point_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point (m, 2) to each segment a[k]--b[k] (n, 2); (m, n)."""
    ab = b - a  # (n, 2)
    ap = points[:, None, :] - a[None, :, :]  # (m, n, 2)
    denom = np.einsum("nk,nk->n", ab, ab)
    denom = np.where(denom == 0.0, 1.0, denom)
    t = np.einsum("mnk,nk->mn", ap, ab) / denom
    t = np.clip(t, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    diff = points[:, None, :] - proj
    return np.hypot(diff[..., 0], diff[..., 1])


def points_in_polygon(points: np.ndarray, vertices: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Boolean mask: point inside the closed polygon, or within ``tol`` of its boundary.

    Even-odd crossing rule on the horizontal ray, with a proximity pass so
    boundary points do not flicker with rounding.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    vx = vertices[:, 0]
    vy = vertices[:, 1]
    nx = np.roll(vx, -1)
    ny = np.roll(vy, -1)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    crosses = (vy[None, :] > py) != (ny[None, :] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = vx[None, :] + (py - vy[None, :]) * (nx - vx)[None, :] / (ny - vy)[None, :]
    hits = crosses & (px < xint)
    inside = (hits.sum(axis=1) % 2).astype(bool)
    if tol > 0.0 and not inside.all():
        # Proximity rescue only for points the parity test rejected; points
        # exactly on the boundary land here and count as inside.
        need = np.nonzero(~inside)[0]
        near = segment_point_distances(pts[need], vertices, np.roll(vertices, -1, axis=0))
        inside[need] |= near.min(axis=1) <= tol
    return inside


def point_in_polygon(point, vertices: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(points_in_polygon(np.asarray(point, dtype=float)[None, :], vertices, tol)[0])


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def segments_properly_intersect(p: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray,
                                eps: float = 1e-12) -> np.ndarray:
    """Vectorized proper-intersection test of segment p--q against segments a[k]--b[k].

    Proper means the open interiors cross transversally; touching at an
    endpoint or running collinear does not count.
    """
    scale = max(1.0, float(np.abs(np.concatenate([[p, q], a, b])).max()))
    guard = eps * scale * scale
    d1 = _cross(p[0], p[1], q[0], q[1], a[:, 0], a[:, 1])
    d2 = _cross(p[0], p[1], q[0], q[1], b[:, 0], b[:, 1])
    d3 = _cross(a[:, 0], a[:, 1], b[:, 0], b[:, 1], p[0], p[1])
    d4 = _cross(a[:, 0], a[:, 1], b[:, 0], b[:, 1], q[0], q[1])
    opp12 = ((d1 > guard) & (d2 < -guard)) | ((d1 < -guard) & (d2 > guard))
    opp34 = ((d3 > guard) & (d4 < -guard)) | ((d3 < -guard) & (d4 > guard))
    return opp12 & opp34


def any_proper_intersection(p: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray,
                            eps: float = 1e-12, chunk: int = 2048) -> np.ndarray:
    """For each segment p[k]--q[k], whether it properly crosses any segment a--b."""
    scale = max(1.0, float(np.abs(p).max()), float(np.abs(a).max()))
    guard = eps * scale * scale
    abx = (b - a)[None, :, 0]
    aby = (b - a)[None, :, 1]
    out = np.zeros(len(p), dtype=bool)
    for s in range(0, len(p), chunk):
        P = p[s : s + chunk]
        Q = q[s : s + chunk]
        pqx = (Q - P)[:, 0][:, None]
        pqy = (Q - P)[:, 1][:, None]
        axp = a[None, :, 0] - P[:, 0][:, None]
        ayp = a[None, :, 1] - P[:, 1][:, None]
        bxp = b[None, :, 0] - P[:, 0][:, None]
        byp = b[None, :, 1] - P[:, 1][:, None]
        d1 = pqx * ayp - pqy * axp
        d2 = pqx * byp - pqy * bxp
        pax = P[:, 0][:, None] - a[None, :, 0]
        pay = P[:, 1][:, None] - a[None, :, 1]
        qax = Q[:, 0][:, None] - a[None, :, 0]
        qay = Q[:, 1][:, None] - a[None, :, 1]
        d3 = abx * pay - aby * pax
        d4 = abx * qay - aby * qax
        opp12 = ((d1 > guard) & (d2 < -guard)) | ((d1 < -guard) & (d2 > guard))
        opp34 = ((d3 > guard) & (d4 < -guard)) | ((d3 < -guard) & (d4 > guard))
        out[s : s + chunk] = (opp12 & opp34).any(axis=1)
    return out


def polygon_is_simple(vertices: np.ndarray) -> bool:
    """True when no two non-adjacent edges properly cross."""
    n = len(vertices)
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    for i in range(n):
        others = [j for j in range(i + 1, n) if j != (i + 1) % n and i != (j + 1) % n]
        if not others:
            continue
        idx = np.array(others)
        if segments_properly_intersect(a[i], b[i], a[idx], b[idx]).any():
            return False
    return True
