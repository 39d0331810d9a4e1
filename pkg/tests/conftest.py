"""Shared fixtures and independent oracles.

The oracles here are deliberately separate implementations from the library:
containment by a scalar crossing walk, areas by a plain shoelace loop,
matching by exhaustive enumeration. Tests compare library output against
these, never against the library itself.
"""
import math

import numpy as np
import pytest

import solidshape as ss


# ---------------------------------------------------------------- oracles ---

def oracle_point_in_polygon(px, py, verts, tol=1e-9):
    """Crossing-parity containment with an explicit boundary-distance rescue."""
    n = len(verts)
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = verts[i]
        xj, yj = verts[j]
        if (yi > py) != (yj > py):
            xint = xi + (py - yi) * (xj - xi) / (yj - yi)
            if px < xint:
                inside = not inside
        j = i
    if inside:
        return True
    # distance to boundary
    best = math.inf
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        dx, dy = bx - ax, by - ay
        denom = dx * dx + dy * dy
        t = 0.0 if denom == 0 else max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / denom))
        qx, qy = ax + t * dx, ay + t * dy
        best = min(best, math.hypot(px - qx, py - qy))
    return best <= tol


def oracle_shoelace(verts):
    total = 0.0
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def oracle_label_components(bits, connectivity=4):
    """BFS component labeling; returns list of component sizes."""
    bits = np.asarray(bits, dtype=bool)
    h, w = bits.shape
    seen = np.zeros_like(bits)
    if connectivity == 4:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        steps = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]
    sizes = []
    for sy in range(h):
        for sx in range(w):
            if not bits[sy, sx] or seen[sy, sx]:
                continue
            stack = [(sy, sx)]
            seen[sy, sx] = True
            size = 0
            while stack:
                y, x = stack.pop()
                size += 1
                for dy, dx in steps:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and bits[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            sizes.append(size)
    return sizes


def oracle_cyclic_match_cost(cost, tau):
    """Exhaustive minimum over all order-preserving cyclic partial matchings.

    cost is the (m, n) raw dissimilarity matrix; matched pairs pay
    min(cost, tau), unmatched rows pay tau. A matching is admissible when the
    row indices (in linear order) map to column indices with at most one
    cyclic descent.
    """
    from itertools import combinations

    m, n = cost.shape
    clamped = np.minimum(cost, tau)
    best = m * tau  # everything unmatched
    cols = list(range(n))
    for k in range(1, min(m, n) + 1):
        for rows in combinations(range(m), k):
            for chosen in combinations(cols, k):
                # try all k cyclic rotations of the column assignment
                for r in range(k):
                    total = (m - k) * tau
                    for t in range(k):
                        total += clamped[rows[t], chosen[(t + r) % k]]
                    if total < best:
                        best = total
    return best


def oracle_segment_inside(p, q, verts, n_probe=200, tol=1e-7):
    """Dense probing: every interior sample of segment p--q must be in the polygon."""
    for t in np.linspace(0.0, 1.0, n_probe + 2)[1:-1]:
        x = p[0] + t * (q[0] - p[0])
        y = p[1] + t * (q[1] - p[1])
        if not oracle_point_in_polygon(x, y, verts, tol=tol):
            return False
    return True


# --------------------------------------------------------------- builders ---

def star_polygon(rng, n_vertices=12, r_min=30.0, r_max=100.0, center=(128.0, 128.0)):
    """Random star-shaped (hence simple) polygon around a center point.

    Angular gaps are bounded and radii smoothed so that spikes stay wider
    than a 100-point boundary resampling; the resampled polygon then remains
    simple, which the triangulation requires.
    """
    gaps = rng.uniform(0.5, 1.5, n_vertices)
    angles = 2.0 * np.pi * np.cumsum(gaps) / gaps.sum()
    radii = rng.uniform(r_min, r_max, n_vertices)
    radii = (radii + np.roll(radii, 1) + np.roll(radii, -1)) / 3.0
    pts = np.column_stack([
        center[0] + radii * np.cos(angles),
        center[1] + radii * np.sin(angles),
    ])
    return ss.Polygon(pts)


def regular_polygon(n, radius=50.0, center=(0.0, 0.0), phase=0.0):
    angles = phase + 2.0 * np.pi * np.arange(n) / n
    return ss.Polygon(np.column_stack([
        center[0] + radius * np.cos(angles),
        center[1] + radius * np.sin(angles),
    ]))


def slit_annulus_polygon(r_out=60.0, r_in=36.0, slit_half_angle=0.02, n_arc=180,
                         center=(0.0, 0.0)):
    """Annulus opened by a thin radial slit, as one simple polygon."""
    cx, cy = center
    outer = np.linspace(slit_half_angle, 2.0 * np.pi - slit_half_angle, n_arc)
    inner = outer[::-1]
    pts = [(cx + r_out * np.cos(a), cy + r_out * np.sin(a)) for a in outer]
    pts += [(cx + r_in * np.cos(a), cy + r_in * np.sin(a)) for a in inner]
    return ss.Polygon(np.array(pts))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
