"""Interior and hull point generation.

Dense points fill the shape interior uniformly: each mesh triangle receives a
share of the budget proportional to its area (largest-remainder rounding keeps
the total exact), and points inside a triangle come from the square-root
barycentric map applied to per-triangle counter-based random streams. Keying
the stream by (seed, triangle index) makes the output independent of iteration
order, thread count, and the shape's position in a dataset.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import Polygon
from .errors import PipelineError
from .triangulate import TriangleMesh


@dataclass
class AllocationVector:
    """Integer per-triangle sample counts; sums exactly to the requested total."""

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.ascontiguousarray(self.counts, dtype=np.int64)


@dataclass
class DensePointSet:
    points: np.ndarray
    seed: int

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class SparsePointSet:
    """Ordered landmarks on the convex hull with unit tangents along it."""

    points: np.ndarray
    tangents: np.ndarray

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        self.tangents = np.ascontiguousarray(self.tangents, dtype=float)

    def __len__(self) -> int:
        return len(self.points)


def allocate_counts(areas, n_dp: int) -> AllocationVector:
    """Split n_dp into integer per-triangle counts proportional to area.

    Largest-remainder rounding: every triangle gets the floor of its real
    quota, leftover units go to the largest fractional remainders, ties to the
    lower index. The counts always sum to exactly n_dp.
    """
    areas = np.asarray(areas, dtype=float)
    if len(areas) == 0 or (areas < 0).any():
        raise PipelineError("areas must be a non-empty list of nonnegative values")
    total = areas.sum()
    if total <= 0.0:
        raise PipelineError("all triangle areas are zero")
    if n_dp < 0:
        raise PipelineError("sample budget must be nonnegative")
    quotas = (areas / total) * float(n_dp)  # divide first: immune to tiny totals
    counts = np.floor(quotas).astype(np.int64)
    leftover = int(n_dp - counts.sum())
    if leftover > 0:
        # Quantized remainders: quotas that agree to within rounding noise
        # rank as true ties and fall through to the index tie-break, so the
        # allocation does not wobble when coordinates are rigidly moved.
        remainders = np.floor((quotas - counts) / 1e-9)
        order = np.lexsort((np.arange(len(areas)), -remainders))
        counts[order[:leftover]] += 1
    return AllocationVector(counts=counts)


def sample_triangle(x, y, z, r1: float, r2: float) -> np.ndarray:
    """Map unit-square randoms (r1, r2) to a point inside triangle (x, y, z)."""
    s = np.sqrt(r1)
    return (1.0 - s) * np.asarray(x, dtype=float) \
        + s * (1.0 - r2) * np.asarray(y, dtype=float) \
        + s * r2 * np.asarray(z, dtype=float)


def _triangle_stream(seed: int, triangle_index: int, count: int) -> np.ndarray:
    key = np.array([np.uint64(seed % (1 << 64)), np.uint64(triangle_index)])
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random((count, 2))


def dense_points(mesh: TriangleMesh, n_dp: int, seed: int = 42) -> DensePointSet:
    """Draw exactly n_dp uniform points inside the mesh.

    Output order is triangle order, then draw order within each triangle.
    Identical (mesh, n_dp, seed) gives bit-identical points.
    """
    if n_dp < 1:
        raise PipelineError("need at least one dense point")
    counts = allocate_counts(mesh.areas, n_dp).counts
    chunks = []
    for i, c in enumerate(counts):
        if c == 0:
            continue
        r = _triangle_stream(seed, i, int(c))
        ia, ib, ic = mesh.triangles[i]
        s = np.sqrt(r[:, 0])[:, None]
        r2 = r[:, 1][:, None]
        pts = (
            (1.0 - s) * mesh.vertices[ia]
            + s * (1.0 - r2) * mesh.vertices[ib]
            + s * r2 * mesh.vertices[ic]
        )
        chunks.append(pts)
    return DensePointSet(points=np.concatenate(chunks, axis=0), seed=seed)


def sparse_points(hull: Polygon, n_sp: int) -> SparsePointSet:
    """Place n_sp landmarks at equal arc spacing on the hull boundary.

    Starts at the hull vertex with the smallest (y, x) pair; the tangent at
    each landmark points toward the next one (wrapping around).
    """
    if n_sp < 3:
        raise PipelineError(f"need at least 3 sparse points, got {n_sp}")
    verts = hull.vertices
    start = int(np.lexsort((verts[:, 0], verts[:, 1]))[0])
    ring = np.roll(verts, -start, axis=0)
    edges = np.roll(ring, -1, axis=0) - ring
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    perimeter = cum[-1]
    targets = np.arange(n_sp) * (perimeter / n_sp)
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(lengths) - 1)
    t = (targets - cum[idx]) / lengths[idx]
    points = ring[idx] + t[:, None] * edges[idx]
    step = np.roll(points, -1, axis=0) - points
    norm = np.hypot(step[:, 0], step[:, 1])
    if (norm == 0).any():
        # Coincident neighbours (tiny hulls): fall back to the edge direction.
        bad = norm == 0
        step[bad] = edges[idx[bad]]
        norm = np.hypot(step[:, 0], step[:, 1])
    tangents = step / norm[:, None]
    return SparsePointSet(points=points, tangents=tangents)
