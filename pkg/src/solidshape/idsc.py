"""Inner-distance shape context baseline.

Boundary samples are connected by every segment that stays inside the
polygon; all-pairs shortest paths over that graph give the inner distance
(geodesic length) and the inner angle (direction of the first hop, taken
relative to the boundary tangent). Histograms reuse the same log-polar grid
as the interior descriptor. Setting ``inner=False`` swaps in plain Euclidean
distances and angles, which is the classic boundary shape context and serves
as the articulation-sensitivity reference.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contour import BoundarySamples, Polygon, resample_uniform
from .descriptor import BinGrid
from .errors import PipelineError
from .geometry import any_proper_intersection, points_in_polygon

DEFAULT_N_IDSC = 100
CONTAINMENT_TOL = 1e-9


@dataclass
class InnerGeodesics:
    """All-pairs inner distances and the angle of the first shortest-path hop.

    ``first_hop[i, j]`` is the index of the first vertex after i on the chosen
    shortest path to j; ``first_dir[i, j]`` is that hop's direction angle.
    """

    dist: np.ndarray
    first_dir: np.ndarray
    first_hop: np.ndarray

    def __post_init__(self):
        self.dist = np.ascontiguousarray(self.dist, dtype=float)
        self.first_dir = np.ascontiguousarray(self.first_dir, dtype=float)
        self.first_hop = np.ascontiguousarray(self.first_hop, dtype=np.int64)


@dataclass
class IDSCDescriptor:
    histograms: np.ndarray  # (n, n_radial, n_angular)
    mean_inner_distance: float
    grid: BinGrid = field(default_factory=BinGrid)
    params: dict = field(default_factory=dict)
    kind: str = "idsc"

    def __post_init__(self):
        self.histograms = np.ascontiguousarray(self.histograms, dtype=float)

    def __len__(self) -> int:
        return len(self.histograms)


def visibility_graph(samples: BoundarySamples, polygon: Polygon) -> np.ndarray:
    """Adjacency matrix of Euclidean weights, inf where the segment leaves the shape.

    An edge (i, j) exists when the open segment between samples i and j does
    not properly cross any polygon edge and its midpoint lies inside the
    polygon. Consecutive boundary samples are always connected.
    """
    pts = samples.points
    n = len(pts)
    verts = polygon.vertices
    edge_a = verts
    edge_b = np.roll(verts, -1, axis=0)
    ii, jj = np.triu_indices(n, k=1)
    blocked = any_proper_intersection(pts[ii], pts[jj], edge_a, edge_b)
    visible = ~blocked
    open_idx = np.nonzero(visible)[0]
    if len(open_idx):
        mids = 0.5 * (pts[ii[open_idx]] + pts[jj[open_idx]])
        visible[open_idx] = points_in_polygon(mids, verts, tol=CONTAINMENT_TOL)
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    seg = pts[ii] - pts[jj]
    weights = np.hypot(seg[:, 0], seg[:, 1])
    dist[ii[visible], jj[visible]] = weights[visible]
    dist[jj[visible], ii[visible]] = weights[visible]
    # Consecutive samples ride the boundary itself; keep them regardless.
    nxt = np.arange(1, n + 1) % n
    along = pts[nxt] - pts
    w = np.hypot(along[:, 0], along[:, 1])
    dist[np.arange(n), nxt] = w
    dist[nxt, np.arange(n)] = w
    return dist


def inner_geodesics(graph: np.ndarray, points: np.ndarray) -> InnerGeodesics:
    """All-pairs shortest paths with a deterministic first-hop direction.

    Floyd-Warshall with pivots in ascending index order and strict-improvement
    updates, so equal-length alternatives resolve to the path found through
    the smallest pivot (direct edges win all ties).
    """
    n = len(graph)
    dist = np.array(graph, dtype=float)
    first = np.tile(np.arange(n), (n, 1))  # first[i, j] = first hop from i toward j
    first[~np.isfinite(dist)] = -1
    np.fill_diagonal(first, np.arange(n))
    for k in range(n):
        via = dist[:, k, None] + dist[None, k, :]
        # Relative slack keeps collinear chains from flickering: a detour must
        # beat the direct edge by more than accumulated rounding to win.
        better = via < dist * (1.0 - 1e-12)
        np.fill_diagonal(better, False)
        if better.any():
            dist = np.where(better, via, dist)
            first = np.where(better, first[:, k, None], first)
    if not np.isfinite(dist).all():
        raise PipelineError("visibility graph is disconnected")
    pts = np.asarray(points, dtype=float)
    hop_vec = pts[first] - pts[:, None, :]
    first_dir = np.arctan2(hop_vec[..., 1], hop_vec[..., 0])
    return InnerGeodesics(dist=dist, first_dir=first_dir, first_hop=first)


def _tangent_angles(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    prv = np.roll(pts, 1, axis=0)
    d = nxt - prv
    return np.arctan2(d[:, 1], d[:, 0])


def describe_idsc(polygon: Polygon, n: int = DEFAULT_N_IDSC, grid: BinGrid = BinGrid(),
                  inner: bool = True) -> IDSCDescriptor:
    """Boundary shape context with inner (default) or Euclidean geometry."""
    if n < 3:
        raise PipelineError(f"need at least 3 boundary points, got {n}")
    samples = resample_uniform(polygon, n)
    pts = samples.points
    if inner:
        graph = visibility_graph(samples, polygon)
        geod = inner_geodesics(graph, pts)
        dist = geod.dist
        angles = geod.first_dir
    else:
        diff = pts[None, :, :] - pts[:, None, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        angles = np.arctan2(diff[..., 1], diff[..., 0])
    off_diag = ~np.eye(n, dtype=bool)
    mean_d = float(dist[off_diag].mean())
    if mean_d <= 0.0:
        raise PipelineError("degenerate boundary: zero mean inner distance")
    tang = _tangent_angles(pts)
    rel_ang = np.mod(angles - tang[:, None], 2.0 * np.pi)
    rel_dist = dist / mean_d
    edges = grid.radial_edges()
    step = 2.0 * np.pi / grid.n_angular
    hists = np.empty((n, grid.n_radial, grid.n_angular), dtype=float)
    for i in range(n):
        sel = off_diag[i]
        r = np.searchsorted(edges, rel_dist[i, sel], side="left") - 1
        np.clip(r, 0, grid.n_radial - 1, out=r)
        a = (rel_ang[i, sel] / step).astype(np.int64)
        np.clip(a, 0, grid.n_angular - 1, out=a)
        flat = np.bincount(r * grid.n_angular + a, minlength=grid.size)
        hists[i] = flat.reshape(grid.n_radial, grid.n_angular)
    hists /= float(n - 1)
    params = {"n": n, "inner": inner}
    return IDSCDescriptor(histograms=hists, mean_inner_distance=mean_d,
                          grid=grid, params=params)
