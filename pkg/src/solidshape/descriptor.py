"""Log-polar interior-density histograms at convex-hull landmarks.

Each landmark gets an 8x12 histogram of the interior points, binned by
log-spaced relative distance (distance over the mean landmark-to-interior
distance) and by angle relative to the hull tangent. The histogram set is the
shape's descriptor: translation-invariant by construction, scale-invariant
through the mean-distance normalization, rotation-invariant through the
tangent-relative angles.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .contour import Polygon, convex_hull, resample_uniform
from .errors import InputError, PipelineError
from .sampling import DensePointSet, SparsePointSet, dense_points, sparse_points
from .triangulate import triangulate_interior

DESCRIPTOR_SCHEMA_VERSION = 1

DEFAULT_N_B = 100
DEFAULT_N_SP = 300
DEFAULT_N_DP = 2000
DEFAULT_SEED = 42


@dataclass(frozen=True)
class BinGrid:
    """Log-polar bin layout; radial range is relative to the mean distance."""

    n_radial: int = 8
    n_angular: int = 12
    inner_radius_factor: float = 0.125
    outer_radius_factor: float = 2.0

    def radial_edges(self) -> np.ndarray:
        return np.geomspace(self.inner_radius_factor, self.outer_radius_factor,
                            self.n_radial + 1)

    @property
    def size(self) -> int:
        return self.n_radial * self.n_angular


@dataclass
class SSCDescriptor:
    """Ordered landmark histograms plus the normalization scale that built them."""

    histograms: np.ndarray  # (n_sp, n_radial, n_angular), each sums to 1
    mean_distance: float
    grid: BinGrid = field(default_factory=BinGrid)
    params: dict = field(default_factory=dict)
    kind: str = "ssc"

    def __post_init__(self):
        self.histograms = np.ascontiguousarray(self.histograms, dtype=float)

    def __len__(self) -> int:
        return len(self.histograms)


def mean_distance(sparse: SparsePointSet, dense: DensePointSet) -> float:
    """Mean Euclidean distance over all landmark/interior point pairs."""
    if len(sparse) == 0 or len(dense) == 0:
        raise PipelineError("mean distance needs non-empty point sets")
    diff = sparse.points[:, None, :] - dense.points[None, :, :]
    return float(np.hypot(diff[..., 0], diff[..., 1]).mean())


def bin_index(rel_log_distance: float, rel_angle: float, grid: BinGrid) -> tuple[int, int]:
    """(radial, angular) bin for a relative distance and a [0, 2pi) angle.

    Distances at or below the innermost edge clamp to radial bin 0; at or
    above the outermost edge clamp to the last radial bin. A distance exactly
    on an interior edge falls in the lower bin.
    """
    edges = grid.radial_edges()
    r = int(np.searchsorted(edges, rel_log_distance, side="left")) - 1
    r = min(max(r, 0), grid.n_radial - 1)
    a = int(rel_angle / (2.0 * np.pi / grid.n_angular))
    a = min(max(a, 0), grid.n_angular - 1)
    return r, a


def _histogram_counts(center: np.ndarray, tangent_angle: float, dense_pts: np.ndarray,
                      mean_d: float, grid: BinGrid, rotate: bool) -> np.ndarray:
    dx = dense_pts[:, 0] - center[0]
    dy = dense_pts[:, 1] - center[1]
    dist = np.hypot(dx, dy) / mean_d
    ang = np.arctan2(dy, dx)
    if rotate:
        ang = ang - tangent_angle
    ang = np.mod(ang, 2.0 * np.pi)
    edges = grid.radial_edges()
    r = np.searchsorted(edges, dist, side="left") - 1
    np.clip(r, 0, grid.n_radial - 1, out=r)
    a = (ang / (2.0 * np.pi / grid.n_angular)).astype(np.int64)
    np.clip(a, 0, grid.n_angular - 1, out=a)
    flat = np.bincount(r * grid.n_angular + a, minlength=grid.size)
    return flat.reshape(grid.n_radial, grid.n_angular)


def ssc_histogram(center: np.ndarray, tangent: np.ndarray, dense: DensePointSet,
                  mean_d: float, grid: BinGrid = BinGrid(), rotate: bool = True) -> np.ndarray:
    """One normalized log-polar histogram of the interior points seen from a landmark."""
    if mean_d <= 0.0:
        raise PipelineError("mean distance must be positive")
    tangent_angle = float(np.arctan2(tangent[1], tangent[0]))
    counts = _histogram_counts(np.asarray(center, dtype=float), tangent_angle,
                               dense.points, mean_d, grid, rotate)
    return counts / float(len(dense))


def describe_shape(polygon: Polygon, n_b: int = DEFAULT_N_B, n_sp: int = DEFAULT_N_SP,
                   n_dp: int = DEFAULT_N_DP, seed: int = DEFAULT_SEED,
                   grid: BinGrid = BinGrid(), rotate: bool = True) -> SSCDescriptor:
    """Full pipeline: resample boundary, triangulate, fill interior, describe.

    The convex hull comes from the polygon vertices, so boundary indentations
    that leave the hull unchanged leave the landmarks unchanged too.
    """
    samples = resample_uniform(polygon, n_b)
    mesh = triangulate_interior(samples)
    dense = dense_points(mesh, n_dp, seed)
    hull = convex_hull(polygon.vertices)
    sparse = sparse_points(hull, n_sp)
    mean_d = mean_distance(sparse, dense)
    if mean_d <= 0.0:
        raise PipelineError("degenerate shape: zero mean distance")
    hists = np.empty((n_sp, grid.n_radial, grid.n_angular), dtype=float)
    tangent_angles = np.arctan2(sparse.tangents[:, 1], sparse.tangents[:, 0])
    for i in range(n_sp):
        hists[i] = _histogram_counts(sparse.points[i], tangent_angles[i],
                                     dense.points, mean_d, grid, rotate)
    hists /= float(n_dp)
    params = {"n_b": n_b, "n_sp": n_sp, "n_dp": n_dp, "seed": seed, "rotate": rotate}
    return SSCDescriptor(histograms=hists, mean_distance=mean_d, grid=grid, params=params)


def save_descriptor(desc, path, shape_id: str) -> None:
    """Persist a descriptor as versioned JSON; values round-trip bit-exactly."""
    grid = desc.grid
    scale = getattr(desc, "mean_distance", None)
    if scale is None:
        scale = desc.mean_inner_distance
    doc = {
        "schema_version": DESCRIPTOR_SCHEMA_VERSION,
        "id": shape_id,
        "kind": desc.kind,
        "params": desc.params,
        "grid": {
            "n_radial": grid.n_radial,
            "n_angular": grid.n_angular,
            "inner_radius_factor": grid.inner_radius_factor,
            "outer_radius_factor": grid.outer_radius_factor,
        },
        "mean_distance": scale,
        "histograms": [h.reshape(-1).tolist() for h in desc.histograms],
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_descriptor(path):
    """Load a descriptor JSON written by save_descriptor."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: unreadable descriptor ({exc})") from exc
    if doc.get("schema_version") != DESCRIPTOR_SCHEMA_VERSION:
        raise InputError(f"{path}: unsupported descriptor schema")
    grid = BinGrid(**doc["grid"])
    hists = np.array(doc["histograms"], dtype=float).reshape(
        -1, grid.n_radial, grid.n_angular
    )
    kind = doc.get("kind", "ssc")
    if kind == "idsc":
        from .idsc import IDSCDescriptor

        return doc["id"], IDSCDescriptor(
            histograms=hists,
            mean_inner_distance=doc["mean_distance"],
            grid=grid,
            params=doc.get("params", {}),
        )
    return doc["id"], SSCDescriptor(
        histograms=hists,
        mean_distance=doc["mean_distance"],
        grid=grid,
        params=doc.get("params", {}),
        kind=kind,
    )
