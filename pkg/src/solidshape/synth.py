"""Synthetic silhouette generator for property tests and desk-scale benchmarks.

Shapes render onto a square raster (default 256 px) centered with a healthy
margin, so boundary tracing never touches the image border. Every renderer is
a pure function of its spec, and any randomness (notch placement) comes from a
seeded generator inside the spec.

The ring carves a thin radial slit so the annulus stays simply connected:
ingestion fills enclosed holes, and the slit is what lets the empty middle
survive into the traced polygon.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .contour import BinaryMask, mask_from_bits, write_mask
from .errors import InputError, PipelineError
from .retrieval import DatasetManifest, save_manifest

KINDS = (
    "disc",
    "ring",
    "regular-polygon",
    "indented-polygon",
    "stencil-break",
    "hinge-worm",
    "horseshoe",
)

DEFAULT_SIZE = 256


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    size: int = DEFAULT_SIZE
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown synthetic kind '{self.kind}'")
        if self.size < 32:
            raise InputError("raster size must be at least 32")


def _grid(size: int):
    ys, xs = np.mgrid[0:size, 0:size]
    return xs + 0.5, ys + 0.5, size / 2.0, size / 2.0


def _disc(size, radius, cx=None, cy=None):
    x, y, mx, my = _grid(size)
    cx = mx if cx is None else cx
    cy = my if cy is None else cy
    return (x - cx) ** 2 + (y - cy) ** 2 <= radius**2


def _segment_band(size, a, b, half_width):
    x, y, _, _ = _grid(size)
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0:
        return (x - ax) ** 2 + (y - ay) ** 2 <= half_width**2
    t = np.clip(((x - ax) * dx + (y - ay) * dy) / denom, 0.0, 1.0)
    px = ax + t * dx
    py = ay + t * dy
    return (x - px) ** 2 + (y - py) ** 2 <= half_width**2


def _regular_polygon_bits(size, radius, n_sides, phase):
    x, y, cx, cy = _grid(size)
    angles = phase + 2.0 * np.pi * np.arange(n_sides) / n_sides
    vx = cx + radius * np.cos(angles)
    vy = cy + radius * np.sin(angles)
    inside = np.ones((size, size), dtype=bool)
    for k in range(n_sides):
        ex = vx[(k + 1) % n_sides] - vx[k]
        ey = vy[(k + 1) % n_sides] - vy[k]
        inside &= ex * (y - vy[k]) - ey * (x - vx[k]) >= 0
    return inside, np.column_stack([vx, vy])


def _notch_triangle(size, base_mid, edge_dir, normal, width, depth):
    half = 0.5 * width * edge_dir
    apex = base_mid + depth * normal
    a = base_mid - half
    b = base_mid + half
    x, y, _, _ = _grid(size)
    # Signed tests against the (possibly cw) triangle; orient first.
    area = (b[0] - a[0]) * (apex[1] - a[1]) - (b[1] - a[1]) * (apex[0] - a[0])
    if area < 0:
        a, b = b, a
    inside = np.ones((size, size), dtype=bool)
    for p, q in ((a, b), (b, apex), (apex, a)):
        inside &= (q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0]) >= 0
    return inside


def render_bits(spec: SynthSpec) -> np.ndarray:
    """Raw foreground bits for a spec (before ingestion rules apply)."""
    size = spec.size
    p = spec.params
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [np.uint64(spec.seed % (1 << 64)), np.uint64(0)])))
    x, y, cx, cy = _grid(size)

    if spec.kind == "disc":
        radius = p.get("radius", 0.35 * size)
        return _disc(size, radius)

    if spec.kind == "ring":
        r_out = p.get("r_out", 0.35 * size)
        r_in = p.get("r_in", 0.6 * r_out)
        slit_angle = p.get("slit_angle", 0.0)
        slit_width = p.get("slit_width", 3.0)
        bits = _disc(size, r_out) & ~_disc(size, r_in)
        a = (cx + (r_in - 2.0) * np.cos(slit_angle), cy + (r_in - 2.0) * np.sin(slit_angle))
        b = (cx + (r_out + 2.0) * np.cos(slit_angle), cy + (r_out + 2.0) * np.sin(slit_angle))
        return bits & ~_segment_band(size, a, b, slit_width / 2.0)

    if spec.kind == "regular-polygon":
        radius = p.get("radius", 0.38 * size)
        n_sides = p.get("n_sides", 5)
        phase = p.get("phase", -np.pi / 2)
        bits, _ = _regular_polygon_bits(size, radius, n_sides, phase)
        return bits

    if spec.kind == "indented-polygon":
        radius = p.get("radius", 0.38 * size)
        n_sides = p.get("n_sides", 5)
        phase = p.get("phase", -np.pi / 2)
        notches = p.get("notches", 5)
        depth_frac = p.get("depth", 0.5)
        width_frac = p.get("width", 0.35)
        bits, verts = _regular_polygon_bits(size, radius, n_sides, phase)
        centroid = np.array([cx, cy])
        for k in range(notches):
            edge = k % n_sides
            a = verts[edge]
            b = verts[(edge + 1) % n_sides]
            t = rng.uniform(0.35, 0.65)
            base_mid = a + t * (b - a)
            edge_vec = b - a
            edge_len = float(np.hypot(*edge_vec))
            edge_dir = edge_vec / edge_len
            normal = centroid - base_mid
            normal = normal / np.hypot(*normal)
            width = width_frac * edge_len * rng.uniform(0.8, 1.2)
            depth = depth_frac * radius * rng.uniform(0.8, 1.1)
            bits &= ~_notch_triangle(size, base_mid, edge_dir, normal, width, depth)
        return bits

    if spec.kind == "stencil-break":
        radius = p.get("radius", 0.36 * size)
        cuts = p.get("cuts", 2)
        cut_width = p.get("cut_width", 3.0)
        angle = p.get("angle", np.pi / 2)
        bits = _disc(size, radius)
        u = np.array([np.cos(angle), np.sin(angle)])
        perp = np.array([-u[1], u[0]])
        offsets = np.linspace(-radius / 2.5, radius / 2.5, cuts) if cuts > 1 else [radius / 4.0]
        for off in offsets:
            c = np.array([cx, cy]) + off * perp
            a = c - 1.2 * radius * u
            b = c + 1.2 * radius * u
            bits &= ~_segment_band(size, a, b, cut_width / 2.0)
        return bits

    if spec.kind == "hinge-worm":
        arm = p.get("arm_length", 0.33 * size)
        width = p.get("width", 0.12 * size)
        theta = np.deg2rad(p.get("angle_deg", 180.0))
        orient = p.get("orientation", 0.0)
        joint = np.array([cx, cy])
        a1 = orient + theta / 2.0
        a2 = orient - theta / 2.0
        end1 = joint + arm * np.array([np.cos(a1), np.sin(a1)])
        end2 = joint + arm * np.array([np.cos(a2), np.sin(a2)])
        return _segment_band(size, joint, end1, width / 2.0) | _segment_band(
            size, joint, end2, width / 2.0
        )

    if spec.kind == "horseshoe":
        r_out = p.get("r_out", 0.36 * size)
        r_in = p.get("r_in", 0.55 * r_out)
        opening = np.deg2rad(p.get("opening_deg", 80.0))
        orient = p.get("orientation", 0.0)
        rho2 = (x - cx) ** 2 + (y - cy) ** 2
        band = (rho2 >= r_in**2) & (rho2 <= r_out**2)
        ang = np.arctan2(y - cy, x - cx)
        rel = np.mod(ang - orient + np.pi, 2.0 * np.pi) - np.pi
        return band & (np.abs(rel) >= opening / 2.0)

    raise InputError(f"unknown synthetic kind '{spec.kind}'")  # pragma: no cover


def generate(spec: SynthSpec) -> BinaryMask:
    """Render a spec and apply the ingestion rules (largest component, fills).

    Disconnected foreground is an error for every kind except stencil-break,
    whose thin cuts intentionally split the blob; the largest piece survives.
    """
    bits = render_bits(spec)
    if not bits.any():
        raise PipelineError(f"{spec.kind}: parameters produced an empty mask")
    if bits[0, :].any() or bits[-1, :].any() or bits[:, 0].any() or bits[:, -1].any():
        raise PipelineError(f"{spec.kind}: shape touches the raster border")
    _, count = ndimage.label(bits, structure=np.ones((3, 3), dtype=int))
    if count > 1 and spec.kind != "stencil-break":
        raise PipelineError(
            f"{spec.kind}: parameters produced {count} disconnected pieces"
        )
    return mask_from_bits(bits)


def benchmark_specs(seed: int = 42, per_class: int = 20,
                    size: int = DEFAULT_SIZE) -> list[tuple[str, str, SynthSpec]]:
    """The desk-scale benchmark recipe: 5 classes of parameter-varied shapes."""
    entries = []
    class_kinds = [
        ("disc", "disc"),
        ("ring", "ring"),
        ("pentagon", "regular-polygon"),
        ("indented-pentagon", "indented-polygon"),
        ("horseshoe", "horseshoe"),
    ]
    for ci, (label, kind) in enumerate(class_kinds):
        for v in range(per_class):
            rng = np.random.Generator(np.random.Philox(
                key=np.array([np.uint64(seed % (1 << 64)),
                              np.uint64(ci * 1000 + v)])))
            if kind == "disc":
                params = {"radius": rng.uniform(0.22, 0.33) * size}
            elif kind == "ring":
                r_out = rng.uniform(0.24, 0.34) * size
                params = {
                    "r_out": r_out,
                    "r_in": rng.uniform(0.55, 0.68) * r_out,
                    "slit_angle": rng.uniform(0.0, 2.0 * np.pi),
                }
            elif kind == "regular-polygon":
                params = {
                    "radius": rng.uniform(0.26, 0.38) * size,
                    "n_sides": 5,
                    "phase": rng.uniform(0.0, 2.0 * np.pi),
                }
            elif kind == "indented-polygon":
                params = {
                    "radius": rng.uniform(0.26, 0.38) * size,
                    "n_sides": 5,
                    "phase": rng.uniform(0.0, 2.0 * np.pi),
                    "notches": 5,
                    "depth": rng.uniform(0.42, 0.55),
                    "width": rng.uniform(0.3, 0.4),
                }
            else:
                r_out = rng.uniform(0.26, 0.36) * size
                params = {
                    "r_out": r_out,
                    "r_in": rng.uniform(0.5, 0.6) * r_out,
                    "opening_deg": rng.uniform(55.0, 95.0),
                    "orientation": rng.uniform(0.0, 2.0 * np.pi),
                }
            spec = SynthSpec(kind=kind, size=size,
                             seed=seed * 100003 + ci * 1009 + v, params=params)
            entries.append((f"{label}-{v:02d}", label, spec))
    return entries


def write_dataset(entries, out_dir) -> DatasetManifest:
    """Render specs to PGM files plus a TSV manifest in ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ids, paths, labels = [], [], []
    for shape_id, label, spec in entries:
        bits = render_bits(spec)
        rel = f"{shape_id}.pgm"
        write_mask(bits, out_dir / rel)
        ids.append(shape_id)
        paths.append(out_dir / rel)
        labels.append(label)
    manifest = DatasetManifest(ids=ids, paths=paths, labels=labels)
    save_manifest(manifest, out_dir / "manifest.tsv")
    return manifest
