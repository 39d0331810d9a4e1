"""Silhouette ingestion: raster masks, boundary tracing, resampling, convex hulls.

Masks are binary rasters; the traced boundary follows pixel *corners* (the
crack between foreground and background), so a w-by-h solid block encloses
exactly w*h units of area. All downstream geometry works in continuous
(x, y) coordinates with x along columns and y along rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import InputError, PipelineError
from .geometry import orient_sign, polygon_perimeter, shoelace_area

FOREGROUND_THRESHOLD = 128  # gray values strictly above this are foreground
MIN_COMPONENT_AREA = 9  # smallest usable blob: a 3x3 solid block


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass
class BinaryMask:
    """Largest foreground component of a silhouette raster, holes filled.

    ``bits`` is row-major boolean (height, width). ``hole_count`` records how
    many enclosed background regions were filled during ingestion.
    """

    bits: np.ndarray
    hole_count: int = 0

    def __post_init__(self):
        self.bits = _readonly(np.ascontiguousarray(self.bits, dtype=bool))
        if self.height < 3 or self.width < 3:
            raise PipelineError("mask must be at least 3x3 pixels")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def area(self) -> int:
        return int(self.bits.sum())


@dataclass
class Polygon:
    """Simple closed boundary, counter-clockwise (positive shoelace area)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise PipelineError("polygon needs at least 3 two-dimensional vertices")
        area = shoelace_area(v)
        if area == 0.0:
            raise PipelineError("polygon has zero area")
        if area < 0.0:
            v = v[::-1].copy()
        self.vertices = _readonly(v)

    @property
    def area(self) -> float:
        return shoelace_area(self.vertices)

    @property
    def perimeter(self) -> float:
        return polygon_perimeter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass
class BoundarySamples:
    """Equally spaced points along a polygon boundary.

    ``arc_positions[k]`` is the arc length travelled from the start anchor to
    point k, so consecutive gaps all equal perimeter / n.
    """

    points: np.ndarray
    arc_positions: np.ndarray
    polygon: Polygon = field(repr=False, default=None)

    def __post_init__(self):
        self.points = _readonly(np.ascontiguousarray(self.points, dtype=float))
        self.arc_positions = _readonly(np.ascontiguousarray(self.arc_positions, dtype=float))

    def __len__(self) -> int:
        return len(self.points)


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    # Header tokens: magic, width, height, maxval; '#' starts a comment.
    tokens = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise InputError(f"{path}: truncated PGM header")
        ch = data[pos : pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    magic = tokens[0]
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise InputError(f"{path}: malformed PGM header") from exc
    if maxval <= 0 or maxval > 255:
        raise InputError(f"{path}: unsupported PGM maxval {maxval}")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    elif magic == b"P2":
        values = data[pos:].split()
        if len(values) < width * height:
            raise InputError(f"{path}: truncated PGM data")
        raster = np.array([int(v) for v in values[: width * height]], dtype=np.uint8)
    else:
        raise InputError(f"{path}: not a PGM file (magic {magic!r})")
    if raster.size != width * height:
        raise InputError(f"{path}: truncated PGM data")
    return raster.reshape(height, width)


def _read_gray(path: Path) -> np.ndarray:
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        return _read_pgm(path)
    if suffix == ".png":
        from PIL import Image

        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.uint8)
    raise InputError(f"{path}: unsupported raster format (use .pgm or .png)")


def write_mask(bits: np.ndarray, path) -> None:
    """Write a boolean raster as 0/255 grayscale, format chosen by suffix."""
    path = Path(path)
    gray = np.where(np.asarray(bits, dtype=bool), 255, 0).astype(np.uint8)
    if path.suffix.lower() == ".pgm":
        header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode()
        path.write_bytes(header + gray.tobytes())
    elif path.suffix.lower() == ".png":
        from PIL import Image

        Image.fromarray(gray, mode="L").save(path)
    else:
        raise InputError(f"{path}: unsupported raster format (use .pgm or .png)")


def _has_solid_core(bits: np.ndarray) -> bool:
    # At least one 2x2 all-foreground block.
    return bool((bits[1:, 1:] & bits[:-1, 1:] & bits[1:, :-1] & bits[:-1, :-1]).any())


def load_mask(path) -> BinaryMask:
    """Read a grayscale raster and isolate its largest foreground component.

    Foreground is gray > 128. The largest 8-connected component is kept, its
    enclosed holes are recorded and filled so only the outer boundary remains.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    try:
        gray = _read_gray(path)
    except InputError:
        raise
    except Exception as exc:
        raise InputError(f"{path}: unreadable raster ({exc})") from exc
    return mask_from_bits(gray > FOREGROUND_THRESHOLD)


def mask_from_bits(fg: np.ndarray) -> BinaryMask:
    """Build a BinaryMask from raw foreground bits (same rules as load_mask)."""
    fg = np.asarray(fg, dtype=bool)
    if not fg.any():
        raise PipelineError("empty foreground")
    labels, count = ndimage.label(fg, structure=np.ones((3, 3), dtype=int))
    sizes = ndimage.sum_labels(fg, labels, index=np.arange(1, count + 1))
    component = labels == (int(np.argmax(sizes)) + 1)
    if component.sum() < MIN_COMPONENT_AREA or not _has_solid_core(component):
        raise PipelineError(
            "no usable foreground component "
            f"(area >= {MIN_COMPONENT_AREA} with a 2x2 solid core required)"
        )
    touches = (
        component[0, :].any()
        and component[-1, :].any()
        and component[:, 0].any()
        and component[:, -1].any()
    )
    # A full frame is a legitimate solid square; anything smaller that still
    # reaches every border cannot be separated from the background.
    if touches and component.sum() < component.size:
        raise PipelineError("foreground touches all four image borders")
    filled = ndimage.binary_fill_holes(component)
    holes = filled & ~component
    if holes.any():
        _, hole_count = ndimage.label(holes)
    else:
        hole_count = 0
    return BinaryMask(bits=filled, hole_count=int(hole_count))


# Crack-walk directions in (dx, dy); y grows downward.
_DIRS = {"E": (1, 0), "S": (0, 1), "W": (-1, 0), "N": (0, -1)}
# Walking with foreground kept on the right-hand side: for each heading, the
# pixel that must be foreground and the pixel that must be background,
# as offsets of the pixel whose top-left corner is the current corner.
_RIGHT_FG = {"E": (0, 0), "S": (-1, 0), "W": (-1, -1), "N": (0, -1)}
_LEFT_BG = {"E": (0, -1), "S": (0, 0), "W": (-1, 0), "N": (-1, -1)}
# Saddle resolution prefers the right turn, which keeps the walk on the
# 4-connected region and never pinches the polygon at a corner.
_TURN_ORDER = {
    "E": ("S", "E", "N"),
    "S": ("W", "S", "E"),
    "W": ("N", "W", "S"),
    "N": ("E", "N", "W"),
}


def trace_boundary(mask: BinaryMask) -> Polygon:
    """Trace the outer pixel-corner boundary of the mask's component.

    Returns a counter-clockwise simple polygon with collinear runs merged;
    vertices sit on integer pixel-corner coordinates.
    """
    bits = mask.bits
    h, w = bits.shape
    if not _has_solid_core(bits):
        raise PipelineError("component is thinner than 2 pixels everywhere")

    def fg(x: int, y: int) -> bool:
        return 0 <= x < w and 0 <= y < h and bits[y, x]

    ys, xs = np.nonzero(bits)
    start_i = np.lexsort((xs, ys))[0]
    sx, sy = int(xs[start_i]), int(ys[start_i])
    # Top-left corner of the topmost-leftmost pixel; pixels above and to the
    # upper-left are background, so heading east keeps foreground on the right.
    start = (sx, sy)
    corner = start
    heading = "E"
    path = [corner]
    max_steps = 4 * (w + 1) * (h + 1)
    for _ in range(max_steps):
        dx, dy = _DIRS[heading]
        corner = (corner[0] + dx, corner[1] + dy)
        if corner == start:
            break
        path.append(corner)
        x, y = corner
        for cand in _TURN_ORDER[heading]:
            fx, fy = _RIGHT_FG[cand]
            bx, by = _LEFT_BG[cand]
            if fg(x + fx, y + fy) and not fg(x + bx, y + by):
                heading = cand
                break
        else:
            raise PipelineError("boundary walk stuck; mask is degenerate")
    else:
        raise PipelineError("boundary walk did not close")

    pts = np.array(path, dtype=float)
    # Merge collinear runs, including across the wrap point.
    keep = []
    n = len(pts)
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if orient_sign(a[0], a[1], b[0], b[1], c[0], c[1]) != 0:
            keep.append(i)
    if len(keep) < 3:
        raise PipelineError("traced boundary collapsed to a degenerate polygon")
    return Polygon(vertices=pts[keep])


def resample_uniform(polygon: Polygon, n: int) -> BoundarySamples:
    """Place n points at equal arc-length spacing along the polygon boundary.

    The walk starts at the vertex with the smallest (y, x) pair so repeated
    runs produce identical samples.
    """
    if n < 3:
        raise PipelineError(f"need at least 3 boundary samples, got {n}")
    verts = polygon.vertices
    start = int(np.lexsort((verts[:, 0], verts[:, 1]))[0])
    ring = np.roll(verts, -start, axis=0)
    edges = np.roll(ring, -1, axis=0) - ring
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    perimeter = cum[-1]
    if perimeter <= 0.0:
        raise PipelineError("polygon has zero perimeter")
    targets = np.arange(n) * (perimeter / n)
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(lengths) - 1)
    t = (targets - cum[idx]) / lengths[idx]
    points = ring[idx] + t[:, None] * edges[idx]
    return BoundarySamples(points=points, arc_positions=targets, polygon=polygon)


def convex_hull(points: np.ndarray) -> Polygon:
    """Counter-clockwise convex hull (monotone chain, collinear points dropped)."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) < 3:
        raise PipelineError("need at least 3 distinct points for a hull")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and orient_sign(
                out[-2][0], out[-2][1], out[-1][0], out[-1][1], p[0], p[1]
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise PipelineError("all points are collinear; hull is degenerate")
    return Polygon(vertices=np.array(hull))
