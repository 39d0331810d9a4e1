"""Histogram distances, order-preserving alignment, and cost fusion.

Two descriptor sequences are aligned by an edit-style dynamic program over
their cyclic orders: matching histogram i to histogram j costs their chi-square
distance, leaving a query histogram unmatched costs the threshold tau, and
candidate histograms may be skipped freely. Cyclic starts are handled by
rerunning the linear program over evenly spaced rotations of the second
sequence and keeping the best. Whenever every rotation of the second sequence
is covered (n_starts >= len(b)), the result is the exact optimum over all
order-preserving cyclic partial matchings.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PipelineError

_MATCH, _SKIP_A, _SKIP_B = 0, 1, 2


@dataclass(frozen=True)
class FusionParams:
    """Matching knobs: fusion scale alpha, skip threshold tau, restart count."""

    alpha: float = 4.0
    tau: float = 0.6
    n_starts: int = 8
    symmetric: bool = False

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise PipelineError("alpha must be positive")
        if not 0.0 < self.tau <= 2.0:
            raise PipelineError("tau must lie in (0, 2]")
        if self.n_starts < 1:
            raise PipelineError("need at least one alignment start")


@dataclass
class MatchResult:
    """Alignment of descriptor a onto descriptor b.

    ``phi[i]`` is the 1-based index of the histogram of b matched to histogram
    i of a, or 0 when i stayed unmatched. ``per_point_cost[i]`` is the clamped
    chi-square cost (tau for unmatched points); ``total`` is their sum.
    """

    phi: np.ndarray
    per_point_cost: np.ndarray
    total: float
    rotation: int = 0

    def __post_init__(self):
        self.phi = np.ascontiguousarray(self.phi, dtype=np.int64)
        self.per_point_cost = np.ascontiguousarray(self.per_point_cost, dtype=float)


def chi2(h: np.ndarray, g: np.ndarray) -> float:
    """Chi-square statistic between unit-mass histograms: 0.5 * sum (h-g)^2/(h+g).

    Empty bins on both sides contribute nothing; the value lies in [0, 1].
    """
    h = np.asarray(h, dtype=float).reshape(-1)
    g = np.asarray(g, dtype=float).reshape(-1)
    if h.shape != g.shape:
        raise PipelineError("histogram grids do not match")
    s = h + g
    d = h - g
    mask = s > 0
    return float(0.5 * np.sum(d[mask] ** 2 / s[mask]))


def chi2_matrix(ha: np.ndarray, hb: np.ndarray) -> np.ndarray:
    """Pairwise chi-square costs between two histogram stacks, shape (m, n)."""
    a = np.ascontiguousarray(ha, dtype=float).reshape(len(ha), -1)
    b = np.ascontiguousarray(hb, dtype=float).reshape(len(hb), -1)
    if a.shape[1] != b.shape[1]:
        raise PipelineError("histogram grids do not match")
    out = np.empty((len(a), len(b)))
    # Row-wise to keep temporaries cache-sized. The additive 1e-300 only
    # matters where both bins are zero, where it makes 0/0 an exact 0; any
    # populated bin dwarfs it by hundreds of orders of magnitude.
    for i in range(len(a)):
        d = a[i] - b
        s = a[i] + b
        np.multiply(d, d, out=d)
        s += 1e-300
        np.divide(d, s, out=d)
        out[i] = d.sum(axis=1)
    out *= 0.5
    return out


def _rotation_offsets(n: int, n_starts: int) -> list[int]:
    offs = sorted({(t * n) // n_starts for t in range(n_starts)})
    return offs


def _dp_totals(cost_rot: np.ndarray, tau: float) -> np.ndarray:
    """Final DP values for a batch of rotated cost matrices, shape (k, m, n)."""
    k, m, n = cost_rot.shape
    prev = np.zeros((k, n + 1))
    col0 = np.zeros((k, 1))
    for i in range(1, m + 1):
        step = np.minimum(prev[:, :-1] + cost_rot[:, i - 1, :], prev[:, 1:] + tau)
        col0[:, 0] = i * tau
        prev = np.minimum.accumulate(np.concatenate([col0, step], axis=1), axis=1)
    return prev[:, -1]


def _dp_backtrace(cost_rot: np.ndarray, tau: float):
    """Single-rotation DP keeping choices; returns (total, matches as (i, j) list)."""
    m, n = cost_rot.shape
    dp = np.empty((m + 1, n + 1))
    choice = np.empty((m + 1, n + 1), dtype=np.uint8)
    dp[0, :] = 0.0
    choice[0, :] = _SKIP_B
    head = np.empty(1)
    for i in range(1, m + 1):
        match = dp[i - 1, :-1] + cost_rot[i - 1, :]
        skip_a = dp[i - 1, 1:] + tau
        best = np.where(match <= skip_a, match, skip_a)
        ch = np.where(match <= skip_a, _MATCH, _SKIP_A).astype(np.uint8)
        head[0] = i * tau
        row = np.minimum.accumulate(np.concatenate([head, best]))
        # A cell keeps the vertical/diagonal move when it attains the running
        # minimum; otherwise the free horizontal skip carried the value over.
        rch = np.empty(n + 1, dtype=np.uint8)
        rch[0] = _SKIP_A
        rch[1:] = np.where(row[1:] == best, ch, _SKIP_B)
        dp[i] = row
        choice[i] = rch
    matches = []
    i, j = m, n
    while i > 0:
        c = choice[i, j]
        if c == _MATCH:
            matches.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif c == _SKIP_A:
            i -= 1
        else:
            j -= 1
    matches.reverse()
    return float(dp[m, n]), matches


def dp_align(a, b, params: FusionParams = FusionParams()) -> MatchResult:
    """Best order-preserving cyclic alignment of descriptor a onto descriptor b.

    Matched pairs whose raw chi-square exceeds tau are reported as unmatched
    (phi 0, cost tau), so every per-point cost is at most tau.
    """
    ha = getattr(a, "histograms", a)
    hb = getattr(b, "histograms", b)
    grid_a = getattr(a, "grid", None)
    grid_b = getattr(b, "grid", None)
    if grid_a is not None and grid_b is not None and grid_a != grid_b:
        raise PipelineError("descriptors use different bin grids")
    if len(ha) == 0 or len(hb) == 0:
        raise PipelineError("cannot align empty descriptors")
    tau = params.tau
    cost = np.minimum(chi2_matrix(ha, hb), tau)
    n = cost.shape[1]
    offsets = _rotation_offsets(n, params.n_starts)
    stacks = np.stack([np.roll(cost, -r, axis=1) for r in offsets])
    totals = _dp_totals(stacks, tau)
    best = int(np.argmin(totals))
    rot = offsets[best]
    total, matches = _dp_backtrace(stacks[best], tau)
    m = cost.shape[0]
    phi = np.zeros(m, dtype=np.int64)
    per_point = np.full(m, tau)
    for i, j_rot in matches:
        j = (j_rot + rot) % n
        raw = cost[i, j]
        if raw >= tau:
            continue  # counts as unmatched at cost tau
        phi[i] = j + 1
        per_point[i] = raw
    total = float(per_point.sum())
    return MatchResult(phi=phi, per_point_cost=per_point, total=total, rotation=rot)


def alignment_cost(ha: np.ndarray, hb: np.ndarray, params: FusionParams = FusionParams(),
                   cost: np.ndarray | None = None) -> float:
    """Total alignment cost without the backtrace; ``cost`` may be precomputed."""
    if cost is None:
        cost = np.minimum(chi2_matrix(ha, hb), params.tau)
    n = cost.shape[1]
    offsets = _rotation_offsets(n, params.n_starts)
    stacks = np.stack([np.roll(cost, -r, axis=1) for r in offsets])
    return float(_dp_totals(stacks, params.tau).min())


def alignment_cost_pair(cost: np.ndarray, params: FusionParams = FusionParams()) -> tuple[float, float]:
    """Both matching directions from one clamped cost matrix.

    Returns (cost of rows onto columns, cost of columns onto rows); square
    matrices run the two direction batches in a single DP sweep.
    """
    m, n = cost.shape
    if m != n:
        return (
            alignment_cost(None, None, params, cost=cost),
            alignment_cost(None, None, params, cost=cost.T),
        )
    offsets = _rotation_offsets(n, params.n_starts)
    ct = np.ascontiguousarray(cost.T)
    stacks = np.stack(
        [np.roll(cost, -r, axis=1) for r in offsets]
        + [np.roll(ct, -r, axis=1) for r in offsets]
    )
    totals = _dp_totals(stacks, params.tau)
    k = len(offsets)
    return float(totals[:k].min()), float(totals[k:].min())


def ssc_cost(a, b, params: FusionParams = FusionParams()) -> float:
    """Total alignment cost of a onto b (symmetrized max when params say so)."""
    ha = getattr(a, "histograms", a)
    hb = getattr(b, "histograms", b)
    cost = np.minimum(chi2_matrix(ha, hb), params.tau)
    forward = alignment_cost(ha, hb, params, cost=cost)
    if not params.symmetric:
        return forward
    backward = alignment_cost(hb, ha, params, cost=cost.T)
    return max(forward, backward)


def fused_cost(psi_idsc: float, psi_ssc: float,
               params: FusionParams = FusionParams()) -> float:
    """Combine boundary and interior costs: min(psi_idsc, alpha * psi_ssc)."""
    if psi_idsc < 0.0 or psi_ssc < 0.0:
        raise PipelineError("costs must be nonnegative")
    return min(psi_idsc, params.alpha * psi_ssc)
