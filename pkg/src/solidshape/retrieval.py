"""Dataset-level cost matrices and retrieval metrics.

The benchmark protocol: every shape queries the whole dataset (itself
included), rankings are by ascending cost with ties broken by shape id, and
the headline score is the mean fraction of the 20 same-class shapes appearing
among the first 40 retrievals.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .contour import Polygon, load_mask, trace_boundary
from .descriptor import describe_shape
from .errors import InputError, PipelineError
from .idsc import describe_idsc
from .matching import FusionParams, alignment_cost_pair, chi2_matrix

BULLSEYE_RETAIN = 40
BULLSEYE_DENOM = 20

METHODS = ("idsc", "ssc", "fused")


@dataclass
class DatasetManifest:
    """Shape ids, raster paths, and class labels for one dataset."""

    ids: list[str]
    paths: list[Path]
    labels: list[str]

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise InputError("manifest contains duplicate shape ids")
        if not self.ids:
            raise InputError("manifest is empty")
        if len(self.ids) != len(self.paths) or len(self.ids) != len(self.labels):
            raise InputError("manifest columns have mismatched lengths")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def classes(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for i, lab in enumerate(self.labels):
            out.setdefault(lab, []).append(i)
        return out


def load_manifest(path) -> DatasetManifest:
    """Read a TSV manifest (id, path, class); paths resolve against the file."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such manifest")
    ids, paths, labels = [], [], []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InputError(f"{path}:{lineno}: expected 'id<TAB>path<TAB>class'")
        ids.append(parts[0])
        p = Path(parts[1])
        paths.append(p if p.is_absolute() else path.parent / p)
        labels.append(parts[2])
    return DatasetManifest(ids=ids, paths=paths, labels=labels)


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write the TSV; raster paths under the manifest's directory are stored
    relative to it, so the dataset stays relocatable and CWD-independent."""
    path = Path(path)
    base = path.parent.resolve()
    rows = []
    for i, p, c in zip(manifest.ids, manifest.paths, manifest.labels):
        p = Path(p)
        try:
            rendered = p.resolve().relative_to(base)
        except ValueError:
            rendered = p
        rows.append(f"{i}\t{rendered}\t{c}")
    path.write_text("\n".join(rows) + "\n")


@dataclass
class CostMatrix:
    values: np.ndarray
    method: str
    seed: int = 0
    params_hash: str = ""

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InputError("cost matrix must be square")
        if not np.isfinite(v).all():
            raise InputError("cost matrix contains non-finite entries")
        if (v < 0).any():
            raise InputError("cost matrix contains negative entries")
        self.values = v

    def __len__(self) -> int:
        return len(self.values)


def save_matrix(matrix: CostMatrix, path) -> None:
    header = f"# method={matrix.method} params={matrix.params_hash} seed={matrix.seed}\n"
    rows = "\n".join(",".join(repr(x) for x in row) for row in matrix.values.tolist())
    Path(path).write_text(header + rows + "\n")


def load_matrix(path) -> CostMatrix:
    """Read a cost matrix CSV; the metadata header line is optional."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such matrix file")
    method, seed, params_hash = "external", 0, ""
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("method="):
                    method = token.split("=", 1)[1]
                elif token.startswith("seed="):
                    try:
                        seed = int(token.split("=", 1)[1])
                    except ValueError:
                        pass
                elif token.startswith("params="):
                    params_hash = token.split("=", 1)[1]
            continue
        try:
            rows.append([float(x) for x in line.split(",")])
        except ValueError as exc:
            raise InputError(f"{path}: malformed matrix row ({exc})") from exc
    if not rows:
        raise InputError(f"{path}: empty matrix file")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InputError(f"{path}: ragged matrix rows")
    return CostMatrix(values=np.array(rows), method=method, seed=seed,
                      params_hash=params_hash)


@dataclass(frozen=True)
class RunConfig:
    """Pipeline defaults; mirrors the CLI flags."""

    n_b: int = 100
    n_sp: int = 300
    n_dp: int = 2000
    n_idsc: int = 100
    alpha: float = 4.0
    tau: float = 0.6
    seed: int = 42
    rotate: bool = True
    method: str = "fused"
    n_starts: int = 8
    symmetric: bool = False
    jobs: int = 1

    def fusion(self) -> FusionParams:
        return FusionParams(alpha=self.alpha, tau=self.tau,
                            n_starts=self.n_starts, symmetric=self.symmetric)

    def digest(self) -> str:
        blob = json.dumps(
            {k: getattr(self, k) for k in (
                "n_b", "n_sp", "n_dp", "n_idsc", "alpha", "tau",
                "seed", "rotate", "n_starts", "symmetric")},
            sort_keys=True,
        )
        return hashlib.sha1(blob.encode()).hexdigest()[:12]


def shape_polygon(path) -> Polygon:
    """Raster file to traced outer boundary polygon."""
    return trace_boundary(load_mask(path))


def _describe_entry(args):
    path, kind, config = args
    poly = shape_polygon(path)
    if kind == "ssc":
        return describe_shape(poly, n_b=config.n_b, n_sp=config.n_sp,
                              n_dp=config.n_dp, seed=config.seed,
                              rotate=config.rotate)
    return describe_idsc(poly, n=config.n_idsc)


def describe_dataset(manifest: DatasetManifest, kind: str,
                     config: RunConfig = RunConfig()) -> list:
    """Descriptors for every manifest entry, in manifest order."""
    tasks = [(p, kind, config) for p in manifest.paths]
    descriptors = []
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            iterator = pool.map(_describe_entry, tasks)
            for shape_id in manifest.ids:
                try:
                    descriptors.append(next(iterator))
                except PipelineError as exc:
                    raise PipelineError(f"shape '{shape_id}': {exc}") from exc
    else:
        for shape_id, task in zip(manifest.ids, tasks):
            try:
                descriptors.append(_describe_entry(task))
            except PipelineError as exc:
                raise PipelineError(f"shape '{shape_id}': {exc}") from exc
    return descriptors


_WORKER_STACKS: list | None = None
_WORKER_PARAMS: FusionParams | None = None


def _cost_worker_init(stacks, params):
    global _WORKER_STACKS, _WORKER_PARAMS
    _WORKER_STACKS = stacks
    _WORKER_PARAMS = params


def _cost_worker_row(i: int):
    stacks, params = _WORKER_STACKS, _WORKER_PARAMS
    n = len(stacks)
    fwd = np.empty(n - i)
    bwd = np.empty(n - i)
    for j in range(i, n):
        cost = np.minimum(chi2_matrix(stacks[i], stacks[j]), params.tau)
        fwd[j - i], bwd[j - i] = alignment_cost_pair(cost, params)
    return fwd, bwd


def pairwise_costs(descriptors: list, params: FusionParams, jobs: int = 1,
                   symmetric: bool = False) -> np.ndarray:
    """Full n-by-n matching cost matrix over a descriptor list."""
    n = len(descriptors)
    stacks = [np.ascontiguousarray(d.histograms, dtype=float) for d in descriptors]
    out = np.zeros((n, n))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_cost_worker_init,
                                 initargs=(stacks, params)) as pool:
            for i, (fwd, bwd) in enumerate(pool.map(_cost_worker_row, range(n))):
                out[i, i:] = fwd
                out[i:, i] = bwd
    else:
        _cost_worker_init(stacks, params)
        for i in range(n):
            fwd, bwd = _cost_worker_row(i)
            out[i, i:] = fwd
            out[i:, i] = bwd
    if symmetric:
        out = np.maximum(out, out.T)
    return out


def build_cost_matrix(manifest: DatasetManifest, config: RunConfig = RunConfig(),
                      method: str | None = None,
                      external_idsc: CostMatrix | None = None) -> CostMatrix:
    """Describe every shape and fill the pairwise dissimilarity matrix.

    ``fused`` combines the boundary and interior costs entry-wise; an external
    matrix (for instance a published baseline) can stand in for the boundary
    side.
    """
    method = method or config.method
    if method not in METHODS:
        raise InputError(f"unknown method '{method}'")
    params = config.fusion()
    if external_idsc is not None and len(external_idsc.values) != len(manifest):
        raise InputError("external matrix size does not match the manifest")

    def idsc_values():
        if external_idsc is not None:
            return external_idsc.values
        descs = describe_dataset(manifest, "idsc", config)
        return pairwise_costs(descs, params, config.jobs, config.symmetric)

    if method == "idsc":
        values = idsc_values()
    elif method == "ssc":
        descs = describe_dataset(manifest, "ssc", config)
        values = pairwise_costs(descs, params, config.jobs, config.symmetric)
    else:
        descs = describe_dataset(manifest, "ssc", config)
        ssc_vals = pairwise_costs(descs, params, config.jobs, config.symmetric)
        values = np.minimum(idsc_values(), config.alpha * ssc_vals)
    return CostMatrix(values=values, method=method, seed=config.seed,
                      params_hash=config.digest())


@dataclass
class BullseyeReport:
    overall: float
    per_class: dict[str, float]
    per_query: np.ndarray

    def __post_init__(self):
        self.per_query = np.ascontiguousarray(self.per_query, dtype=float)


def _rankings(matrix: CostMatrix, manifest: DatasetManifest) -> np.ndarray:
    """Per-query orderings: ascending cost, ties by shape id, self included."""
    n = len(manifest)
    if len(matrix) != n:
        raise InputError("matrix size does not match the manifest")
    id_rank = np.argsort(np.argsort(np.array(manifest.ids)))
    out = np.empty((n, n), dtype=np.int64)
    for q in range(n):
        out[q] = np.lexsort((id_rank, matrix.values[q]))
    return out


def bullseye(matrix: CostMatrix, manifest: DatasetManifest,
             retain: int = BULLSEYE_RETAIN, denom: int = BULLSEYE_DENOM,
             include_self: bool = True) -> BullseyeReport:
    """Mean capped fraction of same-class shapes among each query's top ``retain``."""
    n = len(manifest)
    labels = np.array(manifest.labels)
    order = _rankings(matrix, manifest)
    per_query = np.empty(n)
    for q in range(n):
        ranked = order[q]
        if not include_self:
            ranked = ranked[ranked != q]
        top = ranked[:retain]
        hits = int((labels[top] == labels[q]).sum())
        per_query[q] = min(hits, denom) / denom
    classes = manifest.classes
    per_class = {lab: float(per_query[idx].mean()) for lab, idx in classes.items()}
    return BullseyeReport(overall=float(per_query.mean()), per_class=per_class,
                          per_query=per_query)


def precision_recall(matrix: CostMatrix, manifest: DatasetManifest) -> np.ndarray:
    """Averaged (recall, precision) pairs at recall levels k/(c-1), self excluded."""
    labels = np.array(manifest.labels)
    sizes = {len(idx) for idx in manifest.classes.values()}
    if len(sizes) != 1:
        raise InputError("precision-recall assumes uniform class sizes")
    c = sizes.pop()
    if c < 2:
        raise InputError("precision-recall needs at least 2 shapes per class")
    n = len(manifest)
    order = _rankings(matrix, manifest)
    levels = c - 1
    precisions = np.zeros((n, levels))
    for q in range(n):
        ranked = order[q]
        ranked = ranked[ranked != q]
        relevant = labels[ranked] == labels[q]
        ranks = np.nonzero(relevant)[0] + 1  # 1-based rank of k-th relevant
        precisions[q] = np.arange(1, levels + 1) / ranks
    recall = np.arange(1, levels + 1) / levels
    return np.column_stack([recall, precisions.mean(axis=0)])


def first_wrong_position(matrix: CostMatrix, manifest: DatasetManifest) -> float:
    """Mean 1-based rank of the first other-class shape, self included."""
    labels = np.array(manifest.labels)
    order = _rankings(matrix, manifest)
    n = len(manifest)
    positions = np.empty(n)
    for q in range(n):
        wrong = labels[order[q]] != labels[q]
        positions[q] = int(np.argmax(wrong)) + 1 if wrong.any() else n + 1
    return float(positions.mean())


def top_k_correct(matrix: CostMatrix, manifest: DatasetManifest, k: int = 20) -> float:
    """Mean fraction of same-class shapes within each query's top k (self included)."""
    n = len(manifest)
    if k > n:
        raise InputError(f"k={k} exceeds the dataset size {n}")
    if k < 1:
        raise InputError("k must be at least 1")
    labels = np.array(manifest.labels)
    order = _rankings(matrix, manifest)
    fractions = np.empty(n)
    for q in range(n):
        top = order[q][:k]
        fractions[q] = (labels[top] == labels[q]).sum() / k
    return float(fractions.mean())
