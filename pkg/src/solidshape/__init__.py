"""Shape retrieval via interior-density descriptors fused with an inner-distance baseline."""

from .contour import (
    BinaryMask,
    BoundarySamples,
    Polygon,
    convex_hull,
    load_mask,
    mask_from_bits,
    resample_uniform,
    trace_boundary,
    write_mask,
)
from .descriptor import (
    BinGrid,
    SSCDescriptor,
    bin_index,
    describe_shape,
    load_descriptor,
    mean_distance,
    save_descriptor,
    ssc_histogram,
)
from .errors import InputError, PipelineError, SolidShapeError
from .idsc import IDSCDescriptor, InnerGeodesics, describe_idsc, inner_geodesics, visibility_graph
from .matching import FusionParams, MatchResult, chi2, dp_align, fused_cost, ssc_cost
from .retrieval import (
    BullseyeReport,
    CostMatrix,
    DatasetManifest,
    RunConfig,
    build_cost_matrix,
    bullseye,
    first_wrong_position,
    load_manifest,
    load_matrix,
    precision_recall,
    save_manifest,
    save_matrix,
    shape_polygon,
    top_k_correct,
)
from .sampling import (
    AllocationVector,
    DensePointSet,
    SparsePointSet,
    allocate_counts,
    dense_points,
    sample_triangle,
    sparse_points,
)
from .synth import SynthSpec, benchmark_specs, generate, render_bits, write_dataset
from .triangulate import TriangleMesh, triangle_area, triangulate_interior

__version__ = "0.1.0"

__all__ = [
    "AllocationVector",
    "BinGrid",
    "BinaryMask",
    "BoundarySamples",
    "BullseyeReport",
    "CostMatrix",
    "DatasetManifest",
    "DensePointSet",
    "FusionParams",
    "IDSCDescriptor",
    "InnerGeodesics",
    "InputError",
    "MatchResult",
    "PipelineError",
    "Polygon",
    "RunConfig",
    "SSCDescriptor",
    "SolidShapeError",
    "SparsePointSet",
    "SynthSpec",
    "TriangleMesh",
    "allocate_counts",
    "benchmark_specs",
    "bin_index",
    "build_cost_matrix",
    "bullseye",
    "chi2",
    "convex_hull",
    "dense_points",
    "describe_idsc",
    "describe_shape",
    "dp_align",
    "first_wrong_position",
    "fused_cost",
    "generate",
    "inner_geodesics",
    "load_descriptor",
    "load_manifest",
    "load_mask",
    "load_matrix",
    "mask_from_bits",
    "mean_distance",
    "precision_recall",
    "render_bits",
    "resample_uniform",
    "sample_triangle",
    "save_descriptor",
    "save_manifest",
    "save_matrix",
    "shape_polygon",
    "sparse_points",
    "ssc_cost",
    "ssc_histogram",
    "top_k_correct",
    "trace_boundary",
    "triangle_area",
    "triangulate_interior",
    "visibility_graph",
    "write_dataset",
    "write_mask",
]
