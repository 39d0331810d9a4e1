"""Command-line harness: describe shapes, build cost matrices, evaluate, synthesize.

Configuration precedence is flags > config file > defaults; the config file is
flat ``key = value`` text. Exit codes: 0 success, 1 input error, 2 pipeline
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .contour import write_mask
from .descriptor import describe_shape, save_descriptor
from .errors import InputError, PipelineError, SolidShapeError
from .idsc import describe_idsc
from .retrieval import (
    RunConfig,
    bullseye,
    build_cost_matrix,
    first_wrong_position,
    load_manifest,
    load_matrix,
    precision_recall,
    shape_polygon,
    top_k_correct,
)
from .synth import SynthSpec, benchmark_specs, render_bits, write_dataset

_CONFIG_KEYS = {
    "nb": ("n_b", int),
    "nsp": ("n_sp", int),
    "ndp": ("n_dp", int),
    "nidsc": ("n_idsc", int),
    "alpha": ("alpha", float),
    "tau": ("tau", float),
    "seed": ("seed", int),
    "rotate": ("rotate", lambda s: s.lower() not in ("0", "false", "no", "off")),
    "method": ("method", str),
    "jobs": ("jobs", int),
}


def _read_config_file(path: Path) -> dict:
    if not path.is_file():
        raise InputError(f"{path}: no such config file")
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = line.partition("=")
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise InputError(f"{path}:{lineno}: unknown config key '{key}'")
        field, cast = _CONFIG_KEYS[key]
        try:
            values[field] = cast(raw.strip())
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad value for '{key}'") from exc
    return values


def _merge_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(_read_config_file(Path(args.config)))
    flag_map = {
        "nb": "n_b", "nsp": "n_sp", "ndp": "n_dp", "nidsc": "n_idsc",
        "alpha": "alpha", "tau": "tau", "seed": "seed", "method": "method",
        "jobs": "jobs",
    }
    for flag, field in flag_map.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[field] = v
    if getattr(args, "no_rotate", False):
        values["rotate"] = False
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise InputError(f"bad configuration: {exc}") from exc


def _add_common(parser):
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--nb", type=int, help="boundary samples for triangulation")
    parser.add_argument("--nsp", type=int, help="hull landmarks per descriptor")
    parser.add_argument("--ndp", type=int, help="interior sample budget")
    parser.add_argument("--nidsc", type=int, help="boundary points for the inner-distance baseline")
    parser.add_argument("--alpha", type=float, help="fusion scale on the interior cost")
    parser.add_argument("--tau", type=float, help="match rejection threshold")
    parser.add_argument("--seed", type=int, help="global sampling seed")
    parser.add_argument("--method", choices=["ssc", "idsc", "fused"], help="cost method")
    parser.add_argument("--no-rotate", action="store_true",
                        help="measure angles against +x instead of hull tangents")
    parser.add_argument("--jobs", type=int, help="worker processes")


def cmd_describe(args) -> int:
    config = _merge_config(args)
    manifest = load_manifest(args.manifest)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = "idsc" if config.method == "idsc" else "ssc"
    failures = []
    for shape_id, path in zip(manifest.ids, manifest.paths):
        try:
            poly = shape_polygon(path)
            if kind == "ssc":
                desc = describe_shape(poly, n_b=config.n_b, n_sp=config.n_sp,
                                      n_dp=config.n_dp, seed=config.seed,
                                      rotate=config.rotate)
            else:
                desc = describe_idsc(poly, n=config.n_idsc)
            save_descriptor(desc, out_dir / f"{shape_id}.{kind}.json", shape_id)
        except SolidShapeError as exc:
            failures.append((shape_id, str(exc)))
    if failures:
        for shape_id, msg in failures:
            print(f"FAILED {shape_id}: {msg}", file=sys.stderr)
        raise PipelineError(f"{len(failures)} shape(s) failed")
    print(f"wrote {len(manifest)} descriptor file(s) to {out_dir}")
    return 0


def _matrix_rows_done(path: Path) -> int:
    if not path.is_file():
        return 0
    rows = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    return len(rows)


def cmd_matrix(args) -> int:
    config = _merge_config(args)
    manifest = load_manifest(args.manifest)
    out_path = Path(args.out)
    external = load_matrix(args.idsc_matrix) if args.idsc_matrix else None
    method = config.method
    if args.resume and out_path.is_file():
        done = _matrix_rows_done(out_path)
        if done >= len(manifest):
            print(f"{out_path}: already complete ({done} rows)")
            return 0
    else:
        done = 0
    # Descriptor work dominates; the matrix assembles in memory and rows are
    # emitted in manifest order so a resumed run is byte-identical.
    matrix = build_cost_matrix(manifest, config, method=method, external_idsc=external)
    header = f"# method={matrix.method} params={matrix.params_hash} seed={matrix.seed}\n"
    if done == 0:
        with open(out_path, "w") as fh:
            fh.write(header)
            for row in matrix.values.tolist():
                fh.write(",".join(repr(x) for x in row) + "\n")
    else:
        with open(out_path, "a") as fh:
            for row in matrix.values.tolist()[done:]:
                fh.write(",".join(repr(x) for x in row) + "\n")
    print(f"wrote {len(matrix)}x{len(matrix)} {matrix.method} matrix to {out_path}")
    return 0


def cmd_evaluate(args) -> int:
    manifest = load_manifest(args.manifest)
    matrix = load_matrix(args.matrix)
    if len(matrix) != len(manifest):
        raise InputError(
            f"matrix is {len(matrix)}x{len(matrix)} but manifest has {len(manifest)} shapes"
        )
    # Protocol constants assume 20-member classes; for smaller datasets the
    # window shrinks with the class size (still twice the cap) so a perfect
    # matrix scores 1.0 at any scale.
    max_class = max(len(members) for members in manifest.classes.values())
    denom = min(20, max_class)
    retain = 2 * denom
    report = bullseye(matrix, manifest, retain=retain, denom=denom)
    metrics = {
        "method": matrix.method,
        "n_shapes": len(manifest),
        "bullseye": report.overall,
        "bullseye_per_class": report.per_class,
        "bullseye_retain": retain,
        "bullseye_denom": denom,
        "top20_correct": top_k_correct(matrix, manifest, k=min(20, len(manifest))),
        "first_wrong_position": first_wrong_position(matrix, manifest),
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
    pr = precision_recall(matrix, manifest)
    pr_lines = ["recall,precision"] + [f"{r!r},{p!r}" for r, p in pr.tolist()]
    (out_dir / "precision_recall.csv").write_text("\n".join(pr_lines) + "\n")
    print(f"bullseye {report.overall:.4f}  top20 {metrics['top20_correct']:.4f}  "
          f"first-wrong {metrics['first_wrong_position']:.4f}")
    print(f"wrote metrics.json and precision_recall.csv to {out_dir}")
    return 0


def cmd_synth(args) -> int:
    config = _merge_config(args)
    out_dir = Path(args.out)
    if args.kind:
        spec = SynthSpec(kind=args.kind, seed=config.seed,
                         params=json.loads(args.params) if args.params else {})
        out_dir.mkdir(parents=True, exist_ok=True)
        bits = render_bits(spec)
        target = out_dir / f"{args.kind}.pgm"
        write_mask(bits, target)
        print(f"wrote {target}")
        return 0
    entries = benchmark_specs(seed=config.seed, per_class=args.per_class)
    manifest = write_dataset(entries, out_dir)
    print(f"wrote {len(manifest)} shapes and manifest.tsv to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solidshape",
        description="Interior-density-aware shape descriptors and retrieval evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="write one descriptor JSON per manifest shape")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("matrix", help="build a pairwise cost matrix CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--idsc-matrix", help="externally computed boundary-cost CSV")
    p.add_argument("--resume", action="store_true", help="skip rows already written")
    _add_common(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("evaluate", help="score a cost matrix against a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate synthetic datasets or single masks")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--kind", choices=["disc", "ring", "regular-polygon", "indented-polygon",
                                      "stencil-break", "hinge-worm", "horseshoe"],
                   help="render a single mask instead of the benchmark set")
    p.add_argument("--params", help="JSON parameter overrides for --kind")
    p.add_argument("--per-class", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolidShapeError as exc:
        print(f"pipeline failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
