"""Command line interface.

Subcommands mirror the pipeline stages (ingest, rasterize, persist, pimage,
cluster, stats), plus `ari` for cross-clustering comparison, `render` for SVG
output of a single artifact, and `run` for the whole pipeline with a manifest.
Every config field can come from a JSON config file (--config) and be
overridden by the flag of the same name; SEGSHAPE_OUTPUT_DIR overrides the
output directory. Exit codes: 0 success, 1 validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import pipeline
from .errors import SegshapeError, ValidationError
from .homology import read_diagram_csv, to_barcode
from .levelset import ASCENDING
from .pimage import read_pi_json
from .pipeline import Emitter, PipelineConfig
from .render import svg_barcode, svg_diagram, svg_pimage

_CONFIG_FLAGS = {
    "input_dir": dict(type=str, help="directory of city bundle *.json files"),
    "output_dir": dict(type=str, help="directory for emitted artifacts"),
    "complex_kind": dict(type=str, choices=pipeline.COMPLEX_KINDS,
                         help="filtration kind (default levelset)"),
    "group": dict(type=str, choices=("WBAH", "WB", "B"),
                  help="racial group selection for feature vectors"),
    "k": dict(type=int, help="number of clusters (default 4)"),
    "k_max": dict(type=int, help="largest K for the elbow curve (default 8)"),
    "long_side": dict(type=int, help="raster pixels along the longest bbox side (default 500)"),
    "velocity": dict(type=float, help="front speed v (default 1)"),
    "dt": dict(type=float, help="front time step (default 0.5)"),
    "t_max": dict(type=float, help="front final time (default 20)"),
    "stride": dict(type=int, help="triangulation pixel stride (default 5)"),
    "threshold": dict(type=float, help="majority threshold percentage (default 50)"),
    "sigma": dict(type=float, help="PI Gaussian spread (default 1 levelset / 5 cubical)"),
    "resolution": dict(type=int, help="PI grid resolution (default 20 levelset / 100 cubical)"),
}


def _add_config_flags(parser):
    parser.add_argument("--config", type=str, default=None,
                        help="JSON config file; flags override its fields")
    for name, kw in _CONFIG_FLAGS.items():
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None, **kw)


def _build_config(args) -> PipelineConfig:
    overrides = {name: getattr(args, name) for name in _CONFIG_FLAGS}
    env_out = os.environ.get("SEGSHAPE_OUTPUT_DIR")
    if env_out:
        overrides["output_dir"] = env_out
    if args.config:
        return PipelineConfig.from_json(args.config, **overrides)
    defaults = {k: v for k, v in overrides.items() if v is not None}
    return PipelineConfig(**defaults)


def _require(cfg: PipelineConfig, *names):
    for name in names:
        if not getattr(cfg, name):
            raise ValidationError(f"missing required option --{name.replace('_', '-')}")


def _stage_command(args, stage_fn, needs_input=True) -> int:
    cfg = _build_config(args)
    _require(cfg, *(("input_dir", "output_dir") if needs_input else ("output_dir",)))
    em = Emitter(Path(cfg.output_dir))
    em.root.mkdir(parents=True, exist_ok=True)
    try:
        stage_fn(cfg, em)
    except BaseException:
        em.cleanup()
        raise
    for p in em.written:
        print(p)
    return 0


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    _require(cfg, "input_dir", "output_dir")
    manifest = pipeline.run_pipeline(cfg)
    print(f"{len(manifest['files'])} files -> {Path(cfg.output_dir) / 'manifest.json'}")
    return 0


def _cmd_ari(args) -> int:
    outdir = Path(os.environ.get("SEGSHAPE_OUTPUT_DIR") or args.output_dir or ".")
    labels, matrix = pipeline.compare_clusterings(args.clusterings)
    outdir.mkdir(parents=True, exist_ok=True)
    pipeline.write_ari_csv(outdir / "ari.csv", labels, matrix)
    from . import report
    report.ari_heatmap_figure(matrix, labels, outdir / "ari.svg")
    print(outdir / "ari.csv")
    print(outdir / "ari.svg")
    return 0


def _cmd_render(args) -> int:
    path = Path(args.artifact)
    if not path.exists():
        raise ValidationError(f"{path}: no such file")
    kind = args.kind
    if kind == "auto":
        kind = "pi" if path.suffix == ".json" else "diagram"
    if kind == "pi":
        svg = svg_pimage(read_pi_json(path))
    else:
        diagrams = read_diagram_csv(path, args.order)
        svg = svg_barcode(to_barcode(diagrams)) if kind == "barcode" else svg_diagram(diagrams)
    out = Path(args.out) if args.out else path.with_suffix(".svg")
    out.write_text(svg)
    print(out)
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segshape",
        description="Topological shape analysis of residential segregation data.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_text in (
        ("ingest", pipeline.stage_ingest, "validate bundles and write cities.csv"),
        ("rasterize", pipeline.stage_rasterize, "write majority-mask and percentage rasters"),
        ("persist", pipeline.stage_persist, "compute capped persistence diagrams"),
        ("pimage", pipeline.stage_pimage, "compute persistence images and the feature matrix"),
        ("cluster", pipeline.stage_cluster, "K-medoids clustering, elbow curve, figures"),
        ("stats", pipeline.stage_stats, "segregation statistics, Z-scores, cluster means"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_config_flags(p)
        needs_input = name in ("ingest", "rasterize", "stats")
        p.set_defaults(func=lambda a, f=fn, ni=needs_input: _stage_command(a, f, ni))

    p = sub.add_parser("run", help="run the full pipeline and write a manifest")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("ari", help="pairwise ARI heatmap of clustering CSVs")
    p.add_argument("clusterings", nargs="+", help="clustering CSV files")
    p.add_argument("--output-dir", dest="output_dir", default=None)
    p.set_defaults(func=_cmd_ari)

    p = sub.add_parser("render", help="render a diagram/barcode/PI artifact to SVG")
    p.add_argument("artifact", help="diagram CSV or persistence-image JSON")
    p.add_argument("--kind", choices=("auto", "diagram", "barcode", "pi"), default="auto")
    p.add_argument("--order", choices=("ascending", "descending"), default=ASCENDING,
                   help="filtration orientation of a diagram CSV")
    p.add_argument("--out", default=None, help="output SVG path")
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SegshapeError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
