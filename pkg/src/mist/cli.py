"""Command-line entry points: marker generation, batch segmentation,
corpus evaluation, the HTTP service, and a kernel benchmark."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import engine, metrics, morphology, serialize
from .errors import EmptyForegroundError, MistError
from .raster import (BinaryMask, BoundingBox, load_mask, load_raster,
                     save_mask, save_raster, to_grayscale)

EXIT_USAGE = 2
EXIT_EMPTY_FOREGROUND = 3


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radius", type=int, default=45,
                   help="marker structuring-element radius (default 45)")
    p.add_argument("--iterations", type=int, default=5,
                   help="solver repetitions per run (default 5)")
    p.add_argument("--gamma", type=float, default=50.0,
                   help="smoothness weight (default 50)")
    p.add_argument("--gmm-components", type=int, default=5,
                   help="mixture components per side (default 5)")
    p.add_argument("--min-component", type=int, default=20,
                   help="minimum marker component area in pixels (default 20)")
    p.add_argument("--seed", type=int, default=0, help="rng seed (default 0)")
    p.add_argument("--marker-soft", action="store_true",
                   help="do not hard-pin marker pixels (plain box-init mode)")


def _config_from_args(args) -> engine.EngineConfig:
    return engine.EngineConfig(
        k_iterations=args.iterations, gamma=args.gamma,
        gmm_components=args.gmm_components, marker_radius=args.radius,
        min_component=args.min_component, seed=args.seed,
        marker_soft=args.marker_soft)


def _load_scribbles(path: Path) -> list[engine.Scribble]:
    doc = json.loads(path.read_text())
    strokes = doc["strokes"] if isinstance(doc, dict) else doc
    return [engine.Scribble(side=_norm_side(s["side"]),
                            points=[tuple(p) for p in s["points"]],
                            brush_radius=float(s.get("brush_radius", 0)))
            for s in strokes]


def _norm_side(side: str) -> str:
    side = side.lower()
    if side in ("fg", "foreground"):
        return "fg"
    if side in ("bg", "background"):
        return "bg"
    raise ValueError(f"unknown scribble side {side!r}")


def cmd_marker(args) -> int:
    img = to_grayscale(load_raster(args.input))
    stages = morphology.marker_pipeline(img, args.radius, args.min_component)
    out = Path(args.output)
    save_mask(out, stages.marker)
    if args.debug:
        base = out.with_suffix("")
        save_raster(Path(f"{base}.opened.pgm"), stages.smoothed_open)
        save_raster(Path(f"{base}.smoothed.pgm"), stages.smoothed)
        save_mask(Path(f"{base}.maxima.pgm"), stages.raw_marker)
    return 0


def cmd_segment(args) -> int:
    img = load_raster(args.input)
    x0, y0, x1, y1 = args.bbox
    bbox = BoundingBox(x0, y0, x1, y1)
    cfg = _config_from_args(args)
    session = engine.start_session(img, bbox, cfg)
    session = engine.iterate(session, cfg.k_iterations)
    if args.scribbles:
        # mirrors the interactive sequence exactly: initial segmentation,
        # then the scribble-driven re-run
        session = engine.apply_scribbles(session, _load_scribbles(Path(args.scribbles)))
    save_mask(Path(args.output), engine.extract_mask(session))
    if args.energy_log:
        Path(args.energy_log).write_text(json.dumps({
            "v": serialize.SCHEMA_VERSION,
            "energies": serialize.energy_log_to_list(session.energy_log),
        }, indent=2) + "\n")
    return 0


def _parse_manifest(path: Path):
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise MistError(f"manifest is not valid JSON: {e}") from e
    if isinstance(doc, dict):
        doc = doc.get("entries", doc)
    if not isinstance(doc, list):
        raise MistError("manifest must be a JSON list of {image, gt} objects")
    errors = []
    parsed = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict):
            errors.append(f"entry {i}: expected an object, got {type(item).__name__}")
            continue
        missing = [k for k in ("image", "gt") if k not in item]
        if missing:
            errors.append(f"entry {i}: missing key(s) {', '.join(missing)}")
            continue
        parsed.append((i, item))
    if errors:
        raise MistError("manifest schema errors:\n  " + "\n  ".join(errors))
    return parsed


def cmd_eval(args) -> int:
    manifest = Path(args.manifest)
    entries = []
    external: dict[str, dict] = {}
    row_errors = []
    for i, item in _parse_manifest(manifest):
        image_path = manifest.parent / item["image"]
        gt_path = manifest.parent / item["gt"]
        image_id = item.get("id", Path(item["image"]).stem)
        try:
            image = load_raster(image_path)
            truth = load_mask(gt_path)
            entries.append(metrics.EvalEntry(image_id, image, truth))
        except (OSError, MistError) as e:
            row_errors.append(metrics.EvalRow(image_id, "load", None, None, None,
                                              error=f"entry {i}: {e}"))
            continue
        for method, mask_path in item.get("masks", {}).items():
            external.setdefault(method, {})[image_id] = load_mask(
                manifest.parent / mask_path)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if args.mask_dir:
        mask_dir = Path(args.mask_dir)
        ext: dict[str, BinaryMask] = {}
        for entry in entries:
            for suffix in (".pgm", ".png"):
                candidate = mask_dir / f"{entry.image_id}{suffix}"
                if candidate.exists():
                    ext[entry.image_id] = load_mask(candidate)
                    break
        external["external"] = ext
        if "external" not in methods:
            methods.append("external")

    report = metrics.evaluate(entries, methods, _config_from_args(args), external)
    report = metrics.EvalReport(tuple(row_errors) + report.rows)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(report.to_csv())
    (out / "report.md").write_text(report.to_markdown())
    n_err = sum(1 for r in report.rows if r.error)
    print(f"wrote {out/'report.csv'} and {out/'report.md'} "
          f"({len(report.rows)} rows, {n_err} errors)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(ttl_seconds=args.ttl, state_dir=args.state_dir,
                     max_dim=args.max_dim)
    port = args.port if args.port is not None else int(os.environ.get("MIST_PORT", 8601))
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


def cmd_bench(args) -> int:
    from .bench import run_benchmark

    run_benchmark(size=args.size, repeat=args.repeat)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mist", description="two-stage interactive image segmentation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("marker", help="generate the automatic foreground marker")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="marker PGM path")
    p.add_argument("--radius", type=int, default=45)
    p.add_argument("--min-component", type=int, default=20)
    p.add_argument("--debug", action="store_true",
                   help="also write smoothing/maxima intermediates")
    p.set_defaults(func=cmd_marker)

    p = sub.add_parser("segment", help="segment one image in batch mode")
    p.add_argument("input")
    p.add_argument("--bbox", type=int, nargs=4, required=True,
                   metavar=("X0", "Y0", "X1", "Y1"))
    p.add_argument("-o", "--output", required=True, help="mask PGM path")
    p.add_argument("--energy-log", help="write the energy trace JSON here")
    p.add_argument("--scribbles", help="JSON scribble file for a refinement pass")
    _add_engine_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="score methods against ground truth")
    p.add_argument("manifest", help="JSON list of {image, gt, masks?} entries")
    p.add_argument("-o", "--output", required=True, help="report directory")
    p.add_argument("--methods", default="mist,kmeans")
    p.add_argument("--mask-dir", help="directory of precomputed masks by image id")
    _add_engine_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None,
                   help="default: MIST_PORT env var or 8601")
    p.add_argument("--ttl", type=float, default=3600.0,
                   help="idle session lifetime in seconds (default 3600)")
    p.add_argument("--state-dir", help="persist sessions here across restarts")
    p.add_argument("--max-dim", type=int, default=4096,
                   help="reject images larger than this in either dimension")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("bench", help="compare compiled and pure-python kernels")
    p.add_argument("--size", type=int, default=192, help="grid side length")
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyForegroundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EMPTY_FOREGROUND
    except (MistError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
