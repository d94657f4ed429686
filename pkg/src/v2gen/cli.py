"""Command-line front-end: generate tensors, list the continuum, build the
toy dataset, run the benchmark sweep, and inspect/preview .v2 files."""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bench import sweep, write_sweep_csv
from .mesh import MeshError, load_mesh, normalize, serialize_off
from .pipeline import generate_batch, read_v2, write_preview_png, write_v2
from .raycast import build_bvh
from .shapes import SHAPE_CLASSES, make_toy_dataset
from .views import ConfigError, V2Config, enumerate_continuum

MESH_SUFFIXES = (".off", ".obj")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _parse_channels(text: str) -> tuple[str, ...]:
    return tuple(c.strip() for c in text.split(",") if c.strip())


def _mesh_inputs(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in MESH_SUFFIXES)
        if not files:
            raise MeshError(f"no .off/.obj files in {path}")
        return files
    return [path]


def _write_manifest(v2_path: Path, source: Path, config: V2Config, channels) -> None:
    manifest = {
        "source": str(source),
        "config": config.to_string(),
        "channels": list(channels),
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "toolkit_version": __version__,
    }
    v2_path.with_suffix(v2_path.suffix + ".json").write_text(
        json.dumps(manifest, indent=2) + "\n"
    )


def cmd_generate(args) -> int:
    channels = _parse_channels(args.channels)
    base = V2Config.from_string(args.config)
    config = V2Config(m=base.m, n=base.n, x=base.x, y=base.y, nc=len(channels))

    inputs = _mesh_inputs(Path(args.input))
    out = Path(args.out)
    if len(inputs) > 1:
        out.mkdir(parents=True, exist_ok=True)

    items = []
    for path in inputs:
        mesh = normalize(load_mesh(path))
        items.append((mesh, build_bvh(mesh), path.name))
    tensors = generate_batch(items, config, channels, jobs=args.jobs)

    for path, tensor in zip(inputs, tensors):
        target = out / (path.stem + ".v2") if len(inputs) > 1 else out
        with open(target, "wb") as sink:
            write_v2(tensor, sink)
        _write_manifest(target, path, config, tensor.channel_names)
    return 0


def cmd_continuum(args) -> int:
    base = V2Config.from_string(args.base)
    print(f"{'config':<16} {'NV':>8} {'PV':>8} {'C':>10}")
    for cfg in enumerate_continuum(base):
        print(f"{cfg.to_string():<16} {cfg.nv:>8} {cfg.pv:>8} {cfg.c:>10}")
    return 0


def cmd_toyset(args) -> int:
    classes = SHAPE_CLASSES[: args.classes]
    if args.classes < 1 or args.classes > len(SHAPE_CLASSES):
        return _fail(f"--classes must be in [1, {len(SHAPE_CLASSES)}]")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dataset = make_toy_dataset(classes, args.per_class, args.seed)
    counters: dict[str, int] = {}
    for mesh, label in dataset:
        i = counters.get(label, 0)
        counters[label] = i + 1
        (out / f"{label}_{i:03d}.off").write_text(serialize_off(mesh))
    print(f"wrote {len(dataset)} meshes to {out}")
    return 0


def cmd_sweep(args) -> int:
    paths = _mesh_inputs(Path(args.dataset))
    dataset = []
    for path in paths:
        label = path.stem.rsplit("_", 1)[0]
        dataset.append((normalize(load_mesh(path)), label))
    base = V2Config.from_string(args.base)
    channels = _parse_channels(args.channels)
    base = V2Config(m=base.m, n=base.n, x=base.x, y=base.y, nc=len(channels))
    rows = sweep(dataset, base, channels, k=args.k, jobs=args.jobs)
    with open(args.out, "w", newline="") as sink:
        write_sweep_csv(rows, sink)
    for row in rows:
        print(f"{row.config.to_string():<16} accuracy={row.accuracy:.4f}")
    return 0


def cmd_preview(args) -> int:
    with open(args.input, "rb") as source:
        tensor = read_v2(source)
    write_preview_png(tensor, args.out)
    return 0


def cmd_info(args) -> int:
    with open(args.input, "rb") as source:
        tensor = read_v2(source)
    cfg = tensor.config
    print(f"config:    {cfg.to_string()}")
    print(f"NV x PV:   {cfg.nv} x {cfg.pv} (C = {cfg.c})")
    print(f"channels:  {','.join(tensor.channel_names)}")
    print(f"source_id: {tensor.source_id}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="v2gen",
        description="Generate view-grid (.v2) renderings of triangle meshes "
        "and benchmark classification accuracy across the view/resolution continuum.",
    )
    parser.add_argument("--version", action="version", version=f"v2gen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    default_jobs = os.cpu_count() or 1

    p = sub.add_parser("generate", help="render mesh file(s) to .v2 tensors")
    p.add_argument("--input", required=True, help="mesh file or directory of .off/.obj")
    p.add_argument("--config", required=True, help='configuration "MxNxXxY"')
    p.add_argument("--channels", default="depth",
                   help="comma-separated: depth,cos_inc,sin_inc")
    p.add_argument("--out", required=True, help=".v2 output file (or directory in batch mode)")
    p.add_argument("--jobs", type=int, default=default_jobs, help="worker threads")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("continuum", help="list the constant-budget configuration chain")
    p.add_argument("--base", required=True, help='base configuration "MxNxXxY" (square views)')
    p.set_defaults(func=cmd_continuum)

    p = sub.add_parser("toyset", help="write the procedural toy dataset as OFF files")
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, default=len(SHAPE_CLASSES))
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_toyset)

    p = sub.add_parser("sweep", help="accuracy-vs-configuration sweep over a mesh directory")
    p.add_argument("--dataset", required=True, help="directory of <label>_<i>.off meshes")
    p.add_argument("--base", required=True)
    p.add_argument("--channels", default="depth")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--jobs", type=int, default=default_jobs)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preview", help="render the depth montage of a .v2 file to PNG")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("info", help="print .v2 header metadata")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MeshError, ConfigError, ValueError, OSError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
