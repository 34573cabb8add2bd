"""Command-line entry point: ``iedefect {synth,analyze,evaluate,pipeline,render}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 method error (for example a slab without frequency separation).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from ._io import dump_json, sha256_file
from .adaptive import ThresholdConfig
from .detect import read_mask
from .errors import ConfigError, DataError, IEError
from .groundtruth import parse_defect_spec, write_defect_spec
from .mapping import read_grid
from .pipeline import (RenderOptions, analyze, evaluate, load_analysis_outputs, metrics_json,
                       write_analysis, write_evaluation)
from .render import COLORMAPS, heatmap, mask_raster, surface_csv, write_pnm
from .slabdata import GridShape, load_slab, write_slab
from .synth import CellRect, SynthConfig, generate_slab

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_METHOD = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cell_rect(text: str) -> CellRect:
    try:
        r, c, h, w = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROW,COL,ROWS,COLS, got {text!r}") from None
    return CellRect(r, c, h, w)


def _add_threshold_flags(p):
    p.add_argument("--exponent", type=float, default=1.5, help="exponential-rule exponent (default 1.5)")
    p.add_argument("--multiplier", type=float, default=1.5, help="square-root-rule multiplier (default 1.5)")
    p.add_argument("--seed", type=int, default=0, help="clustering seed, recorded in the manifest")


def _add_render_flags(p, alpha=True):
    p.add_argument("--upscale", type=int, default=10, help="pixels per grid cell (default 10)")
    p.add_argument("--colormap", choices=sorted(COLORMAPS), default="warm_to_cool")
    if alpha:
        p.add_argument("--alpha", type=float, default=0.5, help="overlay blend weight of the detection mask")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="iedefect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic slab and its defect spec")
    p.add_argument("--rows", type=int, default=9)
    p.add_argument("--cols", type=int, default=28)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="directory for slab.json and defects.json")
    p.add_argument("--slab-id", default="")
    p.add_argument("--sample-rate", type=float, default=500_000.0, help="Hz")
    p.add_argument("--n-samples", type=int, default=2000)
    p.add_argument("--tau", type=float, default=0.5e-3, help="decay time constant in seconds")
    p.add_argument("--sigma", type=float, default=0.0, help="gaussian noise standard deviation")
    p.add_argument("--defect-band", type=float, nargs=2, default=(6_000.0, 12_000.0), metavar=("LO", "HI"))
    p.add_argument("--intact-band", type=float, nargs=2, default=(58_000.0, 70_000.0), metavar=("LO", "HI"))
    p.add_argument("--defect", type=_cell_rect, action="append", metavar="ROW,COL,ROWS,COLS",
                   help="defect rectangle in grid cells (repeatable; default layout if omitted)")
    p.add_argument("--no-defects", action="store_true", help="plant no defects at all")
    p.add_argument("--no-snap", action="store_true", help="do not snap tones to spectrum bins")
    p.add_argument("--per-cell-tones", action="store_true",
                   help="draw a separate defect tone for every defect cell")

    p = sub.add_parser("analyze", help="detect defect-prone regions in a slab file")
    p.add_argument("slab", type=Path)
    p.add_argument("--out", type=Path, required=True)
    _add_threshold_flags(p)
    _add_render_flags(p, alpha=False)

    p = sub.add_parser("evaluate", help="score analysis masks against a defect spec")
    p.add_argument("analysis", type=Path, help="directory written by 'analyze'")
    p.add_argument("--defects", type=Path, required=True)
    p.add_argument("--out", type=Path, help="output directory (default: the analysis directory)")
    _add_render_flags(p)

    p = sub.add_parser("pipeline", help="analyze and evaluate one or more slabs")
    p.add_argument("inputs", type=Path, nargs="*",
                   help="directories each holding slab.json and defects.json")
    p.add_argument("--slab", type=Path, help="single slab file (with --defects)")
    p.add_argument("--defects", type=Path)
    p.add_argument("--out", type=Path, required=True)
    _add_threshold_flags(p)
    _add_render_flags(p)

    p = sub.add_parser("render", help="render a frequency grid and/or mask CSV to rasters")
    p.add_argument("--grid", type=Path, help="frequency grid CSV (rows x cols of Hz)")
    p.add_argument("--mask", type=Path, help="mask CSV of 0/1 values")
    p.add_argument("--smooth", action="store_true", help="bilinear smoothing for the heatmap")
    p.add_argument("--out", type=Path, required=True)
    _add_render_flags(p, alpha=False)
    return parser


def _render_opts(args) -> RenderOptions:
    if args.upscale < 1:
        raise ConfigError(f"--upscale must be >= 1, got {args.upscale}")
    alpha = getattr(args, "alpha", 0.5)
    if not 0 <= alpha <= 1:
        raise ConfigError(f"--alpha must lie in [0, 1], got {alpha}")
    return RenderOptions(args.upscale, args.colormap, alpha)


def cmd_synth(args) -> int:
    if args.rows < 1 or args.cols < 1:
        raise ConfigError(f"--rows and --cols must be >= 1, got {args.rows}x{args.cols}")
    defects = () if args.no_defects else args.defect
    cfg = SynthConfig(
        shape=GridShape(args.rows, args.cols), sample_rate=args.sample_rate,
        n_samples=args.n_samples, defect_band=tuple(args.defect_band),
        intact_band=tuple(args.intact_band), decay_tau=args.tau, noise_sigma=args.sigma,
        seed=args.seed, defects=defects, snap=not args.no_snap,
        shared_defect_tone=not args.per_cell_tones, slab_id=args.slab_id,
    )
    rec, spec = generate_slab(cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    write_slab(rec, args.out / "slab.json")
    write_defect_spec(spec, args.out / "defects.json")
    print(f"wrote {args.out / 'slab.json'} and {args.out / 'defects.json'}")
    return EXIT_OK


def _analyze_one(slab_path: Path, out: Path, args, render: RenderOptions) -> dict:
    rec = load_slab(slab_path)
    cfg = ThresholdConfig(args.exponent, args.multiplier)
    try:
        a = analyze(rec, cfg, seed=args.seed)
    except IEError as exc:
        raise type(exc)(f"slab {rec.slab_id}: {exc}") from None
    inputs = {"slab": {"name": slab_path.name, "sha256": sha256_file(slab_path)}}
    return write_analysis(a, out, render, inputs=inputs, seed=args.seed)


def cmd_analyze(args) -> int:
    render = _render_opts(args)
    m = _analyze_one(args.slab, args.out, args, render)
    low, high = m["ranges"]["low"], m["ranges"]["high"]
    print(f"{m['slab_id']}: low {low['f_start_hz']:.6g}-{low['f_end_hz']:.6g} Hz, "
          f"high {high['f_start_hz']:.6g}-{high['f_end_hz']:.6g} Hz")
    return EXIT_OK


def _evaluate_one(analysis_dir: Path, defects: Path, out: Path, render: RenderOptions) -> tuple:
    binary, cluster, low = load_analysis_outputs(analysis_dir)
    spec = parse_defect_spec(defects)
    ev = evaluate(binary, cluster, low, spec)
    inputs = {"defects": {"name": defects.name, "sha256": sha256_file(defects)}}
    write_evaluation(ev, binary, cluster, out, render, inputs=inputs)
    return ev


def cmd_evaluate(args) -> int:
    render = _render_opts(args)
    ev = _evaluate_one(args.analysis, args.defects, args.out or args.analysis, render)
    for name, m in (("binary", ev.binary), ("cluster", ev.cluster)):
        print(f"{ev.slab_id} {name}: " + ", ".join(
            f"{k}={'undefined' if v is None else format(v, '.4f')}"
            for k, v in (("iou", m.iou), ("precision", m.precision), ("recall", m.recall),
                         ("f1", m.f1), ("auc", m.auc_roc))))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    render = _render_opts(args)
    jobs = []
    if args.slab or args.defects:
        if not (args.slab and args.defects):
            raise ConfigError("--slab and --defects must be given together")
        jobs.append((args.slab, args.defects, args.slab.stem))
    for d in args.inputs:
        jobs.append((d / "slab.json", d / "defects.json", d.name))
    if not jobs:
        raise ConfigError("no inputs: give input directories or --slab/--defects")
    args.out.mkdir(parents=True, exist_ok=True)
    results, failures, code = [], [], EXIT_OK
    for slab_path, defects_path, name in jobs:
        out = args.out / name
        try:
            m = _analyze_one(slab_path, out, args, render)
            ev = _evaluate_one(out, defects_path, out, render)
        except IEError as exc:
            failures.append({"input": name, "error": type(exc).__name__, "message": str(exc)})
            code = code or exc.exit_code
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
            continue
        results.append({
            "input": name,
            "slab_id": m["slab_id"],
            "low_range_hz": [m["ranges"]["low"]["f_start_hz"], m["ranges"]["low"]["f_end_hz"]],
            "high_range_hz": [m["ranges"]["high"]["f_start_hz"], m["ranges"]["high"]["f_end_hz"]],
            "binary": metrics_json(ev.slab_id, ev.binary, "binary"),
            "cluster": metrics_json(ev.slab_id, ev.cluster, "cluster"),
        })
        print(f"{name}: binary f1={_fmt(ev.binary.f1)} cluster f1={_fmt(ev.cluster.f1)}")
    dump_json({
        "config": {"exponent": args.exponent, "multiplier": args.multiplier, "seed": args.seed,
                   "upscale": render.upscale, "colormap": render.colormap, "alpha": render.alpha},
        "slabs": results,
        "failures": failures,
    }, args.out / "summary.json")
    return code


def _fmt(v):
    return "undefined" if v is None else f"{v:.4f}"


def cmd_render(args) -> int:
    render = _render_opts(args)
    if not (args.grid or args.mask):
        raise ConfigError("nothing to render: give --grid and/or --mask")
    args.out.mkdir(parents=True, exist_ok=True)
    if args.grid:
        grid = read_grid(args.grid)
        write_pnm(heatmap(grid, COLORMAPS[render.colormap], render.upscale, smooth=args.smooth),
                  args.out / f"{args.grid.stem}.ppm")
        (args.out / f"{args.grid.stem}_surface.csv").write_text(surface_csv(grid), encoding="utf-8")
    if args.mask:
        write_pnm(mask_raster(read_mask(args.mask), render.upscale), args.out / f"{args.mask.stem}.pgm")
    return EXIT_OK


COMMANDS = {
    "synth": cmd_synth,
    "analyze": cmd_analyze,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
    "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except IEError as exc:
        print(f"iedefect {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
