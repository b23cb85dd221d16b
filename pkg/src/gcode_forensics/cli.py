"""Command-line entry point: ``gcode-forensics <subcommand> ...``.

Exit status is 0 on success, 1 on a usage error and 2 when the input data
cannot be processed.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings
from pathlib import Path

from .dataset import SHAPE_KINDS, ShapeSpec, VariantSpec, gen_shape, gen_variants, inject_noise, write_dataset
from .equivalence import align_layer, compare, nmse_similarity
from .gcode_model import GcodeParseError, extract_skeleton, read_program, write_program
from .manipulator import rotate_gcode, translate_gcode
from .plotting import layer_overlay_svg
from .postprocess import PrinterProfile, build_gcode, read_predictions, write_predictions

log = logging.getLogger("gcode_forensics")

SEED_ENV = "GCODE_FORENSICS_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _pair(text: str):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected DX,DY, got {text!r}") from None
    return a, b


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def cmd_parse(args) -> int:
    program = read_program(args.input)
    skeleton = extract_skeleton(program)
    summary = {
        "source": program.source_name,
        "instructions": len(program),
        "moves": program.move_count,
        "layers": len(skeleton),
        "skeleton_points": skeleton.point_count,
    }
    if args.output:
        write_program(program, args.output)
    print(json.dumps(summary, indent=2))
    return 0


def cmd_skeleton(args) -> int:
    skeleton = extract_skeleton(read_program(args.input))
    if skeleton.empty_reason:
        log.warning("empty skeleton: %s", skeleton.empty_reason)
    data = {"layers": [{"z": layer.z, "points": [list(p) for p in layer.points]} for layer in skeleton]}
    text = json.dumps(data, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_manipulate(args) -> int:
    program = read_program(args.input)
    if args.rotate:
        program = rotate_gcode(program, args.rotate)
    if args.translate is not None:
        program = translate_gcode(program, *args.translate)
    write_program(program, args.output)
    return 0


def cmd_compare(args) -> int:
    gt, cand = read_program(args.gt), read_program(args.cand)
    report = compare(
        gt, cand,
        skip_brim=args.skip_brim, global_align=args.global_align,
        tie_rtol=args.tie_rtol, n_jobs=args.jobs,
    )
    if args.baseline == "nmse":
        report.nmse_similarity_pct = nmse_similarity(gt, cand, skip_brim=args.skip_brim)
    _dump_json(report.to_dict(), args.report)
    if args.per_layer:
        rows = report.csv_rows()
        with open(args.per_layer, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    print(f"similarity {report.aggregate_similarity_pct:.6f} %")
    return 0


def cmd_postprocess(args) -> int:
    profile = PrinterProfile.from_json(args.profile) if args.profile else PrinterProfile()
    preds = read_predictions(args.input)
    program = build_gcode(preds, profile, args.pelt_penalty, args.pelt_min_segment)
    write_program(program, args.output)
    return 0


def cmd_gen_dataset(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    spec = ShapeSpec(
        kind=args.shape, num_layers=args.layers, footprint_size=args.footprint,
        infill=args.infill, sides=args.sides, points_per_layer=args.points_per_layer,
    )
    source = gen_shape(spec, seed=seed)
    variants = gen_variants(source, VariantSpec(variant=args.variant)) if args.variant else []
    extra = {"seed": seed, "shape": args.shape, "variant": args.variant}
    out = Path(args.out_dir)
    write_dataset(out, source, variants, extra)
    if args.noise is not None:
        xy, z = args.noise
        write_predictions(inject_noise(source, xy, z, seed=seed), out / "predictions.csv")
    log.info("wrote %d variants to %s", len(variants), out)
    return 0


def cmd_plot(args) -> int:
    gt = extract_skeleton(read_program(args.gt))
    cand = extract_skeleton(read_program(args.cand))
    if not 0 <= args.layer < min(len(gt), len(cand)):
        raise ValueError(f"layer {args.layer} not present in both programs")
    g, c = gt[args.layer], cand[args.layer]
    cand_pts = c.points
    title = f"layer {args.layer}"
    if args.aligned:
        result, cand_pts = align_layer(g, c)
        title += f" aligned: rotation {result.rotation_deg} deg"
    Path(args.output).write_text(layer_overlay_svg(g.points, cand_pts, title), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcode-forensics", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="parse a file and print a summary")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", help="re-emit in canonical form")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("skeleton", help="dump the per-layer XY trajectory as JSON")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("manipulate", help="rigidly rotate and/or translate a program")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rotate", type=float, default=0.0, help="degrees, counter-clockwise")
    p.add_argument("--translate", type=_pair, help="DX,DY in mm (use --translate=-4,4 for negatives)")
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("compare", help="score a candidate against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--report", required=True, help="JSON report path")
    p.add_argument("--per-layer", help="CSV with one row per layer")
    p.add_argument("--skip-brim", action="store_true")
    p.add_argument("--global-align", action="store_true")
    p.add_argument("--baseline", choices=["nmse"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tie-rtol", type=float, default=0.05)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("postprocess", help="build G-code from a cmd,x,y,z predictions CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--profile", help="printer profile JSON")
    p.add_argument("--pelt-penalty", type=float, default=0.05)
    p.add_argument("--pelt-min-segment", type=int, default=3)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("gen-dataset", help="synthetic object plus R/T/RT variants")
    p.add_argument("--shape", choices=SHAPE_KINDS, default="asymmetric_L")
    p.add_argument("--variant", choices=["R", "T", "RT"])
    p.add_argument("--layers", type=int, default=10)
    p.add_argument("--footprint", type=float, default=12.0)
    p.add_argument("--infill", choices=["concentric", "none"], default="concentric")
    p.add_argument("--sides", type=int, default=4)
    p.add_argument("--points-per-layer", type=int)
    p.add_argument("--noise", type=_pair, metavar="XY_SIGMA,Z_SIGMA",
                   help="also write predictions.csv with Gaussian noise")
    p.add_argument("--seed", type=int, help=f"defaults to ${SEED_ENV}, else 0")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("plot", help="SVG overlay of one layer (gt blue, candidate red)")
    p.add_argument("--gt", required=True)
    p.add_argument("--cand", required=True)
    p.add_argument("--layer", type=int, required=True, help="0-based layer index")
    p.add_argument("--aligned", action="store_true", help="draw the candidate after alignment")
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s")
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except (GcodeParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
