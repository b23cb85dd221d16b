"""Synthetic test objects, rotated/translated variant sets, noisy predictions."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .gcode_model import Command, GcodeProgram, Instruction, extract_skeleton, write_program
from .manipulator import BED_SIZE, program_pivot, rotate_gcode, translate_gcode
from .postprocess import PrinterProfile, TrajectoryPrediction, compute_extrusion

__all__ = [
    "SHAPE_KINDS",
    "ShapeSpec",
    "VariantSpec",
    "outline",
    "ring_count",
    "gen_shape",
    "gen_variants",
    "inject_noise",
    "write_dataset",
]

SHAPE_KINDS = ("polygon_prism", "star_prism", "asymmetric_L")


@dataclass(frozen=True)
class ShapeSpec:
    kind: str = "asymmetric_L"
    num_layers: int = 10
    footprint_size: float = 12.0
    infill: str = "concentric"
    points_per_layer: Optional[int] = None
    sides: int = 4
    ring_pitch: float = 0.4
    center: Tuple[float, float] = (BED_SIZE[0] / 2, BED_SIZE[1] / 2)

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.infill not in ("concentric", "none"):
            raise ValueError(f"unknown infill {self.infill!r}")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        if self.sides < 3:
            raise ValueError("a polygon needs at least 3 sides")
        if not self.footprint_size > 0 or not self.ring_pitch > 0:
            raise ValueError("footprint_size and ring_pitch must be positive")


@dataclass(frozen=True)
class VariantSpec:
    variant: str = "R"
    rotation_step_deg: float = 5.0
    rotation_max_deg: float = 180.0
    grid_spacing: float = 4.0
    grid_bound: float = 10.0
    rt_translation_points: int = 8

    def __post_init__(self):
        if self.variant not in ("R", "T", "RT"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 1 <= self.rt_translation_points <= 8:
            raise ValueError("rt_translation_points must be between 1 and 8")

    def rotations(self) -> List[float]:
        n = int(math.floor(self.rotation_max_deg / self.rotation_step_deg + 1e-9))
        return [self.rotation_step_deg * (k + 1) for k in range(n)]

    def lattice(self) -> List[float]:
        n = int(math.floor(2 * self.grid_bound / self.grid_spacing + 1e-9))
        return [-self.grid_bound + k * self.grid_spacing for k in range(n + 1)]

    def rt_offsets(self) -> List[Tuple[float, float]]:
        # four corners at the largest lattice offset, then four at the smallest
        axis = self.lattice()
        far = max(abs(v) for v in axis)
        near = min(abs(v) for v in axis if v != 0)
        corners = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
        pts = [(far * sx, far * sy) for sx, sy in corners]
        pts += [(near * sx, near * sy) for sx, sy in corners]
        return pts[: self.rt_translation_points]


def outline(spec: ShapeSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Outer contour (CCW, centred on ``spec.center``) and the scaling centre.

    For the L the scaling centre is the middle of the corner square, from
    which the whole outline is visible, so shrunken copies stay inside.
    """
    size = spec.footprint_size
    if spec.kind == "polygon_prism":
        n = spec.sides
        circum = (size / 2) / math.cos(math.pi / n)
        ang = 2 * math.pi * np.arange(n) / n + math.pi / n - math.pi / 2
        pts = circum * np.column_stack([np.cos(ang), np.sin(ang)])
        core = np.zeros(2)
    elif spec.kind == "star_prism":
        outer, inner = size / 2, size / 4
        ang = math.pi / 2 + math.pi * np.arange(10) / 5
        rad = np.where(np.arange(10) % 2 == 0, outer, inner)
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        core = np.zeros(2)
    else:
        w, t, h = size, 0.4 * size, 0.75 * size
        pts = np.array([(0, 0), (w, 0), (w, t), (t, t), (t, h), (0, h)], dtype=float)
        pts -= np.array([w / 2, h / 2])
        core = np.array([t / 2 - w / 2, t / 2 - h / 2])
    centre = np.asarray(spec.center, dtype=float)
    return pts + centre, core + centre


def ring_count(spec: ShapeSpec) -> int:
    if spec.infill == "none":
        return 1
    return max(1, int(math.floor((spec.footprint_size / 2) / spec.ring_pitch + 1e-9)))


def _densify(ring: np.ndarray, target: Optional[int]) -> np.ndarray:
    if not target or target <= len(ring):
        return ring
    closed = np.vstack([ring, ring[:1]])
    lengths = np.hypot(*np.diff(closed, axis=0).T)
    extra = target - len(ring)
    share = np.floor(extra * lengths / lengths.sum()).astype(int)
    share[np.argsort(-lengths)[: extra - share.sum()]] += 1
    out = []
    for i, k in enumerate(share):
        a, b = closed[i], closed[i + 1]
        for s in range(k + 1):
            out.append(a + (b - a) * s / (k + 1))
    return np.asarray(out)


def gen_shape(spec: ShapeSpec, seed: int = 0, profile: PrinterProfile | None = None) -> GcodeProgram:
    """Slice-like G-code for a prism with an optional concentric infill.

    Each layer opens with a non-extruding G1 to the outer ring's seam
    (carrying the new Z), prints every ring as a closed loop, and travels
    between rings with G0. The seam vertex is drawn per layer from
    ``seed``.
    """
    profile = profile or PrinterProfile()
    contour, core = outline(spec)
    rings_n = ring_count(spec)
    half = spec.footprint_size / 2
    rings = []
    for k in range(rings_n):
        scale = 1.0 - k * spec.ring_pitch / half
        ring = core + (contour - core) * scale
        rings.append(_densify(ring, spec.points_per_layer) if k == 0 else ring)

    lo = min(r.min() for r in rings)
    hi_x = max(r[:, 0].max() for r in rings)
    hi_y = max(r[:, 1].max() for r in rings)
    if lo < 0 or hi_x > BED_SIZE[0] or hi_y > BED_SIZE[1]:
        raise ValueError("shape footprint does not fit on the bed")

    rng = np.random.default_rng(seed)
    lines: List[Instruction] = [
        Instruction(Command.OTHER, raw=f"; synthetic {spec.kind} {spec.infill} x{spec.num_layers}"),
        Instruction(Command.OTHER, raw="G21"),
        Instruction(Command.OTHER, raw="G90"),
        Instruction(Command.OTHER, raw="M82"),
        Instruction(Command.OTHER, raw="G92 E0"),
    ]
    e = 0.0
    for layer in range(spec.num_layers):
        z = round(profile.first_layer_z + layer * profile.z_step, 9)
        seam = int(rng.integers(0, len(rings[0])))
        for k, ring in enumerate(rings):
            start = seam if k == 0 else seam % len(ring)
            loop = np.roll(ring, -start, axis=0)
            loop = [(round(float(x), 6), round(float(y), 6)) for x, y in loop]
            if k == 0:
                lines.append(Instruction(Command.G1, x=loop[0][0], y=loop[0][1], z=z, f=profile.feed_g1))
            else:
                lines.append(Instruction(Command.G0, x=loop[0][0], y=loop[0][1], f=profile.feed_g0))
            prev = loop[0]
            for i, p in enumerate(loop[1:] + loop[:1]):
                e += compute_extrusion(profile, math.hypot(p[0] - prev[0], p[1] - prev[1]))
                f = profile.feed_g1 if (i == 0 and k > 0) else None
                lines.append(Instruction(Command.G1, x=p[0], y=p[1], e=round(e, 6), f=f))
                prev = p
    return GcodeProgram(tuple(lines), f"{spec.kind}_{spec.infill}")


def gen_variants(program: GcodeProgram, vspec: VariantSpec) -> List[Tuple[dict, GcodeProgram]]:
    """Rotated (R), translated (T) or rotated-and-translated (RT) copies.

    Rotations are about the whole object's hull centroid; translations are
    offsets of that centroid on a square lattice. Each output is
    ``(label, program)`` where ``label`` has ``name``, ``theta``, ``dx``
    and ``dy``.
    """
    pivot = program_pivot(program)
    combos: List[Tuple[float, float, float]] = []
    if vspec.variant == "R":
        combos = [(t, 0.0, 0.0) for t in vspec.rotations()]
    elif vspec.variant == "T":
        axis = vspec.lattice()
        combos = [(0.0, dx, dy) for dy in axis for dx in axis]
    else:
        combos = [(t, dx, dy) for dx, dy in vspec.rt_offsets() for t in vspec.rotations()]
    out = []
    for theta, dx, dy in combos:
        prog = program
        if theta:
            prog = rotate_gcode(prog, theta, pivot=pivot)
        if dx or dy:
            prog = translate_gcode(prog, dx, dy)
        name = f"{vspec.variant}_rot{theta:g}_dx{dx:+g}_dy{dy:+g}"
        label = {"name": name, "theta": theta, "dx": dx, "dy": dy}
        out.append((label, GcodeProgram(prog.instructions, name)))
    return out


def inject_noise(program: GcodeProgram, xy_sigma: float = 0.0, z_sigma: float = 0.0,
                 seed: int = 0) -> List[TrajectoryPrediction]:
    """Simulated model output: one noisy prediction per movement line."""
    if not extract_skeleton(program).layers:
        raise ValueError("program has no printed trajectory")
    x = y = z = 0.0
    cmds, xyz = [], []
    for ins in program:
        if not ins.is_move:
            continue
        x = ins.x if ins.x is not None else x
        y = ins.y if ins.y is not None else y
        z = ins.z if ins.z is not None else z
        cmds.append(ins.command)
        xyz.append((x, y, z))
    arr = np.asarray(xyz, dtype=float)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(arr.shape) * np.array([xy_sigma, xy_sigma, z_sigma])
    arr = arr + noise
    return [TrajectoryPrediction(c, *row) for c, row in zip(cmds, arr.tolist())]


def write_dataset(out_dir, source: GcodeProgram, variants: Sequence[Tuple[dict, GcodeProgram]],
                  extra: Optional[dict] = None) -> Path:
    """Write the source, one ``.gcode`` per variant, and ``manifest.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_program(source, out / "source.gcode")
    entries = []
    for label, prog in variants:
        fname = label["name"] + ".gcode"
        write_program(prog, out / fname)
        entries.append({**label, "file": fname})
    manifest = {"source": "source.gcode", "variants": entries}
    if extra:
        manifest.update(extra)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def shape_spec_dict(spec: ShapeSpec) -> dict:
    return asdict(spec)
