"""Rigid rotation/translation of whole G-code programs.

Unlike re-slicing a rotated model, every printed point is moved by the same
rigid motion, so the infill path is carried along unchanged.
"""

from __future__ import annotations

import warnings
from dataclasses import replace

import numpy as np

from .gcode_model import GcodeProgram, extract_skeleton
from .geometry import Transform2D, convex_hull, polygon_centroid

__all__ = [
    "BED_SIZE",
    "OutOfBedWarning",
    "program_pivot",
    "transform_program",
    "rotate_gcode",
    "translate_gcode",
]

BED_SIZE = (250.0, 250.0)


class OutOfBedWarning(UserWarning):
    pass


def program_pivot(program: GcodeProgram):
    """Centroid of the convex hull of every skeleton point in the program."""
    skeleton = extract_skeleton(program)
    points = skeleton.all_points()
    if not points:
        raise ValueError("program has no printed points to rotate about")
    return polygon_centroid(convex_hull(points))


def transform_program(program: GcodeProgram, transform: Transform2D) -> GcodeProgram:
    """Apply ``transform`` to the XY of every G0/G1 line.

    Lines that set only one of X/Y are completed from the modal position
    so the moved trajectory stays exact. Z, E, F and line order are kept.
    """
    moves = [i for i, ins in enumerate(program.instructions)
             if ins.is_move and (ins.x is not None or ins.y is not None)]
    if not moves:
        return program
    x = y = 0.0
    modal = np.empty((len(moves), 2))
    k = 0
    for ins in program.instructions:
        if not ins.is_move:
            continue
        if ins.x is not None:
            x = ins.x
        if ins.y is not None:
            y = ins.y
        if ins.x is not None or ins.y is not None:
            modal[k] = (x, y)
            k += 1
    moved = transform.apply(modal)
    out = list(program.instructions)
    for idx, (nx, ny) in zip(moves, moved):
        out[idx] = replace(out[idx], x=float(nx), y=float(ny), raw="")
    return GcodeProgram(tuple(out), program.source_name)


def _warn_if_off_bed(program: GcodeProgram) -> None:
    xs = [ins.x for ins in program if ins.is_move and ins.x is not None]
    ys = [ins.y for ins in program if ins.is_move and ins.y is not None]
    if not xs and not ys:
        return
    lo = min(xs + ys)
    if lo < 0 or (xs and max(xs) > BED_SIZE[0]) or (ys and max(ys) > BED_SIZE[1]):
        warnings.warn(
            f"transformed program leaves the {BED_SIZE[0]:g}x{BED_SIZE[1]:g} mm bed",
            OutOfBedWarning,
            stacklevel=3,
        )


def rotate_gcode(program: GcodeProgram, deg: float, pivot=None) -> GcodeProgram:
    """Rotate a program counter-clockwise by ``deg`` about its hull centroid.

    One pivot is used for all layers so they stay registered to each other.
    """
    if pivot is None:
        pivot = program_pivot(program)
    return transform_program(program, Transform2D(deg, tuple(pivot), (0.0, 0.0)))


def translate_gcode(program: GcodeProgram, dx: float, dy: float) -> GcodeProgram:
    if not extract_skeleton(program).layers:
        raise ValueError("program has no printed points to translate")
    moved = transform_program(program, Transform2D(0.0, (0.0, 0.0), (dx, dy)))
    _warn_if_off_bed(moved)
    return moved
