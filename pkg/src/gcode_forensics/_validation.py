"""Input coercion shared by the estimators and the CLI."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .gcode_model import GcodeProgram, Skeleton, extract_skeleton, parse_program, read_program


def check_points(points, name: str = "points", allow_empty: bool = False) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        if allow_empty:
            return arr.reshape(0, 2)
        raise ValueError(f"{name} is empty")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must have shape (n, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_series(series, name: str = "series") -> np.ndarray:
    arr = np.asarray(series, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_program(obj) -> GcodeProgram:
    """Accept a program, a path to a ``.gcode`` file, or raw G-code text."""
    if isinstance(obj, GcodeProgram):
        return obj
    if isinstance(obj, Path):
        return read_program(obj)
    if isinstance(obj, str):
        if "\n" not in obj and os.path.isfile(obj):
            return read_program(obj)
        return parse_program(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a G-code program")


def check_skeleton(obj, allow_empty: bool = False) -> Skeleton:
    skeleton = obj if isinstance(obj, Skeleton) else extract_skeleton(check_program(obj))
    if not allow_empty and len(skeleton) == 0:
        raise ValueError("skeleton has no layers")
    return skeleton
