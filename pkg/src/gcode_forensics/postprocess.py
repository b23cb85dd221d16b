"""Turn per-move trajectory predictions into a printable G-code program."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_positive, check_series
from .changepoint import pelt
from .gcode_model import Command, GcodeProgram, Instruction
from .manipulator import BED_SIZE

__all__ = [
    "TrajectoryPrediction",
    "PrinterProfile",
    "detect_z_changepoints",
    "normalize_z",
    "compute_extrusion",
    "assign_feed_rate",
    "build_gcode",
    "read_predictions",
    "write_predictions",
    "ZNormalizer",
    "GcodeSynthesizer",
]

DEFAULT_PELT_PENALTY = 0.05
DEFAULT_PELT_MIN_SEGMENT = 3


@dataclass(frozen=True)
class TrajectoryPrediction:
    command_class: Command
    x: float
    y: float
    z_raw: float

    def __post_init__(self):
        cmd = Command(self.command_class)
        if cmd is Command.OTHER:
            raise ValueError("predictions are G0 or G1 only")
        vals = (float(self.x), float(self.y), float(self.z_raw))
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite prediction {vals}")
        object.__setattr__(self, "command_class", cmd)
        object.__setattr__(self, "x", min(max(vals[0], 0.0), BED_SIZE[0]))
        object.__setattr__(self, "y", min(max(vals[1], 0.0), BED_SIZE[1]))
        object.__setattr__(self, "z_raw", vals[2])


@dataclass(frozen=True)
class PrinterProfile:
    layer_height: float = 0.3
    flow_modifier: float = 1.0
    nozzle_diameter: float = 0.4
    filament_diameter: float = 1.75
    z_step: float = 0.3
    first_layer_z: float = 0.3
    feed_g0: float = 7740.0
    feed_g1: float = 3600.0
    extrusion_mode: str = "absolute"

    def __post_init__(self):
        for f in fields(self):
            if f.name != "extrusion_mode":
                check_positive(getattr(self, f.name), f.name)
        if self.extrusion_mode not in ("absolute", "relative"):
            raise ValueError("extrusion_mode must be 'absolute' or 'relative'")

    @classmethod
    def from_json(cls, path) -> "PrinterProfile":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown profile fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def detect_z_changepoints(z_series, penalty: float = DEFAULT_PELT_PENALTY,
                          min_segment: int = DEFAULT_PELT_MIN_SEGMENT) -> list:
    return pelt(check_series(z_series, "z_series"), penalty, min_segment)


def normalize_z(z_series, changepoints, profile: PrinterProfile | None = None) -> np.ndarray:
    """Snap a noisy Z series to discrete layer heights.

    The first segment sits at ``first_layer_z``; each change point raises
    Z by one ``z_step``.
    """
    profile = profile or PrinterProfile()
    n = len(check_series(z_series))
    cps = np.asarray(changepoints, dtype=int)
    if len(cps) and (np.any(np.diff(cps) <= 0) or cps[0] <= 0 or cps[-1] >= n):
        raise ValueError("change points must be strictly increasing and inside the series")
    level = np.searchsorted(cps, np.arange(n), side="right")
    # round so 0.3 + k*0.3 prints as k+1 steps, not 0.8999999
    return np.round(profile.first_layer_z + level * profile.z_step, 9)


def compute_extrusion(profile: PrinterProfile, length: float) -> float:
    """Filament length fed for a bead of ``length`` mm.

    Bead volume ``h * s * d_n * l`` over filament cross-section
    ``pi * d_f**2 / 4``.
    """
    if length < 0:
        raise ValueError("segment length must be non-negative")
    p = profile
    return 4.0 * p.layer_height * p.flow_modifier * length * p.nozzle_diameter / (
        math.pi * p.filament_diameter ** 2
    )


def assign_feed_rate(command_class, profile: PrinterProfile | None = None) -> float:
    profile = profile or PrinterProfile()
    cmd = Command(command_class)
    if cmd is Command.G0:
        return profile.feed_g0
    if cmd is Command.G1:
        return profile.feed_g1
    raise ValueError(f"no feed rate for {command_class!r}")


def build_gcode(
    predictions: Sequence[TrajectoryPrediction],
    profile: PrinterProfile | None = None,
    pelt_penalty: float = DEFAULT_PELT_PENALTY,
    pelt_min_segment: int = DEFAULT_PELT_MIN_SEGMENT,
    source_name: str = "recovered",
) -> GcodeProgram:
    """Synthesise a program from one prediction per movement.

    Z is normalised with PELT; every G1 after the first move gets E for
    its XY length (cumulative in absolute mode); F is written on the
    first move of each run of the same command; Z only when it changes.
    """
    profile = profile or PrinterProfile()
    preds = list(predictions)
    if not preds:
        raise ValueError("no predictions to build from")
    z_raw = np.array([p.z_raw for p in preds])
    cps = detect_z_changepoints(z_raw, pelt_penalty, pelt_min_segment)
    zs = normalize_z(z_raw, cps, profile)

    relative = profile.extrusion_mode == "relative"
    out: List[Instruction] = []
    e_total = 0.0
    prev_xy = None
    prev_cmd = None
    prev_z = None
    for pred, z in zip(preds, zs.tolist()):
        cmd = pred.command_class
        e = None
        if cmd is Command.G1 and prev_xy is not None:
            step = compute_extrusion(profile, math.hypot(pred.x - prev_xy[0], pred.y - prev_xy[1]))
            e_total += step
            e = step if relative else e_total
        f = assign_feed_rate(cmd, profile) if cmd is not prev_cmd else None
        out.append(Instruction(cmd, x=pred.x, y=pred.y, z=z if z != prev_z else None, e=e, f=f))
        prev_xy, prev_cmd, prev_z = (pred.x, pred.y), cmd, z
    return GcodeProgram(tuple(out), source_name)


def read_predictions(path) -> List[TrajectoryPrediction]:
    """Read a ``cmd,x,y,z`` CSV."""
    preds = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["cmd", "x", "y", "z"]:
            raise ValueError(f"{path}: expected header 'cmd,x,y,z'")
        for lineno, row in enumerate(reader, start=2):
            try:
                preds.append(TrajectoryPrediction(
                    Command(row["cmd"].strip().upper()),
                    float(row["x"]), float(row["y"]), float(row["z"]),
                ))
            except (ValueError, KeyError, AttributeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return preds


def write_predictions(predictions: Iterable[TrajectoryPrediction], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["cmd", "x", "y", "z"])
        for p in predictions:
            writer.writerow([p.command_class.value, repr(p.x), repr(p.y), repr(p.z_raw)])


class ZNormalizer(BaseEstimator, TransformerMixin):
    """Quantise a noisy Z series into layer heights via PELT."""

    def __init__(self, penalty=DEFAULT_PELT_PENALTY, min_segment=DEFAULT_PELT_MIN_SEGMENT,
                 first_layer_z=0.3, z_step=0.3):
        self.penalty = penalty
        self.min_segment = min_segment
        self.first_layer_z = first_layer_z
        self.z_step = z_step

    def fit(self, X, y=None):
        series = check_series(X, "X")
        self.n_samples_ = len(series)
        self.changepoints_ = np.asarray(pelt(series, self.penalty, self.min_segment), dtype=int)
        return self

    def transform(self, X):
        series = check_series(X, "X")
        if not hasattr(self, "changepoints_"):
            raise NotFittedError("ZNormalizer is not fitted yet")
        if len(series) != self.n_samples_:
            raise ValueError("transform expects the series the normalizer was fitted on")
        profile = PrinterProfile(first_layer_z=self.first_layer_z, z_step=self.z_step)
        return normalize_z(series, self.changepoints_, profile)


class GcodeSynthesizer(BaseEstimator, TransformerMixin):
    """Stateless transformer: predictions in, :class:`GcodeProgram` out."""

    def __init__(self, profile=None, pelt_penalty=DEFAULT_PELT_PENALTY,
                 pelt_min_segment=DEFAULT_PELT_MIN_SEGMENT):
        self.profile = profile
        self.pelt_penalty = pelt_penalty
        self.pelt_min_segment = pelt_min_segment

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> GcodeProgram:
        return build_gcode(X, self.profile, self.pelt_penalty, self.pelt_min_segment)
