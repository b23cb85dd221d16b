"""Parsing, emission and skeleton extraction for linear-move G-code."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple

__all__ = [
    "Command",
    "GcodeParseError",
    "Instruction",
    "GcodeProgram",
    "Layer",
    "Skeleton",
    "parse_program",
    "emit_program",
    "format_number",
    "extract_skeleton",
    "read_program",
    "write_program",
]

Point = Tuple[float, float]

AXES = ("x", "y", "z", "e", "f")
_PARAM_RE = re.compile(r"([A-Za-z])\s*([^\sA-Za-z;]*)")
_COMMAND_RE = re.compile(r"^\s*([Gg])0*([01])(?![0-9.])")


class Command(str, enum.Enum):
    G0 = "G0"
    G1 = "G1"
    OTHER = "OTHER"


class GcodeParseError(ValueError):
    """Raised for a malformed numeric parameter on a G0/G1 line."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class Instruction:
    command: Command
    x: Optional[float] = None
    y: Optional[float] = None
    z: Optional[float] = None
    e: Optional[float] = None
    f: Optional[float] = None
    raw: str = ""

    @property
    def is_move(self) -> bool:
        return self.command in (Command.G0, Command.G1)

    def params(self) -> dict:
        return {k: getattr(self, k) for k in AXES if getattr(self, k) is not None}

    def moves_equal(self, other: "Instruction") -> bool:
        """Compare command and parameters, ignoring the source text."""
        if self.command != other.command:
            return False
        if not self.is_move:
            return self.raw.strip() == other.raw.strip()
        return self.params() == other.params()


@dataclass(frozen=True)
class GcodeProgram:
    instructions: Tuple[Instruction, ...] = ()
    source_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    @property
    def move_count(self) -> int:
        return sum(1 for ins in self.instructions if ins.is_move)

    def moves_equal(self, other: "GcodeProgram") -> bool:
        return len(self) == len(other) and all(
            a.moves_equal(b) for a, b in zip(self.instructions, other.instructions)
        )


@dataclass(frozen=True)
class Layer:
    z: float
    points: Tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "points", tuple((float(x), float(y)) for x, y in self.points)
        )

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Skeleton:
    layers: Tuple[Layer, ...] = ()
    # set when the source had no G1 movement at all
    empty_reason: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        zs = [layer.z for layer in self.layers]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ValueError("layer z values must strictly increase")

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __getitem__(self, idx):
        return self.layers[idx]

    @property
    def point_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def all_points(self) -> list:
        return [p for layer in self.layers for p in layer.points]


def _parse_move(command: Command, body: str, raw: str, line_number: int) -> Instruction:
    values = {}
    for letter, token in _PARAM_RE.findall(body):
        key = letter.lower()
        if key == "g":
            continue
        if key not in AXES:
            # S, T, etc. are kept in raw only
            continue
        try:
            values[key] = float(token)
        except ValueError:
            raise GcodeParseError(
                line_number, f"malformed {letter.upper()} parameter {token!r}"
            ) from None
    if not any(k in values for k in ("x", "y", "z")):
        # E/F-only lines (retractions, feed changes) are not movements
        return Instruction(Command.OTHER, raw=raw)
    return Instruction(command, raw=raw, **values)


def parse_program(text: str, source_name: str = "") -> GcodeProgram:
    """Parse G-code source into a :class:`GcodeProgram`.

    Every source line yields exactly one instruction. ``G0``/``G1`` (and
    zero-padded ``G00``/``G01``) with at least one of X/Y/Z become movement
    instructions; everything else, including arcs and blank lines, is kept
    verbatim as ``Command.OTHER``.
    """
    if not text:
        return GcodeProgram((), source_name)
    lines = text.splitlines()
    instructions = []
    for number, line in enumerate(lines, start=1):
        raw = line.rstrip("\r")
        code = raw.split(";", 1)[0]
        match = _COMMAND_RE.match(code)
        if match is None:
            instructions.append(Instruction(Command.OTHER, raw=raw))
            continue
        command = Command.G0 if match.group(2) == "0" else Command.G1
        instructions.append(_parse_move(command, code[match.end():], raw, number))
    return GcodeProgram(tuple(instructions), source_name)


def format_number(value: float, decimals: int = 6) -> str:
    """Fixed-point with trailing zeros trimmed; never emits ``-0``."""
    text = f"{value:.{decimals}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("-0", ""):
        text = "0"
    return text


def emit_instruction(ins: Instruction, decimals: int = 6) -> str:
    if not ins.is_move:
        return ins.raw
    parts = [ins.command.value]
    for key in AXES:
        value = getattr(ins, key)
        if value is not None:
            parts.append(key.upper() + format_number(value, decimals))
    return " ".join(parts)


def emit_program(program: GcodeProgram, decimals: int = 6) -> str:
    """Render a program as text, one line per instruction, LF-terminated."""
    if decimals < 4:
        raise ValueError("at least 4 decimal places are required")
    if not program.instructions:
        return ""
    return "\n".join(emit_instruction(ins, decimals) for ins in program) + "\n"


def extract_skeleton(program: GcodeProgram | Iterable[Instruction]) -> Skeleton:
    """Reduce a program to its per-layer XY trajectory.

    Z is tracked from both G0 and G1 lines; only G1 lines contribute
    points. Coordinates not yet set are taken as 0. A layer starts every
    time the tracked Z changes, and layers left without points are
    dropped. Layers that revisit an earlier Z (e.g. a Z-hop that returns)
    are merged into the running layer only if Z is unchanged, so a
    program whose Z goes back down raises ``ValueError`` via
    :class:`Skeleton`.
    """
    x = y = z = 0.0
    layers: list = []
    current_z: Optional[float] = None
    current: list = []
    saw_g1 = False

    def close():
        if current:
            layers.append(Layer(current_z, tuple(current)))

    for ins in program:
        if not ins.is_move:
            continue
        if ins.x is not None:
            x = ins.x
        if ins.y is not None:
            y = ins.y
        if ins.z is not None:
            z = ins.z
        if z != current_z:
            close()
            current = []
            current_z = z
        if ins.command is Command.G1:
            saw_g1 = True
            current.append((x, y))
    close()
    merged = _merge_equal_z(layers)
    reason = None if saw_g1 else "no G1 movement instructions"
    return Skeleton(tuple(merged), empty_reason=reason)


def _merge_equal_z(layers: Sequence[Layer]) -> list:
    # a travel Z-hop between two runs at the same height splits one layer in two
    out: list = []
    for layer in layers:
        if out and out[-1].z == layer.z:
            out[-1] = Layer(layer.z, out[-1].points + layer.points)
        else:
            out.append(layer)
    return out


def read_program(path: str | Path) -> GcodeProgram:
    path = Path(path)
    return parse_program(path.read_text(encoding="utf-8"), source_name=path.name)


def write_program(program: GcodeProgram, path: str | Path, decimals: int = 6) -> None:
    Path(path).write_text(emit_program(program, decimals), encoding="utf-8", newline="\n")


def with_coordinates(ins: Instruction, **coords) -> Instruction:
    return replace(ins, raw="", **coords)
