import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcode_forensics.gcode_model import (
    Command,
    GcodeParseError,
    GcodeProgram,
    Instruction,
    Layer,
    Skeleton,
    emit_program,
    extract_skeleton,
    format_number,
    parse_program,
    read_program,
)

from conftest import DATA


def test_parse_print_move():
    (ins,) = parse_program("G1 X30.651 Y15.1125 Z4.5 E1.63").instructions
    assert ins.command is Command.G1
    assert (ins.x, ins.y, ins.z, ins.e, ins.f) == (30.651, 15.1125, 4.5, 1.63, None)


def test_parse_travel_move():
    (ins,) = parse_program("G0 X1.07 Y10.5 Z3").instructions
    assert ins.command is Command.G0
    assert (ins.x, ins.y, ins.z) == (1.07, 10.5, 3.0)
    assert ins.e is None


def test_parse_empty():
    assert len(parse_program("")) == 0


def test_one_instruction_per_line():
    text = "; header\nM104 S200\n\nG28\nG1 X1 Y2 ; move\nG2 X1 Y1 I1 J0\nG92 E0\n"
    prog = parse_program(text)
    assert len(prog) == 7
    kinds = [i.command for i in prog]
    assert kinds == [Command.OTHER] * 4 + [Command.G1] + [Command.OTHER] * 2
    assert prog.instructions[1].raw == "M104 S200"


def test_comment_stripped_and_crlf():
    prog = parse_program("G1 X1 Y2 ; X99\r\nG0 Z5\r\n")
    assert prog.instructions[0].x == 1.0
    assert prog.instructions[1].z == 5.0


def test_zero_padded_and_lowercase():
    prog = parse_program("G01 X1 Y1\ng00 x2 y3\nG10 X1\n")
    assert [i.command for i in prog] == [Command.G1, Command.G0, Command.OTHER]
    assert prog.instructions[1].y == 3.0


def test_extrusion_only_line_is_not_a_move():
    (ins,) = parse_program("G1 F2400 E-0.8").instructions
    assert ins.command is Command.OTHER


def test_malformed_number_names_line():
    with pytest.raises(GcodeParseError) as err:
        parse_program("G1 X1 Y1\nG1 X1.2.3 Y0\n")
    assert err.value.line_number == 2
    assert "line 2" in str(err.value)


def test_unknown_params_tolerated():
    (ins,) = parse_program("G1 X1 Y2 S100 T0").instructions
    assert (ins.x, ins.y) == (1.0, 2.0)


def test_emit_example():
    prog = GcodeProgram((Instruction(Command.G1, x=30.651, y=15.1125, z=4.5, e=1.63),))
    assert emit_program(prog) == "G1 X30.651 Y15.1125 Z4.5 E1.63\n"


def test_emit_empty():
    assert emit_program(GcodeProgram(())) == ""


def test_format_number():
    assert format_number(3.0) == "3"
    assert format_number(-1e-9) == "0"
    assert format_number(0.12345678) == "0.123457"
    with pytest.raises(ValueError):
        emit_program(GcodeProgram(()), decimals=3)


def test_fixture_round_trip_is_byte_identical(cube_path):
    text = cube_path.read_text()
    once = emit_program(parse_program(text))
    code = [ln.split(";")[0].strip() for ln in text.splitlines()]
    moves_src = [ln for ln in code if re.match(r"G[01] ", ln) and "X" in ln]
    moves_out = [ln for ln in once.splitlines() if re.match(r"G[01] ", ln) and "X" in ln]
    assert moves_src == moves_out


coord = st.floats(min_value=-500, max_value=500, allow_nan=False).map(lambda v: round(v, 4))


@st.composite
def instructions(draw):
    kind = draw(st.sampled_from(["G0", "G1", "M"]))
    if kind == "M":
        return Instruction(Command.OTHER, raw=draw(st.sampled_from(["M104 S210", "; note", "G28", ""])))
    keys = draw(st.sets(st.sampled_from("xyz"), min_size=1))
    params = {k: draw(coord) for k in keys}
    if kind == "G1" and draw(st.booleans()):
        params["e"] = abs(draw(coord))
    if draw(st.booleans()):
        params["f"] = draw(st.sampled_from([1200.0, 3600.0, 7740.0]))
    return Instruction(Command(kind), **params)


@given(st.lists(instructions(), max_size=30))
@settings(max_examples=200, deadline=None)
def test_emit_parse_fixed_point(instrs):
    prog = GcodeProgram(tuple(instrs))
    text = emit_program(prog)
    reparsed = parse_program(text)
    assert reparsed.moves_equal(prog)
    assert emit_program(reparsed) == text


def test_skeleton_example():
    prog = parse_program("G1 X0 Y0 Z0.3\nG1 X1 Y0\nG1 Z0.6\nG1 X1 Y1\n")
    sk = extract_skeleton(prog)
    assert sk == Skeleton((Layer(0.3, ((0, 0), (1, 0))), Layer(0.6, ((1, 0), (1, 1)))))


def test_skeleton_excludes_travel():
    sk = extract_skeleton(parse_program("G0 X1 Y1 Z0.3\nG0 X2 Y2\n"))
    assert len(sk) == 0
    assert sk.empty_reason


def test_skeleton_keeps_non_extruding_g1_and_tracks_z_from_g0():
    prog = parse_program("G0 X0 Y0 Z0.3\nG1 X1 Y0\nG1 X2 Y0 E1\nG0 Z0.6\nG0 X5 Y5\nG1 X6 Y5 E2\n")
    sk = extract_skeleton(prog)
    assert [l.z for l in sk] == [0.3, 0.6]
    assert sk[0].points == ((1, 0), (2, 0))
    assert sk[1].points == ((6, 5),)


def test_skeleton_defaults_unset_coordinates_to_zero():
    sk = extract_skeleton(parse_program("G1 X3 Z0.2\n"))
    assert sk[0].points == ((3.0, 0.0),)


def test_zhop_returning_to_same_height_stays_one_layer():
    prog = parse_program("G1 X0 Y0 Z0.3\nG1 X1 Y0\nG0 Z0.8\nG0 X4 Y4\nG0 Z0.3\nG1 X5 Y4\n")
    sk = extract_skeleton(prog)
    assert len(sk) == 1
    assert sk[0].points == ((0, 0), (1, 0), (5, 4))


def test_cube_layer_count_matches_independent_scan(cube_path, cube):
    # independent oracle: count Z changes on G0/G1 lines that are followed by G1 points
    z, zs_with_g1 = None, []
    for line in cube_path.read_text().splitlines():
        code = line.split(";")[0]
        m = re.match(r"G([01])\s", code)
        if not m:
            continue
        zm = re.search(r"Z([-\d.]+)", code)
        if zm:
            z = float(zm.group(1))
        if m.group(1) == "1" and re.search(r"[XYZ]", code) and (not zs_with_g1 or zs_with_g1[-1] != z):
            zs_with_g1.append(z)
    sk = extract_skeleton(cube)
    assert len(sk) == len(zs_with_g1) == 6
    assert [l.z for l in sk] == zs_with_g1


def test_skeleton_point_count_matches_g1_moves(cube):
    g1 = sum(1 for i in cube if i.command is Command.G1)
    assert extract_skeleton(cube).point_count == g1


@given(st.lists(st.sampled_from(["M106 S255", "; comment", "M117 hi", "G4 P10"]), min_size=1, max_size=5),
       st.integers(min_value=0, max_value=200))
@settings(max_examples=50, deadline=None)
def test_skeleton_ignores_non_movement_lines(junk, where):
    cube = read_program(DATA / "cube.gcode")
    instrs = list(cube.instructions)
    pos = where % (len(instrs) + 1)
    extra = [Instruction(Command.OTHER, raw=j) for j in junk]
    noisy = GcodeProgram(tuple(instrs[:pos] + extra + instrs[pos:]))
    assert extract_skeleton(noisy) == extract_skeleton(cube)


def test_skeleton_rejects_non_increasing_z():
    with pytest.raises(ValueError):
        Skeleton((Layer(0.6, ((0, 0),)), Layer(0.3, ((0, 0),))))
