from pathlib import Path

import pytest

from gcode_forensics.dataset import ShapeSpec, gen_shape
from gcode_forensics.gcode_model import read_program

DATA = Path(__file__).parent / "data"

ACCEPTANCE_LINES = []


@pytest.fixture
def cube_path():
    return DATA / "cube.gcode"


@pytest.fixture
def cube(cube_path):
    return read_program(cube_path)


@pytest.fixture(scope="session")
def l_shape():
    return gen_shape(ShapeSpec(kind="asymmetric_L", num_layers=4, footprint_size=10), seed=3)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
