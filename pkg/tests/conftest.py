from pathlib import Path

import numpy as np
import pytest

from gavekit.model import parse_instance, parse_solution, parse_splitting

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


def load(name):
    return parse_instance((FIXTURES / f"{name}.json").read_bytes())


def load_split(name, inst):
    return parse_splitting((FIXTURES / "splittings" / f"{name}.json").read_bytes(), inst)


def load_x(name, n=None):
    return parse_solution((FIXTURES / "solutions" / f"{name}.json").read_bytes(), n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria report one line each in the terminal summary
CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str) -> bool:
        CRITERIA[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(CRITERIA[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])
