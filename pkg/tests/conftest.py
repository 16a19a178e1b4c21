from __future__ import annotations

import os
from pathlib import Path

import pytest

from qet.syntax import Program, parse

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"
GOLDEN = Path(__file__).resolve().parent / "golden"

COINTOSS_ASSIGNMENT = """\
X_0 := Y_i + Y_x*(2 - A_1_2 - A_2_1)
X_1 := Y_i + 2 - 2*A_1_1
"""
PERTURBED_ASSIGNMENT = """\
X_0 := Y_i + Y_x*(1 - A_1_2 - A_2_1)
X_1 := Y_i + 2 - 2*A_1_1
"""
RUS_ASSIGNMENT = """\
X_0 := Y_i + 8/3*Y_x
X_1 := Y_i + 8/3*(A_2_2 + A_4_4)
"""


def load(name: str) -> Program:
    return parse((PROGRAMS / f"{name}.qps").read_text())


def check_golden(name: str, text: str) -> None:
    """Compare with tests/golden/<name>; QET_UPDATE_GOLDEN=1 rewrites the file."""
    path = GOLDEN / name
    if os.environ.get("QET_UPDATE_GOLDEN") == "1":
        path.write_text(text)
    assert text == path.read_text()


@pytest.fixture
def cointoss() -> Program:
    return load("cointoss")


@pytest.fixture
def rus() -> Program:
    return load("rus")


# ------------------------------------------------------------------ acceptance report

ACCEPTANCE: dict[int, tuple[str, str]] = {}
_RANK = {"PASS": 0, "SKIP": 1, "FAIL": 2}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed or rep.skipped):
        return
    number, title = marker.args
    status = "FAIL" if rep.failed else "SKIP" if rep.skipped else "PASS"
    old = ACCEPTANCE.get(number, (title, "PASS"))[1]
    ACCEPTANCE[number] = (title, max(old, status, key=_RANK.__getitem__))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, status = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
