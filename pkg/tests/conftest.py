from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from fccstab.code import generator_words, stabilizer_space
from fccstab.lattice import LatticeSpec, Window

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def spec357():
    return LatticeSpec(3, 5, 7)


@pytest.fixture(scope="session")
def spec222():
    return LatticeSpec(2, 2, 2)


@pytest.fixture(scope="session")
def words357(spec357):
    return generator_words(spec357)


@pytest.fixture(scope="session")
def stab357(spec357):
    return stabilizer_space(spec357)


@pytest.fixture(scope="session")
def window():
    return Window.cube(10)


ACCEPTANCE: dict = {}


def record(number: int, ok: bool, detail: str) -> None:
    """Store one acceptance outcome; the summary hook prints them in order."""
    ACCEPTANCE[number] = (ok, detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
