from __future__ import annotations

import pytest

from enriques_lattice.model import build_model, load_model

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def model():
    return build_model()


@pytest.fixture(scope="session")
def golden():
    return load_model()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
