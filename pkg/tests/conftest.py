"""Shared pytest wiring: collects the acceptance result lines and prints
them as a summary section at the end of the run, visible without -s."""

from __future__ import annotations

import pytest

_CRITERION_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    def _record(number: int, passed: bool, detail: str) -> None:
        word = "PASS" if passed else "FAIL"
        _CRITERION_LINES.append(f"criterion {number:02d} {word}  {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_CRITERION_LINES):
        terminalreporter.write_line(line)
