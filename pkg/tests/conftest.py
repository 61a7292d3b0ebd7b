"""Shared pytest configuration for the growthsim test suite.

The acceptance module records one verdict line per criterion through
``record_criterion``; the terminal-summary hook reprints every recorded
line after the run so the verdicts stay visible whether or not output
capturing is active.
"""

from __future__ import annotations

import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "growthsim",
    deadline=None,
    suppress_health_check=(HealthCheck.too_slow,),
)
settings.load_profile("growthsim")

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

CRITERION_LINES: list[str] = []


def record_criterion(number: int, label: str, passed: bool, detail: str = "") -> None:
    """Record and print one acceptance verdict, then assert it."""
    mark = "PASS" if passed else "FAIL"
    line = f"criterion {number:02d} {label}: {mark}"
    if detail:
        line = f"{line} [{detail}]"
    CRITERION_LINES.append(line)
    print(line, flush=True)
    assert passed, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERION_LINES:
        terminalreporter.write_line(line)
