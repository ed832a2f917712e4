"""Shared fixtures: the acceptance scoreboard.

Acceptance tests log one line per criterion; the terminal summary prints
them together so a release check reads as a single block regardless of
how the individual tests fared.
"""

import pytest

_SCOREBOARD = {}


@pytest.fixture
def acceptance_log():
    def log(criterion: int, passed: bool, detail: str):
        _SCOREBOARD[criterion] = (passed, detail)
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _SCOREBOARD:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_SCOREBOARD):
        passed, detail = _SCOREBOARD[criterion]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"[criterion {criterion}] {verdict}: {detail}")
