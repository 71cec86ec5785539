from __future__ import annotations

import support


def pytest_terminal_summary(terminalreporter):
    if support.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in support.ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
