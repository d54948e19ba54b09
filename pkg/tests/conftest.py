"""Collects acceptance verdict lines and prints them after the run.

The terminal reporter bypasses output capture, so the one-line-per-criterion
summary shows up even when every test passes.
"""

verdict_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if verdict_lines:
        terminalreporter.section("acceptance criteria")
        for line in verdict_lines:
            terminalreporter.write_line(line)
