"""Collects the acceptance-criterion result lines and echoes them after
the pytest summary, so the pass/fail verdicts survive output capture."""

_lines: list[str] = []


def record(line: str) -> None:
    _lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _lines:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for line in _lines:
            terminalreporter.write_line(line)
