"""Shared pytest plumbing: collect acceptance-criterion verdicts for the summary."""

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, name: str, passed: bool) -> None:
    status = "PASS" if passed else "FAIL"
    _ACCEPTANCE_LINES.append(f"criterion {number:2d} {status}  {name}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
