import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Record and print one pass/fail line for an acceptance criterion."""

    def _report(number: int, title: str, ok: bool, detail: str, elapsed: float, limit: float | None):
        timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit is not None else "")
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{timing}]"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
