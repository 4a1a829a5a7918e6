import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Print one status line per acceptance criterion and keep it for the summary."""

    def _report(number, ok, detail, label=None):
        line = f"[{label or ('PASS' if ok else 'FAIL')}] criterion {number}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print("\n" + line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
