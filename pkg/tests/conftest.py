import pytest

_LINES = []


@pytest.fixture
def report():
    """Record one line per acceptance criterion for the terminal summary."""

    def add(name, ok, detail=""):
        _LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        print(_LINES[-1])

    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
