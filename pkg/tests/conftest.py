import pytest

from twlab.rng import make_stream

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def stream():
    return make_stream(20261016, 0)


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance check; all lines print at the end of the run."""

    def record(label: str, passed: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
