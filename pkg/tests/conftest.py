import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line, then fail the test if the check did not hold."""

    def record(number: int, label: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number} {status}: {label}"
        _LINES.append(f"{line} ({detail})" if detail else line)
        assert passed, f"criterion {number} failed: {label} {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
