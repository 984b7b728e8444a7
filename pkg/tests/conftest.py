import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record a one-line PASS/FAIL verdict, then assert it."""

    def record(number: int, title: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | {detail}")
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
