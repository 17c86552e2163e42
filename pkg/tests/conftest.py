import pytest

from quadlab.enumeration import CountTable

ACCEPTANCE_LINES: list[str] = []


def record(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def count_tables():
    """Enumeration tallies keyed by (n, r, N, Y) for n <= 9."""
    return {n: CountTable.from_enumeration(n) for n in range(2, 10)}
