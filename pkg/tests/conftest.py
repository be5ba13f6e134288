import pytest

from invpenrose.twistor_chart import Chart


@pytest.fixture(scope="session")
def chart2():
    return Chart(2, ())


@pytest.fixture(scope="session")
def chart3():
    return Chart(3, ())


@pytest.fixture(scope="session")
def chart3_odd():
    return Chart(3, (1,))


# one line per acceptance criterion, repeated in the terminal summary so it
# survives output capture
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    def record(k: int, ok: bool, note: str) -> None:
        line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {note}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
