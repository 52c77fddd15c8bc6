import pytest

# criterion number -> list of (label, passed, detail), filled by test_acceptance.py
CRITERIA: dict = {}


def record(number, label: str, passed: bool, detail: str = ""):
    CRITERIA.setdefault(number, []).append((label, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA, key=str):
        for label, passed, detail in CRITERIA[number]:
            line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {label}"
            if detail:
                line += f"  [{detail}]"
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    return record
