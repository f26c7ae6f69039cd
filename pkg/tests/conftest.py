import pytest

# filled by test_acceptance.py: (criterion number, passed, one-line detail)
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []
ACCEPTANCE_NOTES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES and not ACCEPTANCE_NOTES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
    for note in ACCEPTANCE_NOTES:
        terminalreporter.write_line(note)


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append((number, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")

    return record
