import pytest

# (criterion number, description, passed, detail) recorded by test_acceptance
VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, ok, detail in sorted(VERDICTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {text}  ({detail})")


@pytest.fixture
def verdict():
    def record(number, text, ok, detail=""):
        VERDICTS.append((number, text, bool(ok), detail))
        assert ok, detail
    return record
