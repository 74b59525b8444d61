import pytest

from selfdecomp.distributions import clear_tables

# acceptance lines collected by test_acceptance.py, echoed in the summary
ACCEPTANCE_LINES = []


@pytest.fixture
def isolated_tables(monkeypatch):
    """Run with an empty table registry and no cache directory."""
    monkeypatch.delenv("SELFDECOMP_TABLE_DIR", raising=False)
    clear_tables()
    yield
    clear_tables()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
