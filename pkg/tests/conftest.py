"""Collects the one-line verdicts printed by the acceptance suite and repeats them at the end."""
import pytest

_VERDICTS = []


@pytest.fixture
def verdict():
    def record(number, title, ok, detail=""):
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
