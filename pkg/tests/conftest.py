import pytest

# verdict lines collected by the acceptance suite, echoed after the run
VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    def record(criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        VERDICTS.append(line)
        print(line, flush=True)

    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in sorted(VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
