import pytest

# One line per acceptance criterion, echoed after the run so the report
# survives output capture.
PLOT_CRITERION_LINES = []


@pytest.fixture(scope="session")
def record_plot_criterion():
    def record(num, ok, detail=""):
        tail = f" — {detail}" if detail else ""
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}{tail}"
        PLOT_CRITERION_LINES.append(line)
        print(line, flush=True)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus):
    if PLOT_CRITERION_LINES:
        terminalreporter.section("acceptance criteria (plots)")
        for line in PLOT_CRITERION_LINES:
            terminalreporter.write_line(line)
