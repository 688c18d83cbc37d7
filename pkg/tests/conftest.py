import pytest

import twochoices as tc

# One line per acceptance criterion, echoed after the run so the report
# survives output capture.
CRITERION_LINES = []


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    """Compile the jit kernel once, before any timed assertion runs."""
    tc.run_to_consensus(tc.make_complete(4), tc.ModelParams(alpha=1.0, p=0.0), seed=0)


@pytest.fixture(scope="session")
def record_criterion():
    def record(num, ok, detail=""):
        tail = f" — {detail}" if detail else ""
        line = f"criterion {num}: {'PASS' if ok else 'FAIL'}{tail}"
        CRITERION_LINES.append(line)
        print(line, flush=True)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
