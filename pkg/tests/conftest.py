import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print the one-line-per-criterion acceptance summary after the run.

    The acceptance tests append their lines to SUMMARY_LINES as they
    execute; emitting them here keeps them visible under pytest's output
    capture.
    """
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "SUMMARY_LINES", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
