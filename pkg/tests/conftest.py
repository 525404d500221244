import pytest

from anxmap.datagen import table_model


@pytest.fixture(scope="session")
def unsmoothed_model():
    """The worked-example model, smoothing off, threshold 1."""
    return table_model(smoothing=False, threshold=1.0)


@pytest.fixture(scope="session")
def smoothed_model():
    """The worked-example model with the default configuration."""
    return table_model(smoothing=True, threshold=2.5)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            if "test_acceptance.py" not in report.nodeid:
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"{verdict}  {name}")
