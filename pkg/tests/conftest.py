import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def chain(d=3):
    from escm.graph import Dag
    return Dag(d, [(i, i + 1) for i in range(1, d)])


_CRITERIA_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion.

    Lines are written immediately and repeated in the terminal summary.
    """
    lines = request.config.stash.setdefault(_CRITERIA_KEY, [])
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def report(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        lines.append(line)
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
