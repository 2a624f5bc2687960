import re

import pytest
from hypothesis import HealthCheck, settings

from preflect import data

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def worked():
    return data.worked_example()


@pytest.fixture
def sample_rules():
    return data.sample_reorder_rules()


@pytest.fixture
def default_cr():
    return data.default_compound_rules()


_outcomes = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or report.outcome != "passed":
        prev = _outcomes.get(key, "PASS")
        _outcomes[key] = "FAIL" if report.outcome == "failed" or prev == "FAIL" else (
            "SKIP" if report.outcome == "skipped" else prev)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), outcome in sorted(_outcomes.items()):
        terminalreporter.write_line(f"criterion {n} [{name}]: {outcome}")
