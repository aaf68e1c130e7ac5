import functools

import pytest

from gaitadapt.harness import run_scenario, scenario_catalog

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def catalog_run(name: str):
    """Trace and metrics of a catalog scenario, computed once per session."""
    return run_scenario(scenario_catalog()[name])


@pytest.fixture(scope="session")
def catalog():
    return scenario_catalog()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
