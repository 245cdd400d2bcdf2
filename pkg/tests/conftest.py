from __future__ import annotations

import json
import logging
from importlib import resources

import pytest

from usher.catalog import Scenario, load_scenario
from usher.harness import Persona, load_bundled_personas, load_bundled_scenarios

logging.getLogger("usher").setLevel(logging.ERROR)


@pytest.fixture(scope="session")
def scenarios() -> dict[str, Scenario]:
    return load_bundled_scenarios()


@pytest.fixture(scope="session")
def personas() -> dict[str, Persona]:
    return load_bundled_personas()


@pytest.fixture(scope="session")
def parents(scenarios) -> Scenario:
    return scenarios["parents_anniversary"]


@pytest.fixture(scope="session")
def sibling(scenarios) -> Scenario:
    return scenarios["sibling_bmovie"]


@pytest.fixture(scope="session")
def fig3(scenarios) -> Scenario:
    return scenarios["family_matinee"]


@pytest.fixture(scope="session")
def fig1(scenarios) -> Scenario:
    return scenarios["starfall_circuit"]


def scenario_doc(scenario_id: str) -> dict:
    text = resources.files("usher").joinpath(f"scenarios/{scenario_id}.json").read_text()
    return json.loads(text)


def reload_scenario(doc: dict) -> Scenario:
    return load_scenario(json.dumps(doc))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for status in ("passed", "failed"):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" in report.nodeid and report.when == "call":
                name = report.nodeid.split("::")[-1]
                lines.append((name, status == "passed"))
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, ok in sorted(lines):
            terminalreporter.write_line(f"  [{'PASS' if ok else 'FAIL'}] {name}")
