"""Shared fixtures: one set of derived artifacts per test session."""
from __future__ import annotations

import pytest

from h4algebra.artifacts import Artifacts
from h4algebra.cache import CacheStore
from h4algebra.config import RunConfig

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory) -> Artifacts:
    return Artifacts(CacheStore(tmp_path_factory.mktemp("cache")))


@pytest.fixture(scope="session")
def tau(artifacts):
    return artifacts.tau()


@pytest.fixture(scope="session")
def hamiltonian(artifacts):
    return artifacts.hamiltonian()


@pytest.fixture(scope="session")
def integral(artifacts):
    return artifacts.integral()


@pytest.fixture(scope="session")
def config() -> RunConfig:
    return RunConfig()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
