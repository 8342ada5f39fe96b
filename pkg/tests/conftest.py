"""Shared fixtures: packaged demo data, endpoint hygiene, acceptance summary."""

from __future__ import annotations

import itertools

import pytest

from soas import transport
from soas.fixtures import default_catalog_path, default_lexicon_path, fixture_path
from soas.locator import load_catalog
from soas.rpu import load_lexicon

_inproc_counter = itertools.count()


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(default_lexicon_path())


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(default_catalog_path())


@pytest.fixture
def kb_path():
    """Path of a packaged knowledge base file by name."""
    return fixture_path


@pytest.fixture
def inproc_name():
    """A fresh inproc endpoint name, unique across the test session."""

    def fresh(tag: str = "t") -> str:
        return f"test-{tag}-{next(_inproc_counter)}"

    return fresh


@pytest.fixture(autouse=True)
def _inproc_isolation():
    """Fail any test that leaks an in-process agent registration."""
    yield
    with transport._registry_lock:
        leaked = sorted(transport._inproc_handlers)
        transport._inproc_handlers.clear()
    assert not leaked, f"test leaked inproc registrations: {leaked}"


# --- acceptance criterion reporting -----------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        description, status = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"acceptance {number} {description}: {status}")
