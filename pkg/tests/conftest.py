import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def enum_cache_dir(tmp_path_factory):
    """Persist bounded-height enumerations for the whole test session."""
    prior = os.environ.get("MODLAT_CACHE_DIR")
    path = tmp_path_factory.mktemp("enum_cache")
    os.environ["MODLAT_CACHE_DIR"] = str(path)
    yield str(path)
    if prior is None:
        os.environ.pop("MODLAT_CACHE_DIR", None)
    else:
        os.environ["MODLAT_CACHE_DIR"] = prior


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
