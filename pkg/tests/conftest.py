import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"
LAYOUTS = FIXTURES / "layouts"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def layouts_dir() -> Path:
    return LAYOUTS


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion reported in the summary")
    config._criteria = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call" and call.excinfo is None:
        return
    n, title = mark.args
    ok = call.excinfo is None
    prev = item.config._criteria.get(n, (title, True))
    item.config._criteria[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(config._criteria):
        title, ok = config._criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
