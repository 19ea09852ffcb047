import os

import numpy as np
import pytest

from bipath.filtration import parse_filtration
from bipath.cli import fixture_text

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    failed = rep.failed or (rep.when == "call" and rep.outcome != "passed")
    prev = _criteria.get(num, (title, "PASS"))[1]
    if rep.when == "call" or failed:
        _criteria[num] = (title, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")


@pytest.fixture(scope="session")
def base_seed() -> int:
    return int(os.environ.get("BIPATH_SEED", "0") or 0)


@pytest.fixture
def rng(base_seed):
    return np.random.default_rng(base_seed + 12345)


@pytest.fixture(scope="session")
def worked_example():
    return parse_filtration(fixture_text())
