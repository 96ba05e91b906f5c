import sys
from pathlib import Path

import pytest
from hypothesis import settings

REPO = Path(__file__).resolve().parents[1]
TOY = REPO / "data" / "toy"

sys.path.insert(0, str(Path(__file__).resolve().parent))

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY


_acceptance_status = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: acceptance gate criterion (one line per criterion)"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.get_closest_marker("acceptance") is None:
        return
    if rep.failed:
        _acceptance_status[item.name] = "FAIL"
    elif rep.skipped:
        _acceptance_status[item.name] = "SKIP"
    elif rep.when == "call" and rep.passed:
        _acceptance_status.setdefault(item.name, "PASS")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_status:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance_status):
        terminalreporter.write_line(f"{name}: {_acceptance_status[name]}")
